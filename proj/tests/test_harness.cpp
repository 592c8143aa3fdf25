#include <gtest/gtest.h>

#include <cmath>

#include "deepspace/harness.hpp"

using namespace deepspace;

namespace {

ScenarioConfig quiet_config() {
  ScenarioConfig c;
  c.plasma.aoa_sigma_ref = 0.0;
  c.link.orbit_height_1 = c.link.orbit_height_2 = 0.0;
  c.n_samples = 50;
  return c;
}

// shared so the 10k-cell antenna is built once
const LinkModel& table_model() {
  static const LinkModel m(ScenarioConfig{}, false);
  return m;
}

}  // namespace

TEST(Statistics, Formula) {
  const std::vector<double> x{1, 2, 3, 4, 10};
  const auto s = summarize(x);
  EXPECT_DOUBLE_EQ(s.mean, 4.0);
  EXPECT_NEAR(s.std, std::sqrt((9 + 4 + 1 + 0 + 36) / 4.0), 1e-12);
  EXPECT_NEAR(s.ci99_half, 2.5758293035489004 * s.std / std::sqrt(5.0), 1e-12);
  EXPECT_THROW(summarize({}), RangeError);
  const auto c = summarize({0.3, 0.3, 0.3});
  EXPECT_EQ(c.mean, 0.3);
  EXPECT_EQ(c.ci99_half, 0.0);
}

TEST(Statistics, CoverageOfGaussianMean) {
  Rng rng(77);
  int hit = 0;
  const int trials = 1000;
  for (int t = 0; t < trials; ++t) {
    std::vector<double> x(100);
    for (auto& v : x) v = 5.0 + 2.0 * rng.normal();
    const auto s = summarize(x);
    if (std::abs(s.mean - 5.0) <= s.ci99_half) ++hit;
  }
  EXPECT_GE(hit, 970);
}

TEST(Harness, ZeroVariancePoint) {
  const auto r = run_point(quiet_config());
  EXPECT_EQ(r.std_se, 0.0);
  EXPECT_EQ(r.ci99_half, 0.0);
  EXPECT_EQ(r.samples, 50);
  EXPECT_NEAR(r.mean_se, 38.0, 3.0);
}

TEST(Harness, TableTwoPoint) {
  auto c = ScenarioConfig{};
  c.steering = SteeringPolicy::unbounded_ideal;
  const auto r = run_point(c, table_model(), 0);
  EXPECT_NEAR(r.mean_se, 38.0, 3.0);
  EXPECT_GT(r.ci99_half, 0.0);  // distance still varies
}

TEST(Harness, SameSeedSameBits) {
  auto c = ScenarioConfig{};
  c.n_samples = 40;
  c.kappa1 = c.kappa2 = 1e-9;
  RunOptions one, four;
  one.threads = 1;
  four.threads = 4;
  one.keep_trace = four.keep_trace = true;
  const auto a = run_point(c, table_model(), 3, one);
  const auto b = run_point(c, table_model(), 3, four);
  const auto d = run_point(c, table_model(), 3, one);
  EXPECT_EQ(a.mean_se, b.mean_se);
  EXPECT_EQ(a.ci99_half, b.ci99_half);
  EXPECT_EQ(a.mean_se, d.mean_se);
  for (std::size_t s = 0; s < a.trace.size(); ++s) {
    EXPECT_EQ(a.trace[s].delta_theta, b.trace[s].delta_theta);
    EXPECT_EQ(a.trace[s].se, b.trace[s].se);
  }
  c.rng_seed += 1;
  EXPECT_NE(run_point(c, table_model(), 3, one).mean_se, a.mean_se);
}

TEST(Harness, MeanInsideSampleRange) {
  auto c = ScenarioConfig{};
  c.n_samples = 60;
  RunOptions o;
  o.keep_trace = true;
  const auto r = run_point(c, table_model(), 0, o);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& s : r.trace) {
    lo = std::min(lo, s.se);
    hi = std::max(hi, s.se);
    EXPECT_GE(s.distance, c.link.min_distance());
    EXPECT_LE(s.distance, c.link.max_distance());
    EXPECT_EQ(s.t_sys, 2.761);
  }
  EXPECT_GE(r.mean_se, lo);
  EXPECT_LE(r.mean_se, hi);
}

TEST(Harness, ApplyAxis) {
  const ScenarioConfig c;
  EXPECT_EQ(apply_axis(c, SweepAxis::alpha, 4).plasma.alpha, 4.0);
  auto u = c;
  u.plasma.alpha_mode = AlphaMode::uniform;
  EXPECT_EQ(apply_axis(u, SweepAxis::alpha, 4).plasma.alpha_mode, AlphaMode::fixed);
  const auto k = apply_axis(c, SweepAxis::kappa, 1e-8);
  EXPECT_EQ(k.kappa1, 1e-8);
  EXPECT_EQ(k.kappa2, 1e-8);
  EXPECT_EQ(apply_axis(c, SweepAxis::n_bodies, 10).noise.n_bodies, 10);
  EXPECT_EQ(apply_axis(c, SweepAxis::beta, 5e6).plasma.beta, 5e6);
  EXPECT_EQ(apply_axis(c, SweepAxis::theta_s, 0.1).steering_limit, 0.1);
  EXPECT_EQ(apply_axis(c, SweepAxis::tx_power, 100).tx_power, 100.0);
  EXPECT_EQ(apply_axis(c, SweepAxis::carrier_frequency, 20e9).carrier_frequency, 20e9);
  EXPECT_THROW(apply_axis(c, SweepAxis::n_bodies, 2.5), RangeError);
  EXPECT_THROW(apply_axis(c, SweepAxis::alpha, -1), RangeError);
}

TEST(Trends, AlphaSweepRisesWithoutSteering) {
  auto c = ScenarioConfig{};
  c.steering = SteeringPolicy::none;
  c.n_samples = 100;
  c.sweep.values = {1, 4, 10};
  const auto r = run_sweep(c);
  ASSERT_EQ(r.points.size(), 3u);
  EXPECT_LT(r.points[0].mean_se, r.points[1].mean_se);
  EXPECT_LT(r.points[1].mean_se, r.points[2].mean_se);
  EXPECT_EQ(r.points[2].value, 10.0);
}

TEST(Trends, BodiesBarelyMatterUnderImpairment) {
  auto c = ScenarioConfig{};
  c.kappa1 = c.kappa2 = 1e-8;
  c.steering = SteeringPolicy::unbounded_ideal;
  c.n_samples = 30;
  c.array.grid_theta = 180;
  c.array.grid_phi = 360;
  const auto a = run_point(c);
  c.noise.n_bodies = 10;
  const auto b = run_point(c);
  EXPECT_LT(std::abs(a.mean_se - b.mean_se), a.ci99_half + b.ci99_half + 0.05);
}

TEST(Trends, HigherCarrierSmallerTilt) {
  auto c = ScenarioConfig{};
  c.n_samples = 200;
  c.array.target_cells = 400;
  RunOptions o;
  o.keep_trace = true;
  auto rms = [&](double f) {
    auto pc = apply_axis(c, SweepAxis::carrier_frequency, f);
    const auto r = run_point(pc, 0, o);
    double s = 0;
    for (const auto& t : r.trace) s += t.delta_theta * t.delta_theta;
    return std::sqrt(s / r.trace.size());
  };
  const double a = rms(10e9), b = rms(20e9), d = rms(40e9);
  EXPECT_GT(a, b);
  EXPECT_GT(b, d);
}

TEST(Trends, SteeringHelpsOnAverage) {
  auto c = ScenarioConfig{};
  c.n_samples = 100;
  c.plasma.alpha = 2;
  double prev = -1;
  for (auto pol : {SteeringPolicy::none, SteeringPolicy::clamped_ideal, SteeringPolicy::unbounded_ideal}) {
    c.steering = pol;
    const double se = run_point(c, table_model(), 0).mean_se;
    EXPECT_GE(se, prev) << to_string(pol);
    prev = se;
  }
}

TEST(Trends, UniformAlphaStaysInRange) {
  auto c = ScenarioConfig{};
  c.plasma.alpha_mode = AlphaMode::uniform;
  c.n_samples = 200;
  RunOptions o;
  o.keep_trace = true;
  const auto r = run_point(c, table_model(), 0, o);
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& t : r.trace) {
    lo = std::min(lo, t.alpha);
    hi = std::max(hi, t.alpha);
  }
  EXPECT_GE(lo, 1.0);
  EXPECT_LE(hi, 10.0);
  EXPECT_LT(lo, 2.0);
  EXPECT_GT(hi, 9.0);
}
