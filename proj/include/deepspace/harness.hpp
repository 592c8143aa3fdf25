#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "deepspace/antenna.hpp"
#include "deepspace/config.hpp"
#include "deepspace/link_budget.hpp"
#include "deepspace/numerics.hpp"
#include "deepspace/parallel.hpp"
#include "deepspace/plasma.hpp"
#include "deepspace/rng.hpp"
#include "deepspace/thermal_noise.hpp"

namespace deepspace {

inline constexpr double kZ995 = 2.5758293035489004;

struct SampleRecord {
  double distance = 0.0;     // m
  double phase = 0.0;        // plasma phase shift, rad
  double delta_theta = 0.0;  // rad
  double alpha = 0.0;
  double t_sys = 0.0;        // K
  double g_r = 0.0;
  double se = 0.0;
};

struct PointResult {
  double value = 0.0;
  double mean_se = 0.0;
  double std_se = 0.0;
  double ci99_half = 0.0;
  int samples = 0;
  std::uint64_t seed = 0;
  std::vector<SampleRecord> trace;
};

struct SweepResult {
  SweepAxis axis = SweepAxis::alpha;
  std::string label;
  std::uint64_t seed = 0;
  std::vector<PointResult> points;
};

struct RunOptions {
  unsigned threads = 0;     // 0: DEEPSPACE_SIM_THREADS, then hardware
  bool keep_trace = false;
};

struct Statistics {
  double mean = 0.0;
  double std = 0.0;
  double ci99_half = 0.0;
};

// Mean, sample standard deviation (n - 1) and 99% CI half-width.
inline Statistics summarize(const std::vector<double>& x) {
  if (x.empty()) throw RangeError("summarize: no samples");
  Statistics s;
  const double n = static_cast<double>(x.size());
  if (std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
    s.mean = x.front();
    return s;
  }
  s.mean = pairwise_sum(x) / n;
  if (x.size() > 1) {
    std::vector<double> d(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) d[i] = (x[i] - s.mean) * (x[i] - s.mean);
    s.std = std::sqrt(pairwise_sum(d) / (n - 1));
  }
  s.ci99_half = kZ995 * s.std / std::sqrt(n);
  return s;
}

// Everything about the link that depends only on the carrier and the array:
// the receive antenna, the pattern used for the noise bookkeeping and the
// arrival-angle variance per unit (fluctuation^2 * length).
class LinkModel {
 public:
  LinkModel(const ScenarioConfig& c, bool need_noise_pattern, unsigned threads = 1)
      : carrier_(c.carrier_frequency),
        array_(c.array),
        antenna_(build_aperture(c), c.efficiency_rx, c.array.phase_bits) {
    if (need_noise_pattern) {
      noise_pattern_ = std::make_shared<const RadiationPattern>(
          radiation_pattern(antenna_.field(), GridSpec{c.array.grid_theta, c.array.grid_phi}, threads));
      fov_ = beamwidth(*noise_pattern_, 30.0);
    }
  }

  bool matches(const ScenarioConfig& c, bool need_noise_pattern) const {
    return c.carrier_frequency == carrier_ && c.array == array_ &&
           c.efficiency_rx == antenna_.efficiency() && (!need_noise_pattern || noise_pattern_);
  }

  const LinkAntenna& antenna() const { return antenna_; }
  const RadiationPattern* noise_pattern() const { return noise_pattern_.get(); }
  double field_of_view() const { return fov_; }

  // Variance of the arrival angle for unit fluctuation variance and unit
  // path length; the result scales linearly in both.
  double unit_variance(double outer, double inner) const {
    std::lock_guard lock(mutex_);
    if (!unit_variance_ || unit_scales_ != std::make_pair(outer, inner)) {
      const auto spec = kolmogorov_spectrum(1.0, outer, inner);
      unit_variance_ = aoa_variance(antenna_.geometry(), spec, wavelength_of(carrier_), 1.0);
      unit_scales_ = {outer, inner};
    }
    return *unit_variance_;
  }

 private:
  double carrier_;
  ArrayDescriptor array_;
  LinkAntenna antenna_;
  std::shared_ptr<const RadiationPattern> noise_pattern_;
  double fov_ = 0.0;
  mutable std::mutex mutex_;
  mutable std::optional<double> unit_variance_;
  mutable std::pair<double, double> unit_scales_{0.0, 0.0};
};

class ModelCache {
 public:
  std::shared_ptr<const LinkModel> get(const ScenarioConfig& c, unsigned threads = 1) {
    const bool need = c.noise.n_bodies > 0;
    for (const auto& m : models_)
      if (m->matches(c, need)) return m;
    models_.push_back(std::make_shared<const LinkModel>(c, need, threads));
    return models_.back();
  }

 private:
  std::vector<std::shared_ptr<const LinkModel>> models_;
};

inline ScenarioConfig apply_axis(ScenarioConfig c, SweepAxis axis, double v) {
  switch (axis) {
    case SweepAxis::alpha:
      c.plasma.alpha = v;
      c.plasma.alpha_mode = AlphaMode::fixed;
      break;
    case SweepAxis::beta:
      c.plasma.beta = v;
      break;
    case SweepAxis::kappa:
      c.kappa1 = c.kappa2 = v;
      break;
    case SweepAxis::n_bodies:
      if (v < 0 || v != std::floor(v)) throw RangeError("sweep: n_bodies values must be non-negative integers");
      c.noise.n_bodies = static_cast<int>(v);
      break;
    case SweepAxis::theta_s:
      c.steering_limit = v;
      break;
    case SweepAxis::tx_power:
      c.tx_power = v;
      break;
    case SweepAxis::carrier_frequency:
      c.carrier_frequency = v;
      break;
  }
  validate(c);
  return c;
}

// Draws one arrival-angle realization for the sample.
inline double sample_delta_theta(const ScenarioConfig& c, const LinkModel& m, double alpha,
                                 double distance, Rng& rng) {
  const auto& p = c.plasma;
  switch (p.aoa_model) {
    case AoaModel::proxy:
      return aoa_proxy_sigma(p.aoa_sigma_ref, alpha, p.beta, c.carrier_frequency) * rng.normal();
    case AoaModel::variance: {
      const double dn = density_fluctuation(electron_density(p.r_over_rs), alpha, p.beta);
      const double var = m.unit_variance(p.outer_scale, p.inner_scale) * dn * dn * distance;
      return std::sqrt(var) * rng.normal();
    }
    case AoaModel::physical: {
      PlasmaState s{alpha, p.beta, p.omega0, p.r_over_rs, distance};
      return sample_aoa_physical(s, c.wavelength(), 2.0 * m.antenna().geometry().semi_axis_a,
                                 p.path_steps, p.path_profile, rng);
    }
  }
  return 0.0;
}

// One Monte Carlo sample. Every random quantity comes from its own
// counter-derived stream, so samples are independent of evaluation order.
inline SampleRecord simulate_sample(const ScenarioConfig& c, const LinkModel& m,
                                    std::uint64_t point, std::uint64_t sample) {
  SampleRecord r;
  Rng rd = Rng::for_sample(c.rng_seed, point, sample, Stream::distance);
  r.distance = sample_link_distance(c.link, rd.uniform());

  r.alpha = c.plasma.alpha;
  if (c.plasma.alpha_mode == AlphaMode::uniform) {
    Rng ra = Rng::for_sample(c.rng_seed, point, sample, Stream::alpha);
    r.alpha = ra.uniform(c.plasma.alpha_min, c.plasma.alpha_max);
  }

  const PlasmaState state{r.alpha, c.plasma.beta, c.plasma.omega0, c.plasma.r_over_rs, r.distance};
  r.phase = phase_shift(state, c.wavelength(), c.plasma.path_steps, c.plasma.path_profile);

  Rng rq = Rng::for_sample(c.rng_seed, point, sample, Stream::aoa);
  r.delta_theta = sample_delta_theta(c, m, r.alpha, r.distance, rq);

  r.t_sys = c.noise.cmb_temperature;
  if (c.noise.n_bodies > 0) {
    const std::uint64_t scene_sample = c.noise.scene_mode == SceneMode::fixed ? 0 : sample;
    Rng rs = Rng::for_sample(c.rng_seed, point, scene_sample, Stream::scene);
    const auto scene = place_bodies(c.noise.n_bodies, m.field_of_view(), rs, placement_options(c.noise));
    r.t_sys = system_temperature(scene, *m.noise_pattern(), c.noise.be_weighting);
  }

  const auto& ant = m.antenna();
  const double g_t = c.efficiency_tx * ant.peak_directivity();
  r.g_r = receive_gain(ant, r.delta_theta, c.steering, c.steering_limit);
  const cplx h = std::polar(std::sqrt(path_gain(c.wavelength(), r.distance)), r.phase);
  r.se = spectral_efficiency(c.tx_power, g_t, r.g_r, h, r.t_sys, c.kappa1, c.kappa2, c.se_variant);
  return r;
}

inline PointResult run_point(const ScenarioConfig& c, const LinkModel& m, std::uint64_t point,
                             const RunOptions& o = {}) {
  validate(c);
  const auto n = static_cast<std::size_t>(c.n_samples);
  std::vector<SampleRecord> rec(n);
  parallel_for(n, resolve_threads(o.threads),
               [&](std::size_t s) { rec[s] = simulate_sample(c, m, point, s); });
  std::vector<double> se(n);
  for (std::size_t s = 0; s < n; ++s) se[s] = rec[s].se;
  const auto st = summarize(se);
  PointResult p;
  p.mean_se = st.mean;
  p.std_se = st.std;
  p.ci99_half = st.ci99_half;
  p.samples = c.n_samples;
  p.seed = c.rng_seed;
  if (o.keep_trace) p.trace = std::move(rec);
  return p;
}

inline PointResult run_point(const ScenarioConfig& c, std::uint64_t point = 0, const RunOptions& o = {}) {
  const LinkModel m(c, c.noise.n_bodies > 0, resolve_threads(o.threads));
  return run_point(c, m, point, o);
}

inline SweepResult run_sweep(const ScenarioConfig& c, ModelCache& cache, const RunOptions& o = {},
                             std::string label = {}) {
  validate(c);
  SweepResult out;
  out.axis = c.sweep.axis;
  out.label = std::move(label);
  out.seed = c.rng_seed;
  for (std::size_t i = 0; i < c.sweep.values.size(); ++i) {
    const double v = c.sweep.values[i];
    const ScenarioConfig pc = apply_axis(c, c.sweep.axis, v);
    const auto model = cache.get(pc, resolve_threads(o.threads));
    PointResult p = run_point(pc, *model, i, o);
    p.value = v;
    out.points.push_back(std::move(p));
  }
  return out;
}

inline SweepResult run_sweep(const ScenarioConfig& c, const RunOptions& o = {}) {
  ModelCache cache;
  return run_sweep(c, cache, o);
}

}  // namespace deepspace
