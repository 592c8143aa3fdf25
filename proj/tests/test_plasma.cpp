#include <gtest/gtest.h>

#include <cmath>

#include "deepspace/plasma.hpp"

using namespace deepspace;

namespace {

// CODATA 2018, written out again so the oracles do not share the library table.
constexpr double e_ = 1.602176634e-19, me_ = 9.1093837015e-31, eps0_ = 8.8541878128e-12, c_ = 299792458.0;

}  // namespace

TEST(Density, ProfileValues) {
  EXPECT_NEAR(electron_density(1.0), 2.2255e14, 1e-6 * 2.2255e14);
  EXPECT_NEAR(electron_density(10.0), 2.21e8 + 1.55e12 / std::pow(10.0, 2.3), 1e-3);
  EXPECT_NEAR(electron_density(10.0), 7.99e9, 0.01e9);
  double prev = INFINITY;
  for (double r = 1; r < 500; r *= 1.3) {
    EXPECT_LT(electron_density(r), prev);
    prev = electron_density(r);
  }
  EXPECT_THROW(electron_density(0.99), RangeError);
}

TEST(PlasmaFrequency, Values) {
  EXPECT_EQ(plasma_frequency(0.0), 0.0);
  const double oracle = std::sqrt(1e12 * e_ * e_ / (eps0_ * me_)) / (2 * M_PI);
  EXPECT_NEAR(plasma_frequency(1e12), oracle, 1e-9 * oracle);
  EXPECT_NEAR(plasma_frequency(1e12), 8.98e6, 0.01e6);
  EXPECT_NEAR(plasma_frequency(4e10), 2 * plasma_frequency(1e10), 1e-9);
}

TEST(Permittivity, VacuumAndSmallOmegaLimit) {
  EXPECT_EQ(permittivity(0.03, 0.0, 1.0), 1.0);
  const double fp = 8.98e6;
  const double n = std::pow(2 * M_PI * fp, 2) * eps0_ * me_ / (e_ * e_);
  const double f = c_ / 0.03;
  const double eps = permittivity(0.03, n, 1.0);
  EXPECT_NEAR(1 - eps, (fp / f) * (fp / f), 1e-12);
  EXPECT_NEAR(1 - eps, 8.06e-7, 0.02e-7);  // f = 9.993 GHz here, not 10
  for (double ne : {1e3, 1e6, 1e12}) EXPECT_LT(permittivity(0.03, ne, 1.0), 1.0);
}

TEST(Permittivity, ResonanceIsNumericError) {
  const double lambda = 0.03;
  const double w0 = 2 * M_PI * c_ / lambda;
  EXPECT_THROW(permittivity(lambda, 1e10, w0), NumericError);
  EXPECT_THROW(delta_epsilon(lambda, 1e3, w0), NumericError);
  EXPECT_THROW(permittivity(0.0, 1e10, 1.0), RangeError);
}

TEST(Fluctuation, Values) {
  EXPECT_NEAR(density_fluctuation(7.99e9, 1, 3e6), 2.66e3, 0.01e3);
  EXPECT_LT(density_fluctuation(1e10, 1e12, 3e6), 1e-8);
  EXPECT_DOUBLE_EQ(density_fluctuation(1e10, 4, 3e6) * 4, density_fluctuation(1e10, 1, 3e6));
  EXPECT_THROW(density_fluctuation(1e10, 0, 3e6), RangeError);
}

TEST(DeltaEpsilon, SlopeOfPermittivity) {
  EXPECT_EQ(delta_epsilon(0.03, 0.0, 1.0), 0.0);
  const double n = 1e12, h = 5e11, dn = 2.66e3;
  const double slope = (permittivity(0.03, n + h, 1.0) - permittivity(0.03, n - h, 1.0)) / (2 * h);
  EXPECT_NEAR(delta_epsilon(0.03, dn, 1.0) / (slope * dn), 1.0, 1e-9);
  EXPECT_LT(delta_epsilon(0.03, dn, 1.0), 0.0);
}

TEST(PhaseShift, ConstantIntegrandClosedForm) {
  const double k = 2 * M_PI / 0.03;
  const double got = phase_integral([](double) { return -1e-20; }, 3.844e8, k, 1000);
  const double oracle = k / 2 * -1e-20 * 3.844e8;
  EXPECT_NEAR(got / oracle, 1.0, 1e-9);
  EXPECT_NEAR(got, -4.025e-10, 0.001e-10);
  EXPECT_EQ(phase_integral([](double) { return 0.0; }, 3.844e8, k, 1000), 0.0);
  EXPECT_THROW(phase_integral([](double) { return 0.0; }, 1.0, k, 0), RangeError);
}

TEST(PhaseShift, LeftRectangleRule) {
  // integrand l: left rule gives L^2/2 (1 - 1/n)
  const double got = phase_integral([](double l) { return l; }, 2.0, 2.0, 4);
  EXPECT_NEAR(got, 2.0 * (1 - 0.25), 1e-14);
}

TEST(PhaseShift, StepHalvingConverges) {
  for (auto profile : {PathProfile::midpoint, PathProfile::geometric}) {
    PlasmaState s;
    s.path_length = 4.2e8;
    if (profile == PathProfile::geometric) s.r_over_rs = 20.0;  // path passes near the Sun
    const double a = phase_shift(s, 0.03, 1000, profile);
    const double b = phase_shift(s, 0.03, 500, profile);
    EXPECT_LT(std::abs(a - b), 1e-3 * std::abs(a)) << static_cast<int>(profile);
    EXPECT_LT(a, 0.0);
  }
}

TEST(PhaseShift, InvalidStateRejected) {
  PlasmaState s;
  s.r_over_rs = 2.0;  // 64 < 10 * 3e6
  EXPECT_FALSE(s.valid());
  EXPECT_THROW(phase_shift(s, 0.03), RangeError);
  EXPECT_TRUE(PlasmaState{}.valid());
}

TEST(ArrivalAngle, Chandrasekhar) {
  EXPECT_EQ(aoa_fluctuation(0.0, 1.0, 209.44), 0.0);
  EXPECT_NEAR(aoa_fluctuation(2.0944e-2, 1.0, 209.44), 1e-4, 1e-12);
  EXPECT_NEAR(aoa_fluctuation(1.0, 0.25, 10.0), 2 * aoa_fluctuation(1.0, 1.0, 10.0), 1e-15);
  EXPECT_THROW(aoa_fluctuation(1.0, 0.0, 10.0), NumericError);
  EXPECT_THROW(aoa_fluctuation(1.0, -0.5, 10.0), NumericError);
}

namespace {

ReflectarrayGeometry disc(double spacing, double radius) {
  return build_elliptical_aperture(radius, radius, spacing, 0.03, 0.8, 0.0, 10.0, 1.0);
}

}  // namespace

TEST(ApertureAverage, LinearAndEvenFields) {
  const auto g = build_aperture(ScenarioConfig{});
  const double k = g.wavenumber();
  EXPECT_NEAR(aoa_aperture_average(g, [](double x, double) { return 0.37 * x + 2.0; }, k) * k, 0.37, 1e-12);
  EXPECT_NEAR(aoa_aperture_average(g, [](double x, double z) { return 5.0 * x * x + z; }, k), 0.0, 1e-15);
  ReflectarrayGeometry empty;
  EXPECT_THROW(aoa_aperture_average(empty, [](double, double) { return 0.0; }, k), RangeError);
}

TEST(ApertureAverage, SmoothFieldAgainstFinerGrid) {
  const double k = 2 * M_PI / 0.03, r = 0.3;
  auto phase = [](double x, double z) { return 4.0 * x + std::sin(6 * x + 2 * z) + x * z * z; };
  const double coarse = aoa_aperture_average(disc(0.015, r), phase, k);
  const double fine = aoa_aperture_average(disc(0.015 / 4, r), phase, k);
  EXPECT_NEAR(coarse / fine, 1.0, 5e-3);
}

TEST(ApertureAverage, ConstantGradientPathMatchesPointwise) {
  // delta_eps varies linearly across the aperture; the phase of every ray is
  // the rectangular-rule path integral, the slope of the phase is what the
  // Chandrasekhar relation turns into an angle.
  const double lambda = 0.03, k = 2 * M_PI / lambda, L = 3.844e8, d0 = -1e-20, grad = 0.8;
  auto phase = [&](double x, double) {
    return phase_integral([&](double) { return d0 * (1 + grad * x); }, L, k, 1000);
  };
  const auto g = disc(0.015, 0.4);
  const double avg = aoa_aperture_average(g, phase, k);
  const double pointwise = aoa_fluctuation(k / 2 * d0 * grad * L, 1.0 + d0, k);
  EXPECT_NEAR(avg / pointwise, 1.0, 5e-3);
}

TEST(FilterTerm, ZeroWavenumberLimitAndBessel) {
  const double re = kConstants.classical_electron_radius, l = 0.03;
  EXPECT_NEAR(aperture_filter_term(0.5, 0.5, 0, 0, l), re * re * std::pow(l, 4) / 4, 1e-60);
  EXPECT_NEAR(aperture_filter_term(0.5, 0.5, 1e-9, 0, l), aperture_filter_term(0.5, 0.5, 0, 0, l), 1e-70);
  EXPECT_NEAR(bessel_j1(1.0), 0.4400506, 1e-6);
  EXPECT_THROW(aperture_filter_term(0, 1, 1, 1, l), RangeError);
}

TEST(FilterTerm, MatchesBruteForceOverSmallDisc) {
  // I = r_e^2 lambda^4 / (4 A^2) |int_A exp(j kappa.r) dA|^2 on a disc of two
  // cell radii, integrated in polar coordinates without any Bessel function.
  const double s = 0.015, r = 2 * s, l = 0.03, re = kConstants.classical_electron_radius;
  const double A = M_PI * r * r;
  for (double q : {0.0, 20.0, 90.0, 200.0, 400.0}) {
    for (double ang : {0.0, 0.7}) {
      const double kx = q * std::cos(ang), kz = q * std::sin(ang);
      const int nr = 400, nt = 400;
      double sre = 0, sim = 0;
      for (int a = 0; a < nr; ++a) {
        const double rho = (a + 0.5) * r / nr;
        for (int b = 0; b < nt; ++b) {
          const double t = (b + 0.5) * 2 * M_PI / nt;
          const double arg = kx * rho * std::cos(t) + kz * rho * std::sin(t);
          sre += std::cos(arg) * rho;
          sim += std::sin(arg) * rho;
        }
      }
      const double w = (r / nr) * (2 * M_PI / nt);
      const double mag2 = (sre * w) * (sre * w) + (sim * w) * (sim * w);
      const double oracle = re * re * std::pow(l, 4) * mag2 / (4 * A * A);
      const double got = aperture_filter_term(r, r, kx, kz, l);
      EXPECT_NEAR(got / oracle, 1.0, 1e-3) << "q = " << q;
    }
  }
}

TEST(Variance, ZeroAndLinearInAmplitude) {
  const double l = 0.03, L = 3.844e8;
  const auto zero = kolmogorov_spectrum(0.0, 1e9, 1e4);
  EXPECT_EQ(aoa_variance(0.86, 0.86, zero, l, L), 0.0);
  const double v1 = aoa_variance(0.86, 0.86, kolmogorov_spectrum(1.0, 1e9, 1e4), l, L);
  const double v3 = aoa_variance(0.86, 0.86, kolmogorov_spectrum(3.0, 1e9, 1e4), l, L);
  EXPECT_GT(v1, 0.0);
  EXPECT_NEAR(v3 / v1, 3.0, 1e-9);
  const double ve = aoa_variance(0.86, 0.43, kolmogorov_spectrum(1.0, 1e9, 1e4), l, L);
  EXPECT_GT(ve, 0.0);
}

TEST(Variance, DeltaSpectrumCollapse) {
  const double a = 0.5, l = 0.03, L = 1e8, q0 = 7.0, eps = 1e-4, D = 2.5e-3;
  TurbulenceSpectrum spec{[D](double) { return D; }, q0 * (1 - eps), q0 * (1 + eps)};
  const double got = aoa_variance(a, a, spec, l, L);
  // 2 pi L * int dtheta int q dq I q^2 Psi over a thin shell
  const double oracle = 2 * M_PI * L * 2 * M_PI * aperture_filter_term(a, a, q0, 0, l) * q0 * q0 * q0 * D * (2 * eps * q0);
  EXPECT_NEAR(got / oracle, 1.0, 1e-6);
}

TEST(Variance, KolmogorovNormalization) {
  const auto s = kolmogorov_spectrum(2.0, 1e3, 1.0);
  // 4 pi int k^2 Psi dk = variance
  const double total = integrate([&](double lk) { const double k = std::exp(lk); return 4 * M_PI * k * k * s(k) * k; },
                                 std::log(s.kappa_min), std::log(s.kappa_max));
  EXPECT_NEAR(total, 2.0, 1e-8);
  EXPECT_GE(s(1.0), 0.0);
  EXPECT_EQ(s(s.kappa_max * 2), 0.0);
}

TEST(Variance, MissingCutoffsRejected) {
  TurbulenceSpectrum open{[](double k) { return std::pow(k, -11.0 / 3.0); }, 0.0, INFINITY};
  EXPECT_THROW(aoa_variance(0.5, 0.5, open, 0.03, 1.0), NumericError);
}

TEST(Sampling, GaussianProxyVariance) {
  const double sigma = aoa_proxy_sigma(10 * kPi / 108, 2.0, 3e6, 10e9);
  EXPECT_NEAR(sigma, 10 * kPi / 108 / 2, 1e-15);
  EXPECT_NEAR(aoa_proxy_sigma(1.0, 1.0, 3e6, 20e9), 0.25, 1e-15);
  Rng rng(11);
  const int n = 200000;
  double s2 = 0;
  for (int i = 0; i < n; ++i) {
    const double v = sigma * rng.normal();
    s2 += v * v;
  }
  EXPECT_NEAR(s2 / n / (sigma * sigma), 1.0, 0.03);
}

TEST(Sampling, PhysicalDrawIsDeterministic) {
  PlasmaState s;
  Rng a(5), b(5);
  const double x = sample_aoa_physical(s, 0.03, 1.72, 200, PathProfile::midpoint, a);
  const double y = sample_aoa_physical(s, 0.03, 1.72, 200, PathProfile::midpoint, b);
  EXPECT_EQ(x, y);
  EXPECT_TRUE(std::isfinite(x));
}
