#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "deepspace/antenna.hpp"
#include "deepspace/config.hpp"
#include "deepspace/constants.hpp"
#include "deepspace/errors.hpp"
#include "deepspace/numerics.hpp"
#include "deepspace/rng.hpp"

namespace deepspace {

struct PlasmaState {
  double alpha = 1.0;
  double beta = 3e6;
  double omega0 = 1.0;
  double r_over_rs = kAstronomicalUnit / kConstants.sun_radius;
  double path_length = 3.844e8;

  // The density-fluctuation model needs (r/r_s)^6 >> alpha beta; a factor of
  // ten is required.
  bool valid() const {
    return alpha > 0 && beta > 0 && r_over_rs >= 1 && path_length > 0 &&
           std::pow(r_over_rs, 6) >= 10.0 * alpha * beta;
  }
};

inline PlasmaState plasma_state(const ScenarioConfig& c, double path_length) {
  return {c.plasma.alpha, c.plasma.beta, c.plasma.omega0, c.plasma.r_over_rs, path_length};
}

// Electron density of the solar wind [m^-3].
inline double electron_density(double r_over_rs) {
  if (!(r_over_rs >= 1.0)) throw RangeError("electron_density: r/r_s must be >= 1");
  return 2.21e14 / std::pow(r_over_rs, 6) + 1.55e12 / std::pow(r_over_rs, 2.3);
}

inline double plasma_frequency(double n_e) {
  if (!(n_e >= 0)) throw RangeError("plasma_frequency: n_e must be >= 0");
  const auto& k = kConstants;
  return k.electron_charge / kTwoPi * std::sqrt(n_e / (k.vacuum_permittivity * k.electron_mass));
}

namespace detail {

inline double resonance_denominator(double lambda, double omega0) {
  if (!(lambda > 0)) throw RangeError("permittivity: wavelength must be > 0");
  const double c = kConstants.speed_of_light;
  const double d = lambda * lambda * omega0 * omega0 - 4.0 * kPi * kPi * c * c;
  if (std::abs(d) <= 1e-12 * 4.0 * kPi * kPi * c * c)
    throw NumericError("permittivity: carrier at the resonance frequency");
  return d;
}

}  // namespace detail

inline double permittivity(double lambda, double n_e, double omega0) {
  const auto& k = kConstants;
  const double d = detail::resonance_denominator(lambda, omega0);
  return 1.0 + lambda * lambda * n_e * k.electron_charge * k.electron_charge /
                   (k.vacuum_permittivity * k.electron_mass * d);
}

inline double density_fluctuation(double n_e, double alpha, double beta) {
  if (!(alpha > 0) || !(beta > 0)) throw RangeError("density_fluctuation: alpha and beta must be > 0");
  return n_e / (alpha * beta);
}

inline double delta_epsilon(double lambda, double dn_e, double omega0) {
  const auto& k = kConstants;
  const double d = detail::resonance_denominator(lambda, omega0);
  const double le = lambda * k.electron_charge;
  return le * le * dn_e / (k.vacuum_permittivity * k.electron_mass * d);
}

// (k/2) * integral of delta_eps over [0, length], left rectangular rule.
inline double phase_integral(const std::function<double(double)>& delta_eps, double length, double k,
                             int steps) {
  if (steps < 1) throw RangeError("phase_shift: steps must be >= 1");
  if (!(length >= 0)) throw RangeError("phase_shift: path length must be >= 0");
  const double dl = length / steps;
  std::vector<double> terms(static_cast<std::size_t>(steps));
  for (int i = 0; i < steps; ++i) terms[i] = delta_eps(i * dl);
  return 0.5 * k * dl * pairwise_sum(terms);
}

// Sun distance [m] at arclength l along the path.
inline double sun_distance(const PlasmaState& s, PathProfile profile, double l) {
  const double r_mid = s.r_over_rs * kConstants.sun_radius;
  if (profile == PathProfile::midpoint) return r_mid;
  const double off = l - s.path_length / 2;
  return std::sqrt(r_mid * r_mid + off * off);
}

inline double path_delta_epsilon(const PlasmaState& s, double lambda, PathProfile profile, double l) {
  const double r = sun_distance(s, profile, l) / kConstants.sun_radius;
  return delta_epsilon(lambda, density_fluctuation(electron_density(r), s.alpha, s.beta), s.omega0);
}

inline double phase_shift(const PlasmaState& s, double lambda, int steps = 1000,
                          PathProfile profile = PathProfile::midpoint) {
  if (!s.valid()) throw RangeError("phase_shift: plasma state outside the model ((r/r_s)^6 < 10 alpha beta or bad parameters)");
  return phase_integral([&](double l) { return path_delta_epsilon(s, lambda, profile, l); },
                        s.path_length, kTwoPi / lambda, steps);
}

// Arrival-angle tilt from a transverse phase gradient.
inline double aoa_fluctuation(double phase_gradient, double eps, double k) {
  if (!(eps > 0)) throw NumericError("aoa_fluctuation: eps <= 0, the plasma reflects the carrier");
  if (!(k > 0)) throw RangeError("aoa_fluctuation: k must be > 0");
  return phase_gradient / (k * std::sqrt(eps));
}

// (1/(kA)) * integral over the aperture of d(phi)/dx. Each cell contributes
// the exact x-integral of the derivative across its width, i.e. the phase
// difference between its two edges, at the cell's z (midpoint in z). A is
// the summed cell area, so a linear phase is recovered exactly.
inline double aoa_aperture_average(const ReflectarrayGeometry& g,
                                   const std::function<double(double, double)>& phase, double k) {
  if (g.total_cells() == 0) throw RangeError("aoa_aperture_average: empty aperture");
  const double s = g.cell_spacing;
  std::vector<double> terms(g.total_cells());
  for (std::size_t n = 0; n < g.total_cells(); ++n) {
    const double x = g.cell_positions[n][0], z = g.cell_positions[n][2];
    terms[n] = (phase(x + s / 2, z) - phase(x - s / 2, z)) * s;
  }
  return pairwise_sum(terms) / (k * g.cell_area());
}

// Aperture filter term of the variance integral,
//   I = 1/(4A^2) r_e^2 lambda^4 |int_A exp(j kappa.r) dA|^2,
// for the elliptical aperture: I = r_e^2 lambda^4 [J1(Q)/Q]^2 with
// Q = sqrt((kx a)^2 + (kz b)^2).
inline double aperture_filter_term(double a, double b, double kx, double kz, double lambda) {
  if (!(a > 0) || !(b > 0)) throw RangeError("aperture_filter_term: semi-axes must be > 0");
  const double re = kConstants.classical_electron_radius;
  const double Q = std::hypot(kx * a, kz * b);
  const double j = bessel_j1_over_x(Q);
  const double l2 = lambda * lambda;
  return re * re * l2 * l2 * j * j;
}

inline double aperture_filter_term(const ReflectarrayGeometry& g, double kx, double kz, double lambda) {
  return aperture_filter_term(g.semi_axis_a, g.semi_axis_b, kx, kz, lambda);
}

// Isotropic spectrum of electron-density fluctuations, zero outside
// [kappa_min, kappa_max].
struct TurbulenceSpectrum {
  std::function<double(double)> density;  // m^-3; its d^3 kappa integral is in m^-6
  double kappa_min = 0.0;
  double kappa_max = 0.0;

  double operator()(double kappa) const {
    if (kappa < kappa_min || kappa > kappa_max) return 0.0;
    return density(kappa);
  }
};

// Kolmogorov-type kappa^{-11/3} spectrum between the outer and inner scales,
// normalized so that its integral over d^3 kappa equals variance.
inline TurbulenceSpectrum kolmogorov_spectrum(double variance, double outer_scale, double inner_scale) {
  if (!(inner_scale > 0) || !(outer_scale > inner_scale))
    throw RangeError("kolmogorov_spectrum: need 0 < inner scale < outer scale");
  if (!(variance >= 0)) throw RangeError("kolmogorov_spectrum: variance must be >= 0");
  const double k0 = kTwoPi / outer_scale, km = kTwoPi / inner_scale;
  // int 4 pi k^2 C k^{-11/3} dk = 4 pi C * 3/2 (k0^{-2/3} - km^{-2/3})
  const double C = variance / (4.0 * kPi * 1.5 * (std::pow(k0, -2.0 / 3.0) - std::pow(km, -2.0 / 3.0)));
  return {[C](double k) { return C * std::pow(k, -11.0 / 3.0); }, k0, km};
}

// Aperture-averaged arrival-angle variance,
//   E[dtheta^2] = 2 pi L int int I(kx, kz) q^2 Psi_N(q) dkx dkz,  q = |(kx, kz)|,
// after collapsing the path-direction delta. The polar integral runs in
// log q (outer) and azimuth over one quadrant (inner, by symmetry).
inline double aoa_variance(double a, double b, const TurbulenceSpectrum& spec, double lambda,
                           double path_length) {
  if (!(spec.kappa_min > 0) || !std::isfinite(spec.kappa_max) || !(spec.kappa_max > spec.kappa_min))
    throw NumericError("aoa_variance: spectrum needs finite cutoffs 0 < kappa_min < kappa_max");
  if (!(path_length >= 0)) throw RangeError("aoa_variance: path length must be >= 0");
  auto angular = [&](double q) {
    if (std::abs(a - b) <= 1e-15 * a) return kTwoPi * aperture_filter_term(a, b, q, 0.0, lambda);
    return 4.0 * integrate(
                     [&](double t) {
                       return aperture_filter_term(a, b, q * std::cos(t), q * std::sin(t), lambda);
                     },
                     0.0, kPi / 2, 1e-10, 15);
  };
  // dkx dkz = q dq dt and dq = q d(log q)
  const double value = integrate(
      [&](double lq) {
        const double q = std::exp(lq);
        const double psi = spec(q);
        if (psi == 0.0) return 0.0;
        return angular(q) * q * q * psi * q * q;
      },
      std::log(spec.kappa_min), std::log(spec.kappa_max), 1e-10, 20);
  return std::max(0.0, kTwoPi * path_length * value);
}

inline double aoa_variance(const ReflectarrayGeometry& g, const TurbulenceSpectrum& spec, double lambda,
                           double path_length) {
  return aoa_variance(g.semi_axis_a, g.semi_axis_b, spec, lambda, path_length);
}

// Standard deviation of the arrival-angle proxy: sigma_ref at alpha*beta =
// 3e6 and 10 GHz, scaling with 1/(alpha beta) like the density fluctuation
// and with 1/f^2 like the plasma refraction.
inline double aoa_proxy_sigma(double sigma_ref, double alpha, double beta, double carrier_frequency) {
  if (!(alpha > 0) || !(beta > 0) || !(carrier_frequency > 0))
    throw RangeError("aoa_proxy_sigma: alpha, beta and f_c must be > 0");
  const double f = 10e9 / carrier_frequency;
  return sigma_ref * (3e6 / (alpha * beta)) * f * f;
}

// One arrival-angle realization from two parallel rays one aperture
// diameter apart. Every rectangular-rule panel gets its own Gaussian
// density fluctuation of standard deviation n_e/(alpha beta).
inline double sample_aoa_physical(const PlasmaState& s, double lambda, double diameter, int steps,
                                  PathProfile profile, Rng& rng) {
  if (!s.valid()) throw RangeError("sample_aoa_physical: plasma state outside the model");
  if (!(diameter > 0)) throw RangeError("sample_aoa_physical: diameter must be > 0");
  const double k = kTwoPi / lambda;
  const double dl = s.path_length / steps;
  std::vector<double> d1(static_cast<std::size_t>(steps)), d2(static_cast<std::size_t>(steps));
  double mean_eps = 0.0;
  for (int i = 0; i < steps; ++i) {
    const double l = i * dl;
    const double r = sun_distance(s, profile, l) / kConstants.sun_radius;
    const double n_e = electron_density(r);
    const double dn = density_fluctuation(n_e, s.alpha, s.beta);
    d1[i] = delta_epsilon(lambda, dn * rng.normal(), s.omega0);
    d2[i] = delta_epsilon(lambda, dn * rng.normal(), s.omega0);
    mean_eps += permittivity(lambda, n_e, s.omega0);
  }
  mean_eps /= steps;
  const double phi1 = 0.5 * k * dl * pairwise_sum(d1);
  const double phi2 = 0.5 * k * dl * pairwise_sum(d2);
  return aoa_fluctuation((phi1 - phi2) / diameter, mean_eps, k);
}

}  // namespace deepspace
