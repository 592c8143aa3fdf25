#pragma once

#include <cmath>
#include <complex>
#include <memory>

#include "deepspace/antenna.hpp"
#include "deepspace/config.hpp"
#include "deepspace/constants.hpp"
#include "deepspace/errors.hpp"
#include "deepspace/numerics.hpp"
#include "deepspace/rng.hpp"

namespace deepspace {

// Free-space path gain (lambda / (4 pi d))^2.
inline double path_gain(double lambda, double d) {
  if (!(d > 0)) throw RangeError("path_gain: distance must be > 0");
  if (!(lambda > 0)) throw RangeError("path_gain: wavelength must be > 0");
  const double r = lambda / (4.0 * kPi * d);
  return r * r;
}

// Noise spectral density k_B T [W/Hz].
inline double noise_density(double t_sys) { return kConstants.boltzmann * t_sys; }

// SE = log2(1 + P G_T G_R |h|^2 / (k_B T_sys + (k1^2 + k2^2) P)).
// The distortion_scaled variant multiplies the distortion term by |h|^2.
inline double spectral_efficiency(double P, double g_t, double g_r, cplx h, double t_sys,
                                  double kappa1, double kappa2,
                                  SeVariant variant = SeVariant::printed) {
  if (!(P >= 0)) throw RangeError("spectral_efficiency: P must be >= 0");
  if (!(t_sys > 0)) throw RangeError("spectral_efficiency: T_sys must be > 0");
  if (kappa1 < 0 || kappa2 < 0) throw RangeError("spectral_efficiency: kappa must be >= 0");
  const double h2 = std::norm(h);
  double distortion = (kappa1 * kappa1 + kappa2 * kappa2) * P;
  if (variant == SeVariant::distortion_scaled) distortion *= h2;
  const double snr = P * g_t * g_r * h2 / (noise_density(t_sys) + distortion);
  return std::log2(1.0 + snr);
}

// Applied steering limited to (-theta0, theta0].
inline double clamp_steering(double delta_theta, double theta0) {
  if (!(theta0 > 0)) throw RangeError("clamp_steering: theta0 must be > 0");
  if (delta_theta > theta0) return theta0;
  if (delta_theta <= -theta0) return std::nextafter(-theta0, 0.0);
  return delta_theta;
}

struct Pointing {
  double applied = 0.0;   // steering angle theta_s
  double residual = 0.0;  // delta_theta - theta_s
};

inline Pointing resolve_pointing(double delta_theta, SteeringPolicy policy, double theta0) {
  switch (policy) {
    case SteeringPolicy::none:
      return {0.0, delta_theta};
    case SteeringPolicy::unbounded_ideal:
      return {delta_theta, 0.0};
    case SteeringPolicy::clamped_ideal:
    case SteeringPolicy::physical: {
      const double s = clamp_steering(delta_theta, theta0);
      return {s, delta_theta - s};
    }
  }
  return {0.0, delta_theta};
}

struct ReceivedSample {
  cplx y;
  cplx distortion;  // h eta_t + eta_r
};

// y = h (sqrt(P) s + eta_t) + eta_r + w with eta_t ~ CN(0, P k1^2),
// eta_r ~ CN(0, k2^2 P |h|^2), w ~ CN(0, N0).
inline ReceivedSample simulate_received_sample(cplx s, cplx h, double P, double kappa1, double kappa2,
                                               double n0, Rng& rng) {
  if (kappa1 < 0 || kappa2 < 0) throw RangeError("simulate_received_sample: kappa must be >= 0");
  if (P < 0 || n0 < 0) throw RangeError("simulate_received_sample: P and N0 must be >= 0");
  const cplx eta_t = kappa1 > 0 ? rng.complex_normal(P * kappa1 * kappa1) : cplx{};
  const cplx eta_r = kappa2 > 0 ? rng.complex_normal(kappa2 * kappa2 * P * std::norm(h)) : cplx{};
  const cplx w = n0 > 0 ? rng.complex_normal(n0) : cplx{};
  return {h * (std::sqrt(P) * s + eta_t) + eta_r + w, h * eta_t + eta_r};
}

// Reflectarray used at either end of the link. Gains include the antenna
// efficiency. Pointing errors are applied in the phi = 0 / phi = pi cut.
class LinkAntenna {
 public:
  LinkAntenna(ReflectarrayGeometry g, double efficiency, int phase_bits = 0)
      : geometry_(std::move(g)), efficiency_(efficiency), phase_bits_(phase_bits) {
    if (!(efficiency > 0 && efficiency <= 1)) throw RangeError("LinkAntenna: efficiency must lie in (0, 1]");
    auto broadside = quantize(steering_phase_profile(geometry_, 0.0, 0.0, geometry_.wavenumber()), phase_bits);
    field_ = std::make_shared<const ApertureField>(geometry_, broadside);
    power_ = std::make_shared<const RadiatedPower>(*field_);
    broadside_power_ = power_->broadside();
    peak_directivity_ = 4.0 * kPi * std::norm(field_->field(0.0, 0.0)) / broadside_power_;
  }

  const ReflectarrayGeometry& geometry() const { return geometry_; }
  const std::shared_ptr<const ApertureField>& field() const { return field_; }
  double efficiency() const { return efficiency_; }
  double peak_directivity() const { return peak_directivity_; }
  double peak_gain() const { return efficiency_ * peak_directivity_; }

  // Directivity of the broadside beam at signed angle t in the phi = 0 cut.
  double directivity_at(double t) const {
    t = wrap_phase(t);
    const double th = std::abs(t);
    const double ph = t >= 0 ? 0.0 : kPi;
    return 4.0 * kPi * std::norm(field_->field(th, ph)) / broadside_power_;
  }

  double gain_at(double t) const { return efficiency_ * directivity_at(t); }

  // Gain towards the arrival direction delta_theta when the beam is steered
  // to theta_s with the phase profile of the aperture (scan loss included).
  double steered_gain(double delta_theta, double theta_s) const {
    if (std::abs(theta_s) > kPi / 2) throw RangeError("steered_gain: |theta_s| must be <= pi/2");
    const double t = wrap_phase(delta_theta);
    const double th = std::abs(t);
    const double ph = t >= 0 ? 0.0 : kPi;
    if (phase_bits_ == 0) {
      const double sx = std::sin(theta_s);
      const double p = power_->steered(sx, 0.0);
      return efficiency_ * 4.0 * kPi * std::norm(field_->field(th, ph, sx, 0.0)) / p;
    }
    auto profile = quantize(steering_phase_profile(geometry_, theta_s, 0.0, geometry_.wavenumber()), phase_bits_);
    const ApertureField f(geometry_, profile);
    return efficiency_ * 4.0 * kPi * std::norm(f.field(th, ph)) / radiated_power_direct(f);
  }

 private:
  ReflectarrayGeometry geometry_;
  double efficiency_;
  int phase_bits_;
  std::shared_ptr<const ApertureField> field_;
  std::shared_ptr<const RadiatedPower> power_;
  double broadside_power_ = 0.0;
  double peak_directivity_ = 0.0;
};

// Receive gain for one arrival angle under a steering policy.
inline double receive_gain(const LinkAntenna& rx, double delta_theta, SteeringPolicy policy,
                           double theta0) {
  const Pointing pt = resolve_pointing(delta_theta, policy, theta0);
  if (policy == SteeringPolicy::physical) return rx.steered_gain(delta_theta, pt.applied);
  return rx.gain_at(pt.residual);
}

}  // namespace deepspace
