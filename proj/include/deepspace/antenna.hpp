#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <utility>
#include <vector>

#include "deepspace/config.hpp"
#include "deepspace/constants.hpp"
#include "deepspace/errors.hpp"
#include "deepspace/numerics.hpp"
#include "deepspace/parallel.hpp"

namespace deepspace {

using Vec3 = std::array<double, 3>;
using cplx = std::complex<double>;

// Aperture in the x-z plane, normal +y. Directions are
// u = (sin t cos p, cos t, sin t sin p), so theta is measured from the normal.
inline Vec3 direction(double theta, double phi) {
  return {std::sin(theta) * std::cos(phi), std::cos(theta), std::sin(theta) * std::sin(phi)};
}

struct ReflectarrayGeometry {
  std::vector<Vec3> cell_positions;               // (x, 0, z)
  std::vector<std::array<int, 2>> lattice;        // x = i * spacing, z = j * spacing
  double cell_spacing = 0.0;
  double semi_axis_a = 0.0;                       // along x
  double semi_axis_b = 0.0;                       // along z
  Vec3 feed_position{0.0, 1.0, 0.0};
  double feed_exponent = 0.0;
  double element_exponent = 0.0;
  double wavelength = 0.03;
  int target_cells = 0;

  std::size_t total_cells() const { return cell_positions.size(); }
  double wavenumber() const { return kTwoPi / wavelength; }
  // Sum of the cell footprints; used as the aperture area for averaging.
  double cell_area() const { return static_cast<double>(total_cells()) * cell_spacing * cell_spacing; }
};

// Grid-in-ellipse layout on a square lattice. The feed sits at distance
// focal_ratio * (2a) from the centre, tilted by feed_offset from broadside
// towards -x, and looks at the aperture centre.
inline ReflectarrayGeometry build_elliptical_aperture(double a, double b, double spacing,
                                                      double wavelength, double focal_ratio,
                                                      double feed_offset, double feed_exponent,
                                                      double element_exponent) {
  if (!(spacing > 0)) throw RangeError("build_aperture: cell spacing must be > 0");
  if (!(a > 0) || !(b > 0)) throw RangeError("build_aperture: semi-axes must be > 0");
  if (!(wavelength > 0)) throw RangeError("build_aperture: wavelength must be > 0");
  ReflectarrayGeometry g;
  g.cell_spacing = spacing;
  g.semi_axis_a = a;
  g.semi_axis_b = b;
  g.wavelength = wavelength;
  g.feed_exponent = feed_exponent;
  g.element_exponent = element_exponent;
  const int ni = static_cast<int>(std::ceil(a / spacing));
  const int nj = static_cast<int>(std::ceil(b / spacing));
  // j outer, i inner: rows of constant z, the order the field evaluator wants.
  for (int j = -nj; j <= nj; ++j) {
    for (int i = -ni; i <= ni; ++i) {
      const double x = i * spacing;
      const double z = j * spacing;
      if ((x / a) * (x / a) + (z / b) * (z / b) <= 1.0) {
        g.lattice.push_back({i, j});
        g.cell_positions.push_back({x, 0.0, z});
      }
    }
  }
  if (g.cell_positions.empty()) throw RangeError("build_aperture: no cell falls inside the ellipse");
  const double focal = focal_ratio * 2.0 * std::max(a, b);
  g.feed_position = {-focal * std::sin(feed_offset), focal * std::cos(feed_offset), 0.0};
  g.target_cells = static_cast<int>(g.cell_positions.size());
  return g;
}

inline ReflectarrayGeometry build_aperture(const ArrayDescriptor& d, double wavelength) {
  if (d.target_cells <= 0) throw RangeError("build_aperture: target cell count must be > 0");
  if (!(d.spacing_wavelengths > 0)) throw RangeError("build_aperture: cell spacing must be > 0");
  const double s = d.spacing_wavelengths * wavelength;
  // pi a b = N s^2 with b = ratio * a
  const double a = s * std::sqrt(d.target_cells / (kPi * d.axis_ratio));
  const double b = d.axis_ratio * a;
  auto g = build_elliptical_aperture(a, b, s, wavelength, d.focal_ratio, d.feed_offset,
                                     d.feed_exponent, d.element_exponent);
  g.target_cells = d.target_cells;
  return g;
}

inline ReflectarrayGeometry build_aperture(const ScenarioConfig& c) {
  return build_aperture(c.array, c.wavelength());
}

struct PhaseProfile {
  std::vector<double> phases;   // wrapped to (-pi, pi]
  double theta_s = 0.0;
  double phi_s = 0.0;
  double reference_phase = 0.0;
  int phase_bits = 0;
};

inline double feed_distance(const ReflectarrayGeometry& g, std::size_t n) {
  const auto& r = g.cell_positions[n];
  const auto& f = g.feed_position;
  return std::sqrt((r[0] - f[0]) * (r[0] - f[0]) + (r[1] - f[1]) * (r[1] - f[1]) +
                   (r[2] - f[2]) * (r[2] - f[2]));
}

inline PhaseProfile steering_phase_profile(const ReflectarrayGeometry& g, double theta_s,
                                           double phi_s, double k0, double reference_phase = 0.0) {
  if (std::abs(theta_s) > kPi / 2) throw RangeError("steering_phase_profile: |theta_s| must be <= pi/2");
  PhaseProfile p;
  p.theta_s = theta_s;
  p.phi_s = phi_s;
  p.reference_phase = reference_phase;
  p.phases.resize(g.total_cells());
  const double st = std::sin(theta_s);
  const double cp = std::cos(phi_s);
  const double sp = std::sin(phi_s);
  for (std::size_t n = 0; n < g.total_cells(); ++n) {
    const auto& r = g.cell_positions[n];
    const double R = feed_distance(g, n);
    p.phases[n] = wrap_phase(k0 * (R - st * (r[0] * cp + r[2] * sp)) + reference_phase);
  }
  return p;
}

// Uniform phase quantization to 2^bits levels; bits = 0 leaves the profile
// untouched.
inline PhaseProfile quantize(PhaseProfile p, int bits) {
  if (bits < 0 || bits > 16) throw RangeError("quantize: bits must lie in [0, 16]");
  if (bits == 0) return p;
  const double step = kTwoPi / static_cast<double>(1 << bits);
  for (double& v : p.phases) v = wrap_phase(std::round(v / step) * step);
  p.phase_bits = bits;
  return p;
}

// Feed excitation of every cell: cos^q_f(theta_f) / R * exp(-j k R).
inline std::vector<cplx> illumination(const ReflectarrayGeometry& g, double k) {
  const auto& f = g.feed_position;
  const double fn = std::sqrt(f[0] * f[0] + f[1] * f[1] + f[2] * f[2]);
  const Vec3 axis{-f[0] / fn, -f[1] / fn, -f[2] / fn};
  std::vector<cplx> out(g.total_cells());
  for (std::size_t n = 0; n < g.total_cells(); ++n) {
    const auto& r = g.cell_positions[n];
    const double vx = r[0] - f[0], vy = r[1] - f[1], vz = r[2] - f[2];
    const double R = std::sqrt(vx * vx + vy * vy + vz * vz);
    const double c = std::max(0.0, (vx * axis[0] + vy * axis[1] + vz * axis[2]) / R);
    const double amp = (g.feed_exponent == 0.0 ? 1.0 : std::pow(c, g.feed_exponent)) / R;
    out[n] = std::polar(amp, -k * R);
  }
  return out;
}

// Far field of a lattice aperture:
//   E(u) = g_e(theta) * sum_n a_n exp(j k (x_n u_x + z_n u_z))
// with g_e = max(cos theta, 0)^q_e (q_e = 0: isotropic, full sphere).
// Cells are sorted by lattice index on construction, so the summation order
// does not depend on the order the caller supplied them in.
class ApertureField {
 public:
  ApertureField(std::vector<std::array<int, 2>> lattice, std::vector<cplx> amplitudes,
                double spacing, double k, double element_exponent)
      : spacing_(spacing), k_(k), element_exponent_(element_exponent) {
    if (lattice.size() != amplitudes.size())
      throw RangeError("ApertureField: lattice and amplitude counts differ");
    if (lattice.empty()) throw RangeError("ApertureField: empty aperture");
    std::vector<std::size_t> order(lattice.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return lattice[a][1] != lattice[b][1] ? lattice[a][1] < lattice[b][1]
                                            : lattice[a][0] < lattice[b][0];
    });
    for (std::size_t n = 1; n < order.size(); ++n)
      if (lattice[order[n]] == lattice[order[n - 1]])
        throw RangeError("ApertureField: duplicate lattice site");
    lattice_.reserve(order.size());
    amps_.reserve(order.size());
    for (std::size_t n : order) {
      lattice_.push_back(lattice[n]);
      amps_.push_back(amplitudes[n]);
    }
    // Rows: runs of constant j. Gaps inside a row are filled with zeros so
    // the phasor recurrence can step uniformly.
    std::size_t n = 0;
    while (n < lattice_.size()) {
      std::size_t m = n;
      while (m < lattice_.size() && lattice_[m][1] == lattice_[n][1]) ++m;
      Row row;
      row.j = lattice_[n][1];
      row.i0 = lattice_[n][0];
      row.offset = re_.size();
      row.count = static_cast<std::size_t>(lattice_[m - 1][0] - row.i0 + 1);
      re_.resize(row.offset + row.count, 0.0);
      im_.resize(row.offset + row.count, 0.0);
      for (std::size_t t = n; t < m; ++t) {
        const std::size_t slot = row.offset + static_cast<std::size_t>(lattice_[t][0] - row.i0);
        re_[slot] = amps_[t].real();
        im_[slot] = amps_[t].imag();
      }
      rows_.push_back(row);
      n = m;
    }
  }

  ApertureField(const ReflectarrayGeometry& g, const PhaseProfile& profile)
      : ApertureField(g.lattice, excitation(g, profile), g.cell_spacing, g.wavenumber(),
                      g.element_exponent) {}

  double wavenumber() const { return k_; }
  double spacing() const { return spacing_; }
  double element_exponent() const { return element_exponent_; }
  const std::vector<std::array<int, 2>>& lattice() const { return lattice_; }
  const std::vector<cplx>& amplitudes() const { return amps_; }
  bool isotropic_element() const { return element_exponent_ == 0.0; }

  double element_factor(double cos_theta) const {
    if (element_exponent_ == 0.0) return 1.0;
    if (cos_theta <= 0.0) return 0.0;
    return element_exponent_ == 1.0 ? cos_theta : std::pow(cos_theta, element_exponent_);
  }

  cplx array_factor(double ux, double uz) const {
    cplx pos, neg;
    const double x[1] = {ux}, z[1] = {uz};
    eval_batch<1>(x, z, &pos, &neg);
    return pos;
  }

  // Field in direction (theta, phi), optionally with the array factor
  // shifted by (sx, sz) in direction-cosine space.
  cplx field(double theta, double phi, double sx = 0.0, double sz = 0.0) const {
    const Vec3 u = direction(theta, phi);
    return element_factor(u[1]) * array_factor(u[0] - sx, u[2] - sz);
  }

  // Fills the field for directions (ux[d], +uz[d]) and (ux[d], -uz[d]); the
  // two share their row sums. cos_theta supplies the element factor.
  void field_pairs(std::span<const double> ux, std::span<const double> uz,
                   std::span<const double> cos_theta, std::span<cplx> pos,
                   std::span<cplx> neg) const {
    constexpr std::size_t B = 8;
    std::size_t d = 0;
    for (; d + B <= ux.size(); d += B) eval_batch<B>(&ux[d], &uz[d], &pos[d], &neg[d]);
    for (; d < ux.size(); ++d) eval_batch<1>(&ux[d], &uz[d], &pos[d], &neg[d]);
    for (std::size_t n = 0; n < ux.size(); ++n) {
      const double g = element_factor(cos_theta[n]);
      pos[n] *= g;
      neg[n] *= g;
    }
  }

 private:
  struct Row {
    int j = 0;
    int i0 = 0;
    std::size_t offset = 0;
    std::size_t count = 0;
  };

  static std::vector<cplx> excitation(const ReflectarrayGeometry& g, const PhaseProfile& p) {
    if (p.phases.size() != g.total_cells())
      throw RangeError("radiation_pattern: profile has " + std::to_string(p.phases.size()) +
                       " cells, geometry has " + std::to_string(g.total_cells()));
    auto a = illumination(g, g.wavenumber());
    for (std::size_t n = 0; n < a.size(); ++n) a[n] *= std::polar(1.0, p.phases[n]);
    return a;
  }

  template <std::size_t B>
  void eval_batch(const double* ux, const double* uz, cplx* pos, cplx* neg) const {
    double kx[B], kz[B], step_re[B], step_im[B];
    double pos_re[B] = {}, pos_im[B] = {}, neg_re[B] = {}, neg_im[B] = {};
    double cpos_re[B] = {}, cpos_im[B] = {}, cneg_re[B] = {}, cneg_im[B] = {};
    for (std::size_t d = 0; d < B; ++d) {
      kx[d] = k_ * spacing_ * ux[d];
      kz[d] = k_ * spacing_ * uz[d];
      step_re[d] = std::cos(kx[d]);
      step_im[d] = std::sin(kx[d]);
    }
    for (const Row& row : rows_) {
      double ph_re[B], ph_im[B], acc_re[B] = {}, acc_im[B] = {};
      for (std::size_t d = 0; d < B; ++d) {
        ph_re[d] = std::cos(kx[d] * row.i0);
        ph_im[d] = std::sin(kx[d] * row.i0);
      }
      const double* are = re_.data() + row.offset;
      const double* aim = im_.data() + row.offset;
      for (std::size_t t = 0; t < row.count; ++t) {
        const double ar = are[t], ai = aim[t];
        for (std::size_t d = 0; d < B; ++d) {
          acc_re[d] += ar * ph_re[d] - ai * ph_im[d];
          acc_im[d] += ar * ph_im[d] + ai * ph_re[d];
          const double nr = ph_re[d] * step_re[d] - ph_im[d] * step_im[d];
          ph_im[d] = ph_re[d] * step_im[d] + ph_im[d] * step_re[d];
          ph_re[d] = nr;
        }
      }
      // Compensated accumulation of the row sums times exp(+-j kz j).
      for (std::size_t d = 0; d < B; ++d) {
        const double zc = std::cos(kz[d] * row.j), zs = std::sin(kz[d] * row.j);
        kahan_add(pos_re[d], cpos_re[d], acc_re[d] * zc - acc_im[d] * zs);
        kahan_add(pos_im[d], cpos_im[d], acc_re[d] * zs + acc_im[d] * zc);
        kahan_add(neg_re[d], cneg_re[d], acc_re[d] * zc + acc_im[d] * zs);
        kahan_add(neg_im[d], cneg_im[d], acc_im[d] * zc - acc_re[d] * zs);
      }
    }
    for (std::size_t d = 0; d < B; ++d) {
      pos[d] = {pos_re[d] + cpos_re[d], pos_im[d] + cpos_im[d]};
      neg[d] = {neg_re[d] + cneg_re[d], neg_im[d] + cneg_im[d]};
    }
  }

  // Neumaier summation; the compensation is folded in once at the end.
  static void kahan_add(double& sum, double& comp, double v) {
    const double t = sum + v;
    if (std::abs(sum) >= std::abs(v))
      comp += (sum - t) + v;
    else
      comp += (v - t) + sum;
    sum = t;
  }

  double spacing_;
  double k_;
  double element_exponent_;
  std::vector<std::array<int, 2>> lattice_;
  std::vector<cplx> amps_;
  std::vector<Row> rows_;
  std::vector<double> re_, im_;
};

// Integral of g_e^2 exp(j k rho . u) over the radiating sphere part, as a
// function of kr = k |rho|:
//   q_e = 0:  4 pi sin(x)/x                        (full sphere)
//   q_e > 0:  2 pi 2^v Gamma(v+1) J_{v+1}(x)/x^{v+1},  v = q_e - 1/2
class PowerKernel {
 public:
  explicit PowerKernel(double element_exponent) : q_(element_exponent) {
    if (q_ < 0) throw RangeError("PowerKernel: element exponent must be >= 0");
  }

  double operator()(double x) const {
    if (q_ == 0.0) return x < 1e-4 ? 4.0 * kPi * (1.0 - x * x / 6.0) : 4.0 * kPi * std::sin(x) / x;
    const double v = q_ - 0.5;
    const double c = kTwoPi * std::pow(2.0, v) * std::tgamma(v + 1.0);
    if (x < 1e-3) {
      // J_{v+1}(x)/x^{v+1} = 1/(2^{v+1} Gamma(v+2)) * (1 - x^2/(4(v+2)) + ...)
      const double lead = 1.0 / (std::pow(2.0, v + 1.0) * std::tgamma(v + 2.0));
      return c * lead * (1.0 - x * x / (4.0 * (v + 2.0)) + x * x * x * x / (32.0 * (v + 2.0) * (v + 3.0)));
    }
    if (q_ == 1.0) {
      // j1(x)/x, written out to avoid the half-integer Bessel call
      const double j1 = (std::sin(x) / x - std::cos(x)) / x;
      return kTwoPi * j1 / x;
    }
    return c * std::cyl_bessel_j(v + 1.0, x) / std::pow(x, v + 1.0);
  }

 private:
  double q_;
};

// Exact radiated power of an aperture field, for broadside and for any
// linear steering shift of its array factor:
//   P(s) = sum_D K(k|D|) Re[C(D) exp(-j k s.D)],  C(D) = sum_{r_i - r_l = D} a_i conj(a_l)
// The lag correlation C is computed once in O(N^2).
class RadiatedPower {
 public:
  explicit RadiatedPower(const ApertureField& f) : k_(f.wavenumber()), s_(f.spacing()) {
    const auto& lat = f.lattice();
    const auto& a = f.amplitudes();
    int imin = 0, imax = 0, jmin = 0, jmax = 0;
    for (const auto& c : lat) {
      imin = std::min(imin, c[0]);
      imax = std::max(imax, c[0]);
      jmin = std::min(jmin, c[1]);
      jmax = std::max(jmax, c[1]);
    }
    span_i_ = imax - imin;
    span_j_ = jmax - jmin;
    const std::size_t wi = 2 * static_cast<std::size_t>(span_i_) + 1;
    const std::size_t wj = 2 * static_cast<std::size_t>(span_j_) + 1;
    std::vector<double> cre(wi * wj, 0.0), cim(wi * wj, 0.0);
    for (std::size_t p = 0; p < lat.size(); ++p) {
      for (std::size_t q = 0; q < lat.size(); ++q) {
        const int di = lat[p][0] - lat[q][0];
        const int dj = lat[p][1] - lat[q][1];
        const std::size_t idx = static_cast<std::size_t>(dj + span_j_) * wi + static_cast<std::size_t>(di + span_i_);
        const cplx v = a[p] * std::conj(a[q]);
        cre[idx] += v.real();
        cim[idx] += v.imag();
      }
    }
    const PowerKernel kernel(f.element_exponent());
    std::map<long, double> kcache;
    for (int dj = -span_j_; dj <= span_j_; ++dj) {
      for (int di = -span_i_; di <= span_i_; ++di) {
        const std::size_t idx = static_cast<std::size_t>(dj + span_j_) * wi + static_cast<std::size_t>(di + span_i_);
        if (cre[idx] == 0.0 && cim[idx] == 0.0) continue;
        const long r2 = static_cast<long>(di) * di + static_cast<long>(dj) * dj;
        auto it = kcache.find(r2);
        if (it == kcache.end())
          it = kcache.emplace(r2, kernel(k_ * s_ * std::sqrt(static_cast<double>(r2)))).first;
        lags_.push_back({di, dj, it->second, cre[idx], cim[idx]});
      }
    }
  }

  double broadside() const { return steered(0.0, 0.0); }

  // Power with the array factor shifted by (sx, sz) in direction cosines.
  double steered(double sx, double sz) const {
    std::vector<double> terms(lags_.size());
    for (std::size_t n = 0; n < lags_.size(); ++n) {
      const Lag& l = lags_[n];
      const double arg = -k_ * s_ * (sx * l.di + sz * l.dj);
      terms[n] = l.kernel * (l.re * std::cos(arg) - l.im * std::sin(arg));
    }
    const double p = pairwise_sum(terms);
    if (!(p > 0)) throw NumericError("radiated power is zero");
    return p;
  }

  double steered_angle(double theta_s, double phi_s) const {
    return steered(std::sin(theta_s) * std::cos(phi_s), std::sin(theta_s) * std::sin(phi_s));
  }

 private:
  struct Lag {
    int di, dj;
    double kernel, re, im;
  };
  double k_, s_;
  int span_i_ = 0, span_j_ = 0;
  std::vector<Lag> lags_;
};

// Direct O(N^2) radiated power for arbitrary excitations (e.g. quantized
// profiles where the steering is not a pure shift).
inline double radiated_power_direct(const ApertureField& f) { return RadiatedPower(f).broadside(); }

enum class Numerator { squared, paper_literal };

struct GridSpec {
  int n_theta = 360;   // divisions of [0, pi]
  int n_phi = 720;     // divisions of [0, 2 pi)
};

// Complex far field sampled on theta_i = i pi / n_theta (i = 0..n_theta) and
// phi_j = 2 pi j / n_phi. For the theta integrals, each azimuth node and its
// opposite (phi + pi) form one great circle with 2 n_theta equispaced nodes.
// The trigonometric interpolant on that circle is integrated against
// |sin t| in closed form, which is exact for band-limited patterns even
// though the beam sits on the pole. Partial azimuth sectors use the linear
// interpolant in phi. Region and total powers share one code path, so a
// region covering the whole sphere has efficiency exactly 1.
class RadiationPattern {
 public:
  RadiationPattern(int n_theta, int n_phi, std::vector<cplx> field,
                   std::shared_ptr<const ApertureField> source = nullptr)
      : n_theta_(n_theta), n_phi_(n_phi), field_(std::move(field)), source_(std::move(source)) {
    if (n_theta < 2 || n_phi < 4 || n_phi % 2 != 0)
      throw RangeError("RadiationPattern: grid needs n_theta >= 2 and even n_phi >= 4");
    if (field_.size() != static_cast<std::size_t>(n_theta + 1) * n_phi)
      throw RangeError("RadiationPattern: field size does not match the grid");
    power_.resize(field_.size());
    for (std::size_t n = 0; n < field_.size(); ++n) power_[n] = std::norm(field_[n]);
    cos_table_.resize(2 * static_cast<std::size_t>(n_theta_));
    sin_table_.resize(cos_table_.size());
    for (std::size_t m = 0; m < cos_table_.size(); ++m) {
      cos_table_[m] = std::cos(kPi * static_cast<double>(m) / n_theta_);
      sin_table_[m] = std::sin(kPi * static_cast<double>(m) / n_theta_);
    }
    total_ = region_power(0.0, kPi, 0.0, kTwoPi, BeWeighting::solid_angle);
    total_literal_ = region_power(0.0, kPi, 0.0, kTwoPi, BeWeighting::paper_literal);
  }

  int n_theta() const { return n_theta_; }
  int n_phi() const { return n_phi_; }
  double theta(int i) const { return kPi * i / n_theta_; }
  double phi(int j) const { return kTwoPi * j / n_phi_; }
  double theta_step() const { return kPi / n_theta_; }
  double phi_step() const { return kTwoPi / n_phi_; }
  cplx field(int i, int j) const { return field_[index(i, j)]; }
  double power(int i, int j) const { return power_[index(i, j)]; }
  const std::shared_ptr<const ApertureField>& source() const { return source_; }

  // Integral of |E|^2 over the sphere.
  double total_power(BeWeighting w = BeWeighting::solid_angle) const {
    return w == BeWeighting::solid_angle ? total_ : total_literal_;
  }

  double directivity_at(int i, int j, Numerator num = Numerator::squared) const {
    if (!(total_ > 0)) throw NumericError("directivity: zero total radiated power");
    const double v = num == Numerator::squared ? power(i, j) : std::abs(field(i, j));
    return 4.0 * kPi * v / total_;
  }

  std::pair<int, int> peak() const {
    std::size_t best = 0;
    for (std::size_t n = 1; n < power_.size(); ++n)
      if (power_[n] > power_[best]) best = n;
    return {static_cast<int>(best / n_phi_), static_cast<int>(best % n_phi_)};
  }

  std::pair<int, int> nearest_node(double theta, double phi) const {
    theta = std::clamp(theta, 0.0, kPi);
    const int i = static_cast<int>(std::lround(theta / theta_step()));
    double p = std::fmod(phi, kTwoPi);
    if (p < 0) p += kTwoPi;
    const int j = static_cast<int>(std::lround(p / phi_step())) % n_phi_;
    return {i, j};
  }

  // Power inside theta in [theta_lo, theta_hi] and the azimuth sector
  // [phi_start, phi_start + phi_width) (width >= 2 pi means all azimuths).
  double region_power(double theta_lo, double theta_hi, double phi_start, double phi_width,
                      BeWeighting w = BeWeighting::solid_angle) const {
    return integrate(power_, theta_lo, theta_hi, phi_start, phi_width, w);
  }

  // Same quadrature applied to any nodal values laid out like the grid.
  double integrate(std::span<const double> values, double theta_lo = 0.0, double theta_hi = kPi,
                   double phi_start = 0.0, double phi_width = kTwoPi,
                   BeWeighting w = BeWeighting::solid_angle) const {
    if (values.size() != power_.size()) throw RangeError("integrate: value count does not match the grid");
    theta_lo = std::clamp(theta_lo, 0.0, kPi);
    theta_hi = std::clamp(theta_hi, 0.0, kPi);
    if (theta_hi <= theta_lo || phi_width <= 0) return 0.0;
    std::vector<double> plus, minus;
    theta_weights(theta_lo, theta_hi, w, plus, minus);
    const int half = n_phi_ / 2;
    std::vector<double> cols;
    cols.reserve(n_phi_);
    for (int j = 0; j < n_phi_; ++j) {
      const double wp = phi_weight(j, phi_start, phi_width);
      if (wp == 0.0) continue;
      const int jo = (j + half) % n_phi_;
      double acc = 0.0;
      for (int i = 0; i <= n_theta_; ++i) acc += plus[i] * values[index(i, j)];
      for (int i = 1; i < n_theta_; ++i) acc += minus[i] * values[index(i, jo)];
      cols.push_back(wp * acc);
    }
    return pairwise_sum(cols);
  }

 private:
  std::size_t index(int i, int j) const {
    return static_cast<std::size_t>(i) * n_phi_ + static_cast<std::size_t>(j);
  }

  // Weights of the circle nodes t = +theta_i (plus) and t = -theta_i (minus)
  // for the integral over t in [lo, hi] of G(t) sin t (or G(t)).
  void theta_weights(double lo, double hi, BeWeighting w, std::vector<double>& plus,
                     std::vector<double>& minus) const {
    const int N = n_theta_;
    std::vector<double> A(N + 1), B(N + 1);
    for (int p = 0; p <= N; ++p) {
      if (w == BeWeighting::paper_literal) {
        if (p == 0) {
          A[p] = hi - lo;
          B[p] = 0.0;
        } else {
          A[p] = (std::sin(p * hi) - std::sin(p * lo)) / p;
          B[p] = (std::cos(p * lo) - std::cos(p * hi)) / p;
        }
        continue;
      }
      // A_p = int sin t cos pt, B_p = int sin t sin pt
      if (p == 1) {
        A[p] = 0.25 * (std::cos(2 * lo) - std::cos(2 * hi));
        B[p] = 0.5 * ((hi - lo) - 0.5 * (std::sin(2 * hi) - std::sin(2 * lo)));
      } else {
        const double u = 1.0 + p, v = 1.0 - p;
        A[p] = 0.5 * ((std::cos(u * lo) - std::cos(u * hi)) / u +
                      (std::cos(v * lo) - std::cos(v * hi)) / v);
        B[p] = 0.5 * ((std::sin(v * hi) - std::sin(v * lo)) / v -
                      (std::sin(u * hi) - std::sin(u * lo)) / u);
      }
    }
    plus.assign(N + 1, 0.0);
    minus.assign(N + 1, 0.0);
    const std::size_t period = 2 * static_cast<std::size_t>(N);
    for (int i = 0; i <= N; ++i) {
      double c = 0.0, s = 0.0;
      for (int p = 1; p < N; ++p) {
        const std::size_t m = (static_cast<std::size_t>(p) * i) % period;
        c += cos_table_[m] * A[p];
        s += sin_table_[m] * B[p];
      }
      const double nyq = cos_table_[(static_cast<std::size_t>(N) * i) % period] * A[N];
      plus[i] = (A[0] + 2.0 * (c + s) + nyq) / (2.0 * N);
      minus[i] = (A[0] + 2.0 * (c - s) + nyq) / (2.0 * N);
    }
  }

  // Integral of the periodic hat function at node j over the sector.
  double phi_weight(int j, double start, double width) const {
    const double h = phi_step();
    if (width >= kTwoPi) return h;
    double start0 = std::fmod(start, kTwoPi);
    if (start0 < 0) start0 += kTwoPi;
    const double pj = phi(j);
    double total = 0.0;
    for (int shift = -1; shift <= 1; ++shift) {
      const double lo = start0 + shift * kTwoPi;
      const double hi = lo + width;
      double a = std::max(lo, pj - h), b = std::min(hi, pj);
      if (b > a) total += ((b - a) * ((a + b) / 2 - (pj - h))) / h;
      a = std::max(lo, pj);
      b = std::min(hi, pj + h);
      if (b > a) total += ((b - a) * ((pj + h) - (a + b) / 2)) / h;
    }
    return total;
  }

  int n_theta_, n_phi_;
  std::vector<cplx> field_;
  std::vector<double> power_;
  std::shared_ptr<const ApertureField> source_;
  std::vector<double> cos_table_, sin_table_;
  double total_ = 0.0;
  double total_literal_ = 0.0;
};

// Samples the field on the grid. Rows are independent and each is computed
// in a fixed order, so the result does not depend on the worker count.
inline RadiationPattern radiation_pattern(std::shared_ptr<const ApertureField> src, GridSpec grid,
                                          unsigned threads = 1) {
  if (!src) throw RangeError("radiation_pattern: no aperture field");
  if (grid.n_theta < 2 || grid.n_phi < 4 || grid.n_phi % 2 != 0)
    throw RangeError("radiation_pattern: grid needs n_theta >= 2 and even n_phi >= 4");
  const int nt = grid.n_theta, np = grid.n_phi;
  std::vector<cplx> field(static_cast<std::size_t>(nt + 1) * np, cplx{});
  const int half = np / 2;
  parallel_for(static_cast<std::size_t>(nt + 1), resolve_threads(threads), [&](std::size_t i) {
    const double th = kPi * static_cast<double>(i) / nt;
    const double ct = std::cos(th), st = std::sin(th);
    if (!src->isotropic_element() && ct <= 0.0) return;
    // phi_j and phi_{np-j} share u_x; evaluate j = 0..np/2 in pairs.
    const std::size_t m = static_cast<std::size_t>(half) + 1;
    std::vector<double> ux(m), uz(m), c(m, ct);
    std::vector<cplx> pos(m), neg(m);
    for (std::size_t j = 0; j < m; ++j) {
      const double p = kTwoPi * static_cast<double>(j) / np;
      ux[j] = st * std::cos(p);
      uz[j] = st * std::sin(p);
    }
    src->field_pairs(ux, uz, c, pos, neg);
    cplx* row = &field[i * np];
    for (std::size_t j = 0; j < m; ++j) row[j] = pos[j];
    for (std::size_t j = 1; j < static_cast<std::size_t>(half); ++j) row[np - j] = neg[j];
  });
  return RadiationPattern(nt, np, std::move(field), std::move(src));
}

inline RadiationPattern radiation_pattern(const ReflectarrayGeometry& g, const PhaseProfile& profile,
                                          GridSpec grid = {}, unsigned threads = 1) {
  return radiation_pattern(std::make_shared<const ApertureField>(g, profile), grid, threads);
}

// Directivity at the grid node nearest to (theta0, phi0).
inline double directivity(const RadiationPattern& p, double theta0, double phi0,
                          Numerator num = Numerator::squared) {
  const auto [i, j] = p.nearest_node(theta0, phi0);
  return p.directivity_at(i, j, num);
}

inline double peak_directivity(const RadiationPattern& p) {
  const auto [i, j] = p.peak();
  return p.directivity_at(i, j);
}

// Full width of the main lobe at `level_db` below the peak, along the cut
// through the peak (phi_p on one side, phi_p + pi on the other). With a field
// source the cut is evaluated exactly; otherwise |E|^2 is interpolated
// linearly between the grid nodes of the cut.
inline double beamwidth(const RadiationPattern& p, double level_db) {
  if (!(level_db > 0)) throw RangeError("beamwidth: level must be > 0 dB");
  const auto [ip, jp] = p.peak();
  const double phi_p = p.phi(jp);
  const int jq = (jp + p.n_phi() / 2) % p.n_phi();
  const auto& src = p.source();
  const double h = p.theta_step();

  // Signed cut: t >= 0 -> (t, phi_p), t < 0 -> (-t, phi_p + pi).
  auto cut = [&](double t) -> double {
    if (src) return std::norm(t >= 0 ? src->field(t, phi_p) : src->field(-t, phi_p + kPi));
    const double a = std::abs(t) / h;
    const int i0 = std::min(static_cast<int>(a), p.n_theta() - 1);
    const double f = std::min(a - i0, 1.0);
    const int j = t >= 0 ? jp : jq;
    // nodes at theta = 0 are shared by both half-cuts
    return (1 - f) * p.power(i0, j) + f * p.power(i0 + 1, j);
  };

  double t_peak = p.theta(ip);
  double peak = cut(t_peak);
  if (src) {
    // golden-section refinement of the peak along the cut
    double lo = t_peak - h, hi = t_peak + h;
    const double g = (std::sqrt(5.0) - 1) / 2;
    double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
    double f1 = cut(x1), f2 = cut(x2);
    for (int it = 0; it < 80; ++it) {
      if (f1 < f2) {
        lo = x1; x1 = x2; f1 = f2; x2 = lo + g * (hi - lo); f2 = cut(x2);
      } else {
        hi = x2; x2 = x1; f2 = f1; x1 = hi - g * (hi - lo); f1 = cut(x1);
      }
    }
    const double tm = (lo + hi) / 2, fm = cut(tm);
    if (fm > peak) {
      peak = fm;
      t_peak = tm;
    }
  }
  if (!(peak > 0)) throw NumericError("beamwidth: zero peak");
  const double level = peak * from_db10(-level_db);
  const double step = h / 4;

  auto edge = [&](double dir) {
    double inside = t_peak;
    for (;;) {
      const double next = inside + dir * step;
      if (std::abs(next) > kPi) throw NumericError("beamwidth: level never crossed");
      if (cut(next) < level) {
        double a = inside, b = next;
        for (int it = 0; it < 60; ++it) {
          const double m = (a + b) / 2;
          (cut(m) >= level ? a : b) = m;
        }
        return (a + b) / 2;
      }
      inside = next;
    }
  };
  return edge(+1.0) - edge(-1.0);
}

// Fraction of the radiated power inside the cone theta <= theta_i.
inline double beam_efficiency(const RadiationPattern& p, double theta_i,
                              BeWeighting w = BeWeighting::solid_angle) {
  if (!(theta_i > 0 && theta_i <= kPi)) throw RangeError("beam_efficiency: theta_i must lie in (0, pi]");
  const double total = p.total_power(w);
  if (!(total > 0)) throw NumericError("beam_efficiency: zero total radiated power");
  return p.region_power(0.0, theta_i, 0.0, kTwoPi, w) / total;
}

}  // namespace deepspace
