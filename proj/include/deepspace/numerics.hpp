#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "deepspace/constants.hpp"
#include "deepspace/errors.hpp"

namespace deepspace {

// Wraps an angle to (-pi, pi].
inline double wrap_phase(double phase) {
  double w = std::remainder(phase, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

// Pairwise (cascade) summation. Error grows as O(log n) ulps and the result
// depends only on the element order, not on any runtime state.
template <typename T>
T pairwise_sum(std::span<const T> values) {
  constexpr std::size_t kBlock = 8;
  if (values.size() <= kBlock) {
    T acc{};
    for (const T& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

template <typename T>
T pairwise_sum(const std::vector<T>& values) {
  return pairwise_sum(std::span<const T>(values));
}

// J1 from the standard library special functions.
inline double bessel_j1(double x) { return std::cyl_bessel_j(1.0, x); }

// J1(x)/x with the x -> 0 limit (1/2) handled by its Taylor series.
inline double bessel_j1_over_x(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 0.5 - x2 / 16.0 + x2 * x2 / 384.0;
  }
  return bessel_j1(x) / x;
}

// Adaptive Gauss-Kronrod quadrature on [a, b].
template <typename F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-10, unsigned max_depth = 30) {
  double err = 0.0;
  double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
      f, a, b, max_depth, rel_tol, &err);
  if (!std::isfinite(value)) throw NumericError("quadrature produced a non-finite value");
  return value;
}

inline double db10(double ratio) { return 10.0 * std::log10(ratio); }
inline double from_db10(double db) { return std::pow(10.0, db / 10.0); }

}  // namespace deepspace
