#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <random>

#include "deepspace/constants.hpp"

namespace deepspace {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Independent substreams drawn within one Monte Carlo sample. Keeping them
// apart means that e.g. changing the number of celestial bodies does not shift
// the angle-of-arrival draws of the same sample.
enum class Stream : std::uint64_t {
  distance = 1,
  alpha = 2,
  aoa = 3,
  scene = 4,
  hardware = 5,
  generic = 6,
};

// Seeded generator with platform-independent transforms. std::mt19937_64 has
// a fully specified output sequence; the distribution objects of the standard
// library do not, so uniform/normal are derived here.
class Rng {
 public:
  explicit Rng(std::uint64_t seed = 42) : engine_(seed) {}

  // Counter-based derivation: the stream for (seed, point, sample, purpose) is
  // a pure function of those four values.
  static Rng for_sample(std::uint64_t seed, std::uint64_t point, std::uint64_t sample,
                        Stream purpose) {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ (point + 0x1000193ULL));
    h = splitmix64(h ^ (sample * 0x100000001B3ULL + 7));
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return Rng(h);
  }

  std::uint64_t next() { return engine_(); }

  // Uniform on [0, 1).
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }

  // Standard normal via Box-Muller (one value per call, second discarded).
  double normal() {
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(kTwoPi * u2);
  }

  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  // Circularly-symmetric complex Gaussian CN(0, variance).
  std::complex<double> complex_normal(double variance) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace deepspace
