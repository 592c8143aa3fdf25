#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "deepspace/antenna.hpp"
#include "deepspace/constants.hpp"
#include "deepspace/errors.hpp"
#include "deepspace/rng.hpp"

namespace deepspace {

// One hidden body seen by the receive beam: an azimuth sector of the sky
// around the boresight, [center - width/2, center + width/2), reaching from
// the boresight out to `elevation_extent`.
struct NoiseRegion {
  double center = 0.0;            // rad
  double width = 0.0;             // rad
  double elevation_extent = 0.0;  // rad
  double brightness = 0.0;        // K

  double start() const { return center - width / 2; }
};

struct CelestialScene {
  std::vector<NoiseRegion> regions;
  double cmb_temperature = kCmbTemperature;
};

inline double angular_gap(double a, double b) {
  const double d = std::abs(std::remainder(a - b, kTwoPi));
  return d;
}

inline bool sectors_overlap(const NoiseRegion& a, const NoiseRegion& b) {
  return angular_gap(a.center, b.center) < (a.width + b.width) / 2;
}

inline void validate_scene(const CelestialScene& s) {
  if (!(s.cmb_temperature >= 0)) throw RangeError("scene: CMB temperature must be >= 0");
  double covered = 0.0;
  for (std::size_t n = 0; n < s.regions.size(); ++n) {
    const auto& r = s.regions[n];
    if (!(r.width > 0)) throw RangeError("scene: region widths must be > 0");
    if (!(r.brightness >= 0)) throw RangeError("scene: brightness temperatures must be >= 0");
    if (!(r.elevation_extent > 0)) throw RangeError("scene: elevation extent must be > 0");
    covered += r.width;
    for (std::size_t m = 0; m < n; ++m)
      if (sectors_overlap(r, s.regions[m])) throw RangeError("scene: regions overlap");
  }
  if (covered > kTwoPi * (1 + 1e-12)) throw RangeError("scene: regions cover more than 2 pi");
}

struct PlacementOptions {
  double width_min = deg2rad(15.0);
  double width_max = deg2rad(30.0);
  double brightness_min = 3.0;
  double brightness_max = 300.0;
  // false: a region reaches out to its own width in elevation;
  // true: every region spans the field of view in elevation.
  bool extent_is_fov = false;
  double cmb_temperature = kCmbTemperature;
  int max_attempts = 1000;
};

// Draws n non-overlapping sectors with uniform widths, uniform centres and
// log-uniform brightness. Each body is re-drawn until it fits, at most
// max_attempts times.
inline CelestialScene place_bodies(int n, double theta_fov, Rng& rng, const PlacementOptions& o = {}) {
  if (n < 0) throw RangeError("place_bodies: N must be >= 0");
  if (!(theta_fov > 0)) throw RangeError("place_bodies: field of view must be > 0");
  if (!(o.width_min > 0) || o.width_max < o.width_min)
    throw RangeError("place_bodies: need 0 < width_min <= width_max");
  if (!(o.brightness_min > 0) || o.brightness_max < o.brightness_min)
    throw RangeError("place_bodies: need 0 < brightness_min <= brightness_max");
  CelestialScene scene;
  scene.cmb_temperature = o.cmb_temperature;
  for (int b = 0; b < n; ++b) {
    bool placed = false;
    for (int attempt = 0; attempt < o.max_attempts && !placed; ++attempt) {
      NoiseRegion r;
      r.width = rng.uniform(o.width_min, o.width_max);
      r.center = rng.uniform(0.0, kTwoPi);
      r.elevation_extent = o.extent_is_fov ? theta_fov : r.width;
      placed = std::none_of(scene.regions.begin(), scene.regions.end(),
                            [&](const NoiseRegion& q) { return sectors_overlap(r, q); });
      if (placed) {
        r.brightness = rng.log_uniform(o.brightness_min, o.brightness_max);
        scene.regions.push_back(r);
      }
    }
    if (!placed)
      throw RangeError("place_bodies: field of view exhausted after placing " + std::to_string(b) +
                       " of " + std::to_string(n) + " bodies");
  }
  return scene;
}

inline PlacementOptions placement_options(const NoiseConfig& c) {
  PlacementOptions o;
  o.width_min = c.body_width_min;
  o.width_max = c.body_width_max;
  o.brightness_min = c.brightness_min;
  o.brightness_max = c.brightness_max;
  o.cmb_temperature = c.cmb_temperature;
  return o;
}

// Fraction of the pattern's power inside the region.
inline double region_beam_efficiency(const RadiationPattern& p, const NoiseRegion& r,
                                     BeWeighting w = BeWeighting::solid_angle) {
  const double total = p.total_power(w);
  if (!(total > 0)) throw NumericError("beam efficiency: zero total radiated power");
  return p.region_power(0.0, r.elevation_extent, r.start(), r.width, w) / total;
}

inline double system_temperature(const CelestialScene& scene, const RadiationPattern& p,
                                  BeWeighting w = BeWeighting::solid_angle) {
  double t = scene.cmb_temperature;
  for (const auto& r : scene.regions) t += region_beam_efficiency(p, r, w) * r.brightness;
  return t;
}

// Brightness-weighted average over the pattern, with the gain floored at
// -60 dB below the peak so that nulls do not hide any part of the sky.
inline double effective_temperature(const std::function<double(double, double)>& brightness,
                                    const RadiationPattern& p) {
  const auto [ip, jp] = p.peak();
  const double peak = p.power(ip, jp);
  if (!(peak > 0)) throw NumericError("effective_temperature: zero-gain pattern");
  const double floor = peak * 1e-6;
  std::vector<double> gain(static_cast<std::size_t>(p.n_theta() + 1) * p.n_phi());
  std::vector<double> weighted(gain.size());
  for (int i = 0; i <= p.n_theta(); ++i)
    for (int j = 0; j < p.n_phi(); ++j) {
      const std::size_t n = static_cast<std::size_t>(i) * p.n_phi() + j;
      gain[n] = std::max(p.power(i, j), floor);
      weighted[n] = gain[n] * brightness(p.theta(i), p.phi(j));
    }
  return p.integrate(weighted) / p.integrate(gain);
}

// Scene CSV: region_index,center_deg,width_deg,brightness_K
inline std::string scene_csv(const CelestialScene& s) {
  std::ostringstream os;
  os << "region_index,center_deg,width_deg,brightness_K\n";
  char buf[64];
  auto put = [&](double v) {
    auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, 9);
    os.write(buf, res.ptr - buf);
  };
  for (std::size_t n = 0; n < s.regions.size(); ++n) {
    os << n << ',';
    put(rad2deg(s.regions[n].center));
    os << ',';
    put(rad2deg(s.regions[n].width));
    os << ',';
    put(s.regions[n].brightness);
    os << '\n';
  }
  return os.str();
}

inline CelestialScene parse_scene_csv(const std::string& text, double cmb = kCmbTemperature) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "region_index,center_deg,width_deg,brightness_K")
    throw ParseError("scene CSV: missing or wrong header");
  CelestialScene s;
  s.cmb_temperature = cmb;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<double> v;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) {
      double x = 0;
      auto res = std::from_chars(cell.data(), cell.data() + cell.size(), x);
      if (res.ec != std::errc() || res.ptr != cell.data() + cell.size())
        throw ParseError("scene CSV line " + std::to_string(lineno) + ": bad number '" + cell + "'");
      v.push_back(x);
    }
    if (v.size() != 4) throw ParseError("scene CSV line " + std::to_string(lineno) + ": expected 4 columns");
    NoiseRegion r;
    r.center = deg2rad(v[1]);
    r.width = deg2rad(v[2]);
    r.elevation_extent = r.width;
    r.brightness = v[3];
    s.regions.push_back(r);
  }
  validate_scene(s);
  return s;
}

}  // namespace deepspace
