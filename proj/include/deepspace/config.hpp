#pragma once

#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "deepspace/constants.hpp"
#include "deepspace/errors.hpp"

namespace deepspace {

// Earth orbiter -> Moon orbiter geometry. Both orbiters sit on the half
// sphere facing the other body; the link is shortest when they are aligned
// and longest when they are at opposite edges of the coverage.
struct LinkGeometry {
  double earth_moon_distance = 3.844e8;  // m
  double orbit_height_1 = 37786000.0;    // m
  double orbit_height_2 = 37786000.0;    // m

  double min_distance() const { return earth_moon_distance; }
  double max_distance() const {
    const double h = orbit_height_1 + orbit_height_2;
    return std::hypot(earth_moon_distance + h, h);
  }
  bool operator==(const LinkGeometry&) const = default;
};

// Distance for a uniform variate u in [0, 1]: linear between the extremes.
inline double sample_link_distance(const LinkGeometry& link, double u) {
  if (!(u >= 0.0 && u <= 1.0)) throw RangeError("sample_link_distance: u must lie in [0, 1]");
  const double lo = link.min_distance();
  const double hi = link.max_distance();
  return lo + u * (hi - lo);
}

enum class SteeringPolicy { none, clamped_ideal, unbounded_ideal, physical };
enum class AoaModel { proxy, variance, physical };
enum class AlphaMode { fixed, uniform };
enum class SeVariant { printed, distortion_scaled };
enum class SceneMode { per_sample, fixed };
enum class BeWeighting { solid_angle, paper_literal };
enum class PathProfile { midpoint, geometric };
enum class SweepAxis { alpha, beta, kappa, n_bodies, theta_s, tx_power, carrier_frequency };

namespace detail {

template <typename E>
struct EnumNames;

template <>
struct EnumNames<SteeringPolicy> {
  static constexpr std::array<std::pair<SteeringPolicy, std::string_view>, 4> values{{
      {SteeringPolicy::none, "none"},
      {SteeringPolicy::clamped_ideal, "clamped_ideal"},
      {SteeringPolicy::unbounded_ideal, "unbounded_ideal"},
      {SteeringPolicy::physical, "physical"},
  }};
};
template <>
struct EnumNames<AoaModel> {
  static constexpr std::array<std::pair<AoaModel, std::string_view>, 3> values{{
      {AoaModel::proxy, "proxy"}, {AoaModel::variance, "variance"}, {AoaModel::physical, "physical"}}};
};
template <>
struct EnumNames<AlphaMode> {
  static constexpr std::array<std::pair<AlphaMode, std::string_view>, 2> values{{
      {AlphaMode::fixed, "fixed"}, {AlphaMode::uniform, "uniform"}}};
};
template <>
struct EnumNames<SeVariant> {
  static constexpr std::array<std::pair<SeVariant, std::string_view>, 2> values{{
      {SeVariant::printed, "printed"}, {SeVariant::distortion_scaled, "distortion_scaled"}}};
};
template <>
struct EnumNames<SceneMode> {
  static constexpr std::array<std::pair<SceneMode, std::string_view>, 2> values{{
      {SceneMode::per_sample, "per_sample"}, {SceneMode::fixed, "fixed"}}};
};
template <>
struct EnumNames<BeWeighting> {
  static constexpr std::array<std::pair<BeWeighting, std::string_view>, 2> values{{
      {BeWeighting::solid_angle, "solid_angle"}, {BeWeighting::paper_literal, "paper_literal"}}};
};
template <>
struct EnumNames<PathProfile> {
  static constexpr std::array<std::pair<PathProfile, std::string_view>, 2> values{{
      {PathProfile::midpoint, "midpoint"}, {PathProfile::geometric, "geometric"}}};
};
template <>
struct EnumNames<SweepAxis> {
  static constexpr std::array<std::pair<SweepAxis, std::string_view>, 7> values{{
      {SweepAxis::alpha, "alpha"},
      {SweepAxis::beta, "beta"},
      {SweepAxis::kappa, "kappa"},
      {SweepAxis::n_bodies, "n_bodies"},
      {SweepAxis::theta_s, "theta_s"},
      {SweepAxis::tx_power, "tx_power"},
      {SweepAxis::carrier_frequency, "carrier_frequency"},
  }};
};

}  // namespace detail

template <typename E>
std::string to_string(E value) {
  for (const auto& [v, name] : detail::EnumNames<E>::values)
    if (v == value) return std::string(name);
  return "?";
}

template <typename E>
std::optional<E> enum_from_string(std::string_view text) {
  for (const auto& [v, name] : detail::EnumNames<E>::values)
    if (name == text) return v;
  return std::nullopt;
}

template <typename E>
std::string enum_choices() {
  std::string out;
  for (const auto& [v, name] : detail::EnumNames<E>::values) {
    if (!out.empty()) out += "|";
    out += name;
  }
  return out;
}

// Reflectarray layout and pattern-grid descriptor. The aperture is built at
// the carrier frequency, so every length here is in wavelengths or a ratio.
struct ArrayDescriptor {
  int target_cells = 10400;
  double spacing_wavelengths = 0.5;
  double axis_ratio = 1.0;          // b / a of the elliptical aperture
  double focal_ratio = 0.8;         // feed distance / aperture diameter
  double feed_offset = deg2rad(25.0);
  double feed_exponent = 10.0;
  double element_exponent = 1.0;
  int phase_bits = 0;               // 0 = continuous phase
  int grid_theta = 360;             // divisions of [0, pi] for the noise pattern
  int grid_phi = 720;               // divisions of [0, 2 pi)
  bool operator==(const ArrayDescriptor&) const = default;
};

struct PlasmaConfig {
  double alpha = 1.0;
  double beta = 3e6;
  double omega0 = 1.0;                       // rad/s
  double r_over_rs = kAstronomicalUnit / kConstants.sun_radius;
  int path_steps = 1000;
  PathProfile path_profile = PathProfile::midpoint;
  AoaModel aoa_model = AoaModel::proxy;
  // Proxy standard deviation of the arrival-angle tilt at alpha*beta = 3e6
  // and 10 GHz; 3 sigma equals pi/36 at alpha = 10.
  double aoa_sigma_ref = 10.0 * kPi / 108.0;
  AlphaMode alpha_mode = AlphaMode::fixed;
  double alpha_min = 1.0;
  double alpha_max = 10.0;
  double inner_scale = 1e4;                  // m
  double outer_scale = 1e9;                  // m
  bool operator==(const PlasmaConfig&) const = default;
};

struct NoiseConfig {
  int n_bodies = 0;
  double cmb_temperature = kCmbTemperature;
  double brightness_min = 3.0;               // K
  double brightness_max = 300.0;             // K
  double body_width_min = deg2rad(15.0);
  double body_width_max = deg2rad(30.0);
  SceneMode scene_mode = SceneMode::per_sample;
  BeWeighting be_weighting = BeWeighting::solid_angle;
  bool operator==(const NoiseConfig&) const = default;
};

struct SweepConfig {
  SweepAxis axis = SweepAxis::alpha;
  std::vector<double> values{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
  bool operator==(const SweepConfig&) const = default;
};

inline constexpr int kSchemaVersion = 1;

struct ScenarioConfig {
  int schema_version = kSchemaVersion;
  double carrier_frequency = 10e9;   // Hz
  double tx_power = 500.0;           // W
  double kappa1 = 0.0;
  double kappa2 = 0.0;
  double efficiency_tx = 0.782;
  double efficiency_rx = 0.782;
  double steering_limit = kPi / 36.0;  // rad
  int n_samples = 100;
  std::uint64_t rng_seed = 42;
  SteeringPolicy steering = SteeringPolicy::unbounded_ideal;
  SeVariant se_variant = SeVariant::printed;
  LinkGeometry link;
  ArrayDescriptor array;
  PlasmaConfig plasma;
  NoiseConfig noise;
  SweepConfig sweep;

  double wavelength() const { return wavelength_of(carrier_frequency); }
  double wavenumber() const { return kTwoPi / wavelength(); }
  bool operator==(const ScenarioConfig&) const = default;
};

// ---------------------------------------------------------------------------
// Field registry: one entry per configuration field. Drives JSON load/save,
// the `--kebab-case` CLI flags and range validation from a single table.

struct ConfigField {
  std::string section;  // "" for top level
  std::string key;
  std::string help;
  std::function<void(ScenarioConfig&, const nlohmann::json&)> assign;
  std::function<nlohmann::json(const ScenarioConfig&)> read;

  std::string path() const { return section.empty() ? key : section + "." + key; }
  std::string flag() const {
    std::string f = "--" + key;
    std::replace(f.begin() + 2, f.end(), '_', '-');
    return f;
  }
};

namespace detail {

template <typename T>
T json_as(const nlohmann::json& j, const std::string& path) {
  if constexpr (std::is_same_v<T, double>) {
    if (!j.is_number()) throw ParseError("field '" + path + "': expected a number");
    return j.get<double>();
  } else if constexpr (std::is_same_v<T, int>) {
    if (!j.is_number()) throw ParseError("field '" + path + "': expected an integer");
    const double v = j.get<double>();
    if (v != std::floor(v) || std::abs(v) > 2e9)
      throw ParseError("field '" + path + "': expected an integer");
    return static_cast<int>(v);
  } else if constexpr (std::is_same_v<T, std::uint64_t>) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_number_integer() && j.get<std::int64_t>() >= 0)
      return static_cast<std::uint64_t>(j.get<std::int64_t>());
    throw ParseError("field '" + path + "': expected a non-negative integer");
  } else if constexpr (std::is_same_v<T, std::vector<double>>) {
    if (!j.is_array()) throw ParseError("field '" + path + "': expected an array of numbers");
    std::vector<double> out;
    for (const auto& e : j) {
      if (!e.is_number()) throw ParseError("field '" + path + "': expected an array of numbers");
      out.push_back(e.get<double>());
    }
    return out;
  } else {
    if (!j.is_string())
      throw ParseError("field '" + path + "': expected one of " + enum_choices<T>());
    auto v = enum_from_string<T>(j.get<std::string>());
    if (!v)
      throw ParseError("field '" + path + "': '" + j.get<std::string>() + "' is not one of " +
                       enum_choices<T>());
    return *v;
  }
}

template <typename T>
nlohmann::json to_json_value(const T& v) {
  if constexpr (std::is_enum_v<T>)
    return to_string(v);
  else
    return v;
}

template <typename T, typename Access>
ConfigField make_field(std::string section, std::string key, std::string help, Access access) {
  ConfigField f;
  f.section = std::move(section);
  f.key = std::move(key);
  f.help = std::move(help);
  const std::string path = f.path();
  f.assign = [access, path](ScenarioConfig& c, const nlohmann::json& j) {
    access(c) = json_as<T>(j, path);
  };
  f.read = [access](const ScenarioConfig& c) {
    return to_json_value<T>(access(const_cast<ScenarioConfig&>(c)));
  };
  return f;
}

}  // namespace detail

inline const std::vector<ConfigField>& config_fields() {
  using detail::make_field;
  using C = ScenarioConfig;
  static const std::vector<ConfigField> fields = {
      make_field<double>("", "carrier_frequency", "carrier frequency [Hz]",
                         [](C& c) -> double& { return c.carrier_frequency; }),
      make_field<double>("", "tx_power", "transmit power [W]",
                         [](C& c) -> double& { return c.tx_power; }),
      make_field<double>("", "kappa1", "transmitter hardware impairment level",
                         [](C& c) -> double& { return c.kappa1; }),
      make_field<double>("", "kappa2", "receiver hardware impairment level",
                         [](C& c) -> double& { return c.kappa2; }),
      make_field<double>("", "efficiency_tx", "transmit antenna efficiency",
                         [](C& c) -> double& { return c.efficiency_tx; }),
      make_field<double>("", "efficiency_rx", "receive antenna efficiency",
                         [](C& c) -> double& { return c.efficiency_rx; }),
      make_field<double>("", "steering_limit", "steering limit theta0 [rad]",
                         [](C& c) -> double& { return c.steering_limit; }),
      make_field<int>("", "n_samples", "Monte Carlo samples per point",
                      [](C& c) -> int& { return c.n_samples; }),
      make_field<std::uint64_t>("", "rng_seed", "master seed",
                                [](C& c) -> std::uint64_t& { return c.rng_seed; }),
      make_field<SteeringPolicy>("", "steering", "steering policy",
                                 [](C& c) -> SteeringPolicy& { return c.steering; }),
      make_field<SeVariant>("", "se_variant", "distortion term of the SE formula",
                            [](C& c) -> SeVariant& { return c.se_variant; }),

      make_field<double>("link", "earth_moon_distance", "closest link distance [m]",
                         [](C& c) -> double& { return c.link.earth_moon_distance; }),
      make_field<double>("link", "orbit_height_1", "Earth orbiter height [m]",
                         [](C& c) -> double& { return c.link.orbit_height_1; }),
      make_field<double>("link", "orbit_height_2", "Moon orbiter height [m]",
                         [](C& c) -> double& { return c.link.orbit_height_2; }),

      make_field<int>("array", "target_cells", "reflectarray cell count M1*M2",
                      [](C& c) -> int& { return c.array.target_cells; }),
      make_field<double>("array", "spacing_wavelengths", "cell spacing [wavelengths]",
                         [](C& c) -> double& { return c.array.spacing_wavelengths; }),
      make_field<double>("array", "axis_ratio", "ellipse semi-axis ratio b/a",
                         [](C& c) -> double& { return c.array.axis_ratio; }),
      make_field<double>("array", "focal_ratio", "feed distance over aperture diameter",
                         [](C& c) -> double& { return c.array.focal_ratio; }),
      make_field<double>("array", "feed_offset", "feed offset angle from broadside [rad]",
                         [](C& c) -> double& { return c.array.feed_offset; }),
      make_field<double>("array", "feed_exponent", "feed pattern exponent q_f",
                         [](C& c) -> double& { return c.array.feed_exponent; }),
      make_field<double>("array", "element_exponent", "element pattern exponent q_e",
                         [](C& c) -> double& { return c.array.element_exponent; }),
      make_field<int>("array", "phase_bits", "phase quantization bits (0 = continuous)",
                      [](C& c) -> int& { return c.array.phase_bits; }),
      make_field<int>("array", "grid_theta", "pattern grid divisions over [0, pi]",
                      [](C& c) -> int& { return c.array.grid_theta; }),
      make_field<int>("array", "grid_phi", "pattern grid divisions over [0, 2 pi)",
                      [](C& c) -> int& { return c.array.grid_phi; }),

      make_field<double>("plasma", "alpha", "electron density index",
                         [](C& c) -> double& { return c.plasma.alpha; }),
      make_field<double>("plasma", "beta", "order of solar plasma magnitude",
                         [](C& c) -> double& { return c.plasma.beta; }),
      make_field<double>("plasma", "omega0", "resonance frequency [rad/s]",
                         [](C& c) -> double& { return c.plasma.omega0; }),
      make_field<double>("plasma", "r_over_rs", "Sun offset of the path [sun radii]",
                         [](C& c) -> double& { return c.plasma.r_over_rs; }),
      make_field<int>("plasma", "path_steps", "rectangular-rule panels along the path",
                      [](C& c) -> int& { return c.plasma.path_steps; }),
      make_field<PathProfile>("plasma", "path_profile", "Sun distance along the path",
                              [](C& c) -> PathProfile& { return c.plasma.path_profile; }),
      make_field<AoaModel>("plasma", "aoa_model", "arrival-angle fluctuation model",
                           [](C& c) -> AoaModel& { return c.plasma.aoa_model; }),
      make_field<double>("plasma", "aoa_sigma_ref", "proxy tilt std at alpha*beta=3e6, 10 GHz [rad]",
                         [](C& c) -> double& { return c.plasma.aoa_sigma_ref; }),
      make_field<AlphaMode>("plasma", "alpha_mode", "alpha fixed or drawn per sample",
                            [](C& c) -> AlphaMode& { return c.plasma.alpha_mode; }),
      make_field<double>("plasma", "alpha_min", "lower alpha for per-sample draws",
                         [](C& c) -> double& { return c.plasma.alpha_min; }),
      make_field<double>("plasma", "alpha_max", "upper alpha for per-sample draws",
                         [](C& c) -> double& { return c.plasma.alpha_max; }),
      make_field<double>("plasma", "inner_scale", "turbulence inner scale [m]",
                         [](C& c) -> double& { return c.plasma.inner_scale; }),
      make_field<double>("plasma", "outer_scale", "turbulence outer scale [m]",
                         [](C& c) -> double& { return c.plasma.outer_scale; }),

      make_field<int>("noise", "n_bodies", "number of hidden celestial bodies",
                      [](C& c) -> int& { return c.noise.n_bodies; }),
      make_field<double>("noise", "cmb_temperature", "CMB temperature [K]",
                         [](C& c) -> double& { return c.noise.cmb_temperature; }),
      make_field<double>("noise", "brightness_min", "lowest body brightness [K]",
                         [](C& c) -> double& { return c.noise.brightness_min; }),
      make_field<double>("noise", "brightness_max", "highest body brightness [K]",
                         [](C& c) -> double& { return c.noise.brightness_max; }),
      make_field<double>("noise", "body_width_min", "smallest region width [rad]",
                         [](C& c) -> double& { return c.noise.body_width_min; }),
      make_field<double>("noise", "body_width_max", "largest region width [rad]",
                         [](C& c) -> double& { return c.noise.body_width_max; }),
      make_field<SceneMode>("noise", "scene_mode", "scene drawn per sample or once per point",
                            [](C& c) -> SceneMode& { return c.noise.scene_mode; }),
      make_field<BeWeighting>("noise", "be_weighting", "beam-efficiency weighting",
                              [](C& c) -> BeWeighting& { return c.noise.be_weighting; }),

      make_field<SweepAxis>("sweep", "axis", "sweep axis",
                            [](C& c) -> SweepAxis& { return c.sweep.axis; }),
      make_field<std::vector<double>>("sweep", "values", "sweep axis values",
                                      [](C& c) -> std::vector<double>& { return c.sweep.values; }),
  };
  return fields;
}

inline const ConfigField* find_field(std::string_view section, std::string_view key) {
  for (const auto& f : config_fields())
    if (f.section == section && f.key == key) return &f;
  return nullptr;
}

// Range checks; every violation names the field and its bound.
inline void validate(const ScenarioConfig& c) {
  auto check = [](bool ok, const std::string& field, double value, const std::string& bound) {
    if (!ok) {
      std::ostringstream os;
      os << "field '" << field << "' = " << value << " violates bound " << bound;
      throw RangeError(os.str());
    }
  };
  check(c.schema_version == kSchemaVersion, "schema_version", c.schema_version, "== 1");
  check(c.carrier_frequency > 0, "carrier_frequency", c.carrier_frequency, "> 0");
  check(c.tx_power >= 0, "tx_power", c.tx_power, ">= 0");
  check(c.kappa1 >= 0, "kappa1", c.kappa1, ">= 0");
  check(c.kappa2 >= 0, "kappa2", c.kappa2, ">= 0");
  check(c.efficiency_tx > 0 && c.efficiency_tx <= 1, "efficiency_tx", c.efficiency_tx, "in (0, 1]");
  check(c.efficiency_rx > 0 && c.efficiency_rx <= 1, "efficiency_rx", c.efficiency_rx, "in (0, 1]");
  check(c.steering_limit > 0 && c.steering_limit <= kPi, "steering_limit", c.steering_limit,
        "in (0, pi]");
  check(c.n_samples >= 1, "n_samples", c.n_samples, ">= 1");

  check(c.link.earth_moon_distance > 0, "link.earth_moon_distance", c.link.earth_moon_distance, "> 0");
  check(c.link.orbit_height_1 >= 0, "link.orbit_height_1", c.link.orbit_height_1, ">= 0");
  check(c.link.orbit_height_2 >= 0, "link.orbit_height_2", c.link.orbit_height_2, ">= 0");

  const auto& a = c.array;
  check(a.target_cells >= 1, "array.target_cells", a.target_cells, ">= 1");
  check(a.spacing_wavelengths > 0, "array.spacing_wavelengths", a.spacing_wavelengths, "> 0");
  check(a.axis_ratio > 0, "array.axis_ratio", a.axis_ratio, "> 0");
  check(a.focal_ratio > 0, "array.focal_ratio", a.focal_ratio, "> 0");
  check(a.feed_offset >= 0 && a.feed_offset < kPi / 2, "array.feed_offset", a.feed_offset,
        "in [0, pi/2)");
  check(a.feed_exponent >= 0, "array.feed_exponent", a.feed_exponent, ">= 0");
  check(a.element_exponent >= 0, "array.element_exponent", a.element_exponent, ">= 0");
  check(a.phase_bits >= 0 && a.phase_bits <= 16, "array.phase_bits", a.phase_bits, "in [0, 16]");
  check(a.grid_theta >= 180, "array.grid_theta", a.grid_theta, ">= 180");
  check(a.grid_phi >= 360 && a.grid_phi % 2 == 0, "array.grid_phi", a.grid_phi, ">= 360 and even");

  const auto& p = c.plasma;
  check(p.alpha > 0, "plasma.alpha", p.alpha, "> 0");
  check(p.beta > 0, "plasma.beta", p.beta, "> 0");
  check(p.omega0 >= 0, "plasma.omega0", p.omega0, ">= 0");
  check(p.r_over_rs >= 1, "plasma.r_over_rs", p.r_over_rs, ">= 1");
  check(p.path_steps >= 1, "plasma.path_steps", p.path_steps, ">= 1");
  check(p.aoa_sigma_ref >= 0, "plasma.aoa_sigma_ref", p.aoa_sigma_ref, ">= 0");
  check(p.alpha_min > 0, "plasma.alpha_min", p.alpha_min, "> 0");
  check(p.alpha_max >= p.alpha_min, "plasma.alpha_max", p.alpha_max, ">= plasma.alpha_min");
  check(p.inner_scale > 0, "plasma.inner_scale", p.inner_scale, "> 0");
  check(p.outer_scale > p.inner_scale, "plasma.outer_scale", p.outer_scale, "> plasma.inner_scale");

  const auto& n = c.noise;
  check(n.n_bodies >= 0, "noise.n_bodies", n.n_bodies, ">= 0");
  check(n.cmb_temperature >= 0, "noise.cmb_temperature", n.cmb_temperature, ">= 0");
  check(n.brightness_min > 0, "noise.brightness_min", n.brightness_min, "> 0");
  check(n.brightness_max >= n.brightness_min, "noise.brightness_max", n.brightness_max,
        ">= noise.brightness_min");
  check(n.body_width_min > 0, "noise.body_width_min", n.body_width_min, "> 0");
  check(n.body_width_max >= n.body_width_min && n.body_width_max <= kTwoPi, "noise.body_width_max",
        n.body_width_max, "in [noise.body_width_min, 2 pi]");

  check(!c.sweep.values.empty(), "sweep.values", 0, "non-empty");
}

// Applies every key of `doc` onto `config`. Nested objects map to sections.
// Unknown keys are rejected so that typos do not silently fall back to
// defaults.
inline void apply_overrides(ScenarioConfig& config, const nlohmann::json& doc) {
  if (!doc.is_object()) throw ParseError("configuration must be a JSON object");
  for (const auto& [key, value] : doc.items()) {
    if (key == "schema_version") {
      config.schema_version = detail::json_as<int>(value, "schema_version");
      continue;
    }
    if (value.is_object()) {
      for (const auto& [sub, subvalue] : value.items()) {
        const ConfigField* f = find_field(key, sub);
        if (!f) throw ParseError("unknown field '" + key + "." + sub + "'");
        f->assign(config, subvalue);
      }
      continue;
    }
    const ConfigField* f = find_field("", key);
    if (!f) throw ParseError("unknown field '" + key + "'");
    f->assign(config, value);
  }
}

inline nlohmann::json to_json(const ScenarioConfig& config) {
  nlohmann::json doc = nlohmann::json::object();
  doc["schema_version"] = config.schema_version;
  for (const auto& f : config_fields()) {
    if (f.section.empty())
      doc[f.key] = f.read(config);
    else
      doc[f.section][f.key] = f.read(config);
  }
  return doc;
}

namespace detail {

inline std::string describe_position(const std::string& text, std::size_t byte) {
  std::size_t line = 1, column = 1;
  for (std::size_t i = 0; i < std::min(byte, text.size()); ++i) {
    if (text[i] == '\n') {
      ++line;
      column = 1;
    } else {
      ++column;
    }
  }
  return "line " + std::to_string(line) + ", column " + std::to_string(column);
}

}  // namespace detail

// Parses configuration text. An empty document yields all defaults; any
// non-empty document must carry `schema_version`.
inline ScenarioConfig parse_config(const std::string& text, const std::string& source = "<config>") {
  ScenarioConfig config;
  if (text.find_first_not_of(" \t\r\n") == std::string::npos) return config;
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + detail::describe_position(text, e.byte) +
                     ": malformed JSON");
  }
  if (!doc.is_object()) throw ParseError(source + ": configuration must be a JSON object");
  if (!doc.contains("schema_version"))
    throw ParseError(source + ": missing mandatory field 'schema_version'");
  try {
    apply_overrides(config, doc);
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what());
  }
  validate(config);
  return config;
}

inline ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open configuration file '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str(), path);
}

inline std::string serialize_config(const ScenarioConfig& config) { return to_json(config).dump(2) + "\n"; }

inline void save_config(const ScenarioConfig& config, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write configuration file '" + path + "'");
  out << serialize_config(config);
}

}  // namespace deepspace
