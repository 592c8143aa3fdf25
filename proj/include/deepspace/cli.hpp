#pragma once

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "deepspace/antenna.hpp"
#include "deepspace/config.hpp"
#include "deepspace/errors.hpp"
#include "deepspace/harness.hpp"
#include "deepspace/presets.hpp"
#include "deepspace/report.hpp"
#include "deepspace/thermal_noise.hpp"

namespace deepspace::cli {

namespace detail {

// Flag text -> JSON value. Plain words (enum names) stay strings; "1,2,3"
// is accepted for list fields.
inline nlohmann::json flag_value(const ConfigField& f, std::string text) {
  const bool list = f.key == "values";
  if (list && !text.empty() && text.front() != '[') text = "[" + text + "]";
  auto j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) return text;
  return j;
}

struct Invocation {
  std::string config_path;
  std::string out_dir = "out";
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;
  bool verbose = false;
  std::map<std::string, std::string> flags;  // field path -> raw text
};

inline void apply_flags(ScenarioConfig& c, const Invocation& inv) {
  for (const auto& [path, text] : inv.flags) {
    const ConfigField* f = nullptr;
    for (const auto& g : config_fields())
      if (g.path() == path) f = &g;
    try {
      f->assign(c, flag_value(*f, text));
    } catch (const ParseError& e) {
      throw ParseError(std::string(f->flag()) + ": " + e.what());
    }
  }
  if (inv.seed) c.rng_seed = *inv.seed;
  validate(c);
}

inline ScenarioConfig scenario(const Invocation& inv) {
  ScenarioConfig c = inv.config_path.empty() ? ScenarioConfig{} : load_config(inv.config_path);
  apply_flags(c, inv);
  return c;
}

inline std::string out_path(const Invocation& inv, const std::string& name) {
  std::filesystem::create_directories(inv.out_dir);
  return (std::filesystem::path(inv.out_dir) / name).string();
}

inline std::string fmt(double v, int digits = 6) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

inline void print_sweep(std::ostream& out, const SweepResult& r) {
  if (!r.label.empty()) out << "# " << r.label << "\n";
  out << to_string(r.axis) << "  mean_se  ci99_half\n";
  for (const auto& p : r.points)
    out << fmt(p.value) << "  " << format_fixed(p.mean_se, 4) << "  " << format_fixed(p.ci99_half, 4) << "\n";
}

inline int cmd_pattern(const Invocation& inv, std::ostream& out) {
  const auto c = scenario(inv);
  const auto g = build_aperture(c);
  const auto p = radiation_pattern(g, steering_phase_profile(g, 0.0, 0.0, g.wavenumber()),
                                   GridSpec{c.array.grid_theta, c.array.grid_phi}, resolve_threads(inv.threads));
  write_text_file(out_path(inv, "pattern.csv"), pattern_csv(p));
  write_text_file(out_path(inv, "pattern_cut.csv"), pattern_cut_csv(p, 0));
  const double d = peak_directivity(p);
  out << "cells = " << g.total_cells() << "\n";
  out << "aperture = " << fmt(2 * g.semi_axis_a) << " m x " << fmt(2 * g.semi_axis_b) << " m\n";
  out << "D = " << format_fixed(db10(d), 4) << " dBi\n";
  out << "G = " << format_fixed(db10(c.efficiency_rx * d), 4) << " dBi\n";
  out << "theta_3dB = " << fmt(beamwidth(p, 3.0)) << " rad\n";
  out << "theta_30dB = " << fmt(beamwidth(p, 30.0)) << " rad\n";
  return 0;
}

inline int cmd_channel(const Invocation& inv, std::ostream& out) {
  auto c = scenario(inv);
  RunOptions o;
  o.threads = inv.threads;
  o.keep_trace = true;
  const auto r = run_point(c, 0, o);
  write_text_file(out_path(inv, "channel.csv"), channel_csv(r.trace));
  std::vector<double> dt, ph;
  for (const auto& s : r.trace) {
    dt.push_back(s.delta_theta);
    ph.push_back(s.phase);
  }
  const auto sd = summarize(dt), sp = summarize(ph);
  std::vector<double> sq;
  for (double v : dt) sq.push_back(v * v);
  out << "alpha = " << fmt(c.plasma.alpha) << ", beta = " << fmt(c.plasma.beta)
      << ", f_c = " << fmt(c.carrier_frequency) << " Hz, T = " << c.n_samples << "\n";
  out << "delta_theta mean = " << fmt(sd.mean) << " rad, std = " << fmt(sd.std)
      << " rad, rms = " << fmt(std::sqrt(pairwise_sum(sq) / sq.size())) << " rad\n";
  out << "phase mean = " << fmt(sp.mean) << " rad, std = " << fmt(sp.std) << " rad\n";
  return 0;
}

inline int cmd_noise(const Invocation& inv, const std::string& scene_path, std::ostream& out) {
  auto c = scenario(inv);
  if (scene_path.empty() && c.noise.n_bodies == 0) {
    out << "T_sys = " << fmt(c.noise.cmb_temperature, 9) << " K\n";
    return 0;
  }
  const LinkModel m(c, true, resolve_threads(inv.threads));
  CelestialScene scene;
  if (!scene_path.empty()) {
    std::ifstream in(scene_path, std::ios::binary);
    if (!in) throw IoError("cannot open scene file '" + scene_path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    scene = parse_scene_csv(buf.str(), c.noise.cmb_temperature);
  } else {
    Rng rs = Rng::for_sample(c.rng_seed, 0, 0, Stream::scene);
    scene = place_bodies(c.noise.n_bodies, m.field_of_view(), rs, placement_options(c.noise));
  }
  write_text_file(out_path(inv, "scene.csv"), scene_csv(scene));
  out << "field of view = " << fmt(m.field_of_view()) << " rad\n";
  out << "T_sys = " << fmt(system_temperature(scene, *m.noise_pattern(), c.noise.be_weighting), 9) << " K\n";
  return 0;
}

inline int cmd_sweep(const Invocation& inv, std::ostream& out) {
  const auto c = scenario(inv);
  RunOptions o;
  o.threads = inv.threads;
  const auto r = run_sweep(c, o);
  emit_csv(r, out_path(inv, "sweep.csv"));
  emit_plot(r, out_path(inv, "sweep.svg"), PlotOptions{"sweep over " + to_string(r.axis)});
  print_sweep(out, r);
  return 0;
}

inline int cmd_preset(const Invocation& inv, const std::string& name, std::ostream& out) {
  Preset p = load_preset(name);
  for (auto& s : p.series) apply_flags(s.config, inv);
  RunOptions o;
  o.threads = inv.threads;
  const auto results = run_preset(p, o);
  for (const auto& r : results) {
    emit_csv(r, out_path(inv, p.name + "_" + slug(r.label) + ".csv"));
    if (inv.verbose) print_sweep(out, r);
  }
  emit_plot(results, out_path(inv, p.name + ".svg"), PlotOptions{p.title});
  out << "wrote " << results.size() << " series to " << inv.out_dir << "\n";
  return 0;
}

}  // namespace detail

// Entry point of the command-line tool. Returns the process exit code:
// 0 success, 1 runtime error, 2 usage error.
inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Interplanetary reflectarray link simulator"};
  app.name("deepspace_sim");
  app.require_subcommand(1, 1);
  detail::Invocation inv;
  std::uint64_t seed = 0;
  app.add_option("--config", inv.config_path, "JSON scenario file")->check(CLI::ExistingFile);
  app.add_option("--out", inv.out_dir, "output directory (created if absent)");
  auto* seed_opt = app.add_option("--seed", seed, "override rng_seed");
  app.add_option("--threads", inv.threads, "worker cap (0: DEEPSPACE_SIM_THREADS or hardware)");
  app.add_flag("--verbose,-v", inv.verbose, "print per-point tables");

  auto* fields = app.add_option_group("scenario fields", "override any configuration field");
  for (const auto& f : config_fields()) {
    fields->add_option_function<std::string>(
        f.flag(), [&inv, path = f.path()](const std::string& v) { inv.flags[path] = v; }, f.help)
        ->type_name("VALUE");
  }

  auto* pattern = app.add_subcommand("pattern", "broadside pattern CSV and directivity summary");
  auto* channel = app.add_subcommand("channel", "plasma phase and arrival-angle statistics");
  auto* noise = app.add_subcommand("noise", "system noise temperature of a scene");
  std::string scene_path;
  noise->add_option("--scene", scene_path, "scene CSV (default: random placement)");
  auto* sweep = app.add_subcommand("sweep", "run the configured sweep");
  auto* preset = app.add_subcommand("preset", "reproduce a stored figure scenario");
  std::string preset_name;
  std::string names;
  for (const auto& n : preset_names()) names += (names.empty() ? "" : ", ") + n;
  preset->add_option("name", preset_name, "one of: " + names)->required();
  for (auto* s : {pattern, channel, noise, sweep, preset}) s->fallthrough();

  if (argc <= 1) {
    err << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << "\n" << app.help();
    return 2;
  }
  if (seed_opt->count()) inv.seed = seed;

  try {
    if (*preset && !inv.config_path.empty())
      throw RangeError("preset: --config cannot be combined with a preset; use field flags");
    if (*pattern) return detail::cmd_pattern(inv, out);
    if (*channel) return detail::cmd_channel(inv, out);
    if (*noise) return detail::cmd_noise(inv, scene_path, out);
    if (*sweep) return detail::cmd_sweep(inv, out);
    return detail::cmd_preset(inv, preset_name, out);
  } catch (const Error& e) {
    err << "error: " << e.kind() << ": " << e.what() << "\n";
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: io: " << e.what() << "\n";
  } catch (const std::exception& e) {
    err << "error: internal: " << e.what() << "\n";
  }
  return 1;
}

}  // namespace deepspace::cli
