#pragma once

#include <json.hpp>

#include <cctype>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "deepspace/config.hpp"
#include "deepspace/errors.hpp"
#include "deepspace/harness.hpp"
#include "deepspace/preset_data.hpp"  // generated from presets/*.json

namespace deepspace {

struct PresetSeries {
  std::string label;
  ScenarioConfig config;
};

struct Preset {
  std::string name;
  std::string title;
  ScenarioConfig base;
  std::vector<PresetSeries> series;
};

inline std::vector<std::string> preset_names() {
  std::vector<std::string> out;
  for (const auto& [name, text] : kPresetFiles) out.emplace_back(name);
  return out;
}

inline std::string preset_text(std::string_view name) {
  for (const auto& [n, text] : kPresetFiles)
    if (n == name) return std::string(text);
  std::string known;
  for (const auto& n : preset_names()) known += (known.empty() ? "" : ", ") + n;
  throw RangeError("unknown preset '" + std::string(name) + "' (known: " + known + ")");
}

// A preset is a base configuration plus one override document per series.
inline Preset parse_preset(const std::string& text, const std::string& source = "<preset>") {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(source + ": " + detail::describe_position(text, e.byte) + ": malformed JSON");
  }
  if (!doc.is_object() || doc.value("schema_version", 0) != kSchemaVersion)
    throw ParseError(source + ": preset needs schema_version 1");
  for (const auto& [key, v] : doc.items())
    if (key != "schema_version" && key != "name" && key != "title" && key != "config" && key != "series")
      throw ParseError(source + ": unknown preset field '" + key + "'");
  Preset p;
  p.name = doc.value("name", std::string{});
  p.title = doc.value("title", std::string{});
  try {
    if (doc.contains("config")) apply_overrides(p.base, doc["config"]);
    validate(p.base);
    if (!doc.contains("series") || !doc["series"].is_array() || doc["series"].empty())
      throw ParseError("preset needs a non-empty 'series' array");
    for (const auto& s : doc["series"]) {
      PresetSeries ps;
      ps.label = s.value("label", std::string{});
      ps.config = p.base;
      if (s.contains("overrides")) apply_overrides(ps.config, s["overrides"]);
      validate(ps.config);
      p.series.push_back(std::move(ps));
    }
  } catch (const ParseError& e) {
    throw ParseError(source + ": " + e.what());
  }
  return p;
}

inline Preset load_preset(std::string_view name) { return parse_preset(preset_text(name), std::string(name)); }

// File-name friendly form of a series label.
inline std::string slug(const std::string& label) {
  std::string out;
  for (char c : label) {
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isalnum(u))
      out += static_cast<char>(std::tolower(u));
    else if (!out.empty() && out.back() != '_')
      out += '_';
  }
  while (!out.empty() && out.back() == '_') out.pop_back();
  return out.empty() ? "series" : out;
}

inline std::vector<SweepResult> run_preset(const Preset& p, const RunOptions& o = {}) {
  ModelCache cache;
  std::vector<SweepResult> out;
  for (const auto& s : p.series) out.push_back(run_sweep(s.config, cache, o, s.label));
  return out;
}

}  // namespace deepspace
