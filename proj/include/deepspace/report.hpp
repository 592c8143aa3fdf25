#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "deepspace/antenna.hpp"
#include "deepspace/config.hpp"
#include "deepspace/errors.hpp"
#include "deepspace/harness.hpp"

namespace deepspace {

// std::to_chars output is fully specified, so these strings are identical on
// every platform.
inline std::string format_fixed(double v, int decimals = 9) {
  char buf[512];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::fixed, decimals);
  if (r.ec != std::errc()) throw RangeError("format_fixed: value out of range");
  std::string s(buf, r.ptr);
  if (s.find_first_not_of("-0.") == std::string::npos && s[0] == '-') s.erase(0, 1);  // no "-0.000"
  return s;
}

inline std::string format_significant(double v, int digits = 9) {
  char buf[128];
  auto r = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, digits);
  return std::string(buf, r.ptr);
}

inline std::string format_shortest(double v) {
  char buf[128];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

inline double parse_number(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec != std::errc() || r.ptr != s.data() + s.size())
    throw ParseError(what + ": bad number '" + s + "'");
  return v;
}

inline void write_text_file(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(p.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << text;
  out.flush();
  if (!out) throw IoError("write to '" + path + "' failed");
}

inline const char* kSweepHeader = "axis,value,mean_se,std_se,ci99_half,T,seed";

inline std::string sweep_csv(const SweepResult& r) {
  std::string out = std::string(kSweepHeader) + "\n";
  const std::string axis = to_string(r.axis);
  for (const auto& p : r.points) {
    out += axis + "," + format_significant(p.value) + "," + format_fixed(p.mean_se) + "," +
           format_fixed(p.std_se) + "," + format_fixed(p.ci99_half) + "," + std::to_string(p.samples) +
           "," + std::to_string(p.seed) + "\n";
  }
  return out;
}

inline void emit_csv(const SweepResult& r, const std::string& path) { write_text_file(path, sweep_csv(r)); }

inline SweepResult parse_sweep_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != kSweepHeader) throw ParseError("sweep CSV: missing or wrong header");
  SweepResult r;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    std::string cell;
    while (std::getline(ls, cell, ',')) cells.push_back(cell);
    const std::string where = "sweep CSV line " + std::to_string(lineno);
    if (cells.size() != 7) throw ParseError(where + ": expected 7 columns");
    auto axis = enum_from_string<SweepAxis>(cells[0]);
    if (!axis) throw ParseError(where + ": unknown axis '" + cells[0] + "'");
    r.axis = *axis;
    PointResult p;
    p.value = parse_number(cells[1], where);
    p.mean_se = parse_number(cells[2], where);
    p.std_se = parse_number(cells[3], where);
    p.ci99_half = parse_number(cells[4], where);
    p.samples = static_cast<int>(parse_number(cells[5], where));
    p.seed = std::stoull(cells[6]);
    r.seed = p.seed;
    r.points.push_back(p);
  }
  return r;
}

inline std::string pattern_csv(const RadiationPattern& p) {
  std::string out = "theta_rad,phi_rad,re_E,im_E,directivity_dbi\n";
  for (int i = 0; i <= p.n_theta(); ++i)
    for (int j = 0; j < p.n_phi(); ++j) {
      const cplx e = p.field(i, j);
      const double d = p.directivity_at(i, j);
      out += format_shortest(p.theta(i)) + "," + format_shortest(p.phi(j)) + "," +
             format_shortest(e.real()) + "," + format_shortest(e.imag()) + "," +
             format_fixed(db10(std::max(d, 1e-30)), 6) + "\n";
    }
  return out;
}

// Elevation cut through phi (signed angle, phi + pi on the negative side).
inline std::string pattern_cut_csv(const RadiationPattern& p, int j) {
  std::string out = "theta_signed_rad,directivity_dbi\n";
  const int jo = (j + p.n_phi() / 2) % p.n_phi();
  for (int i = p.n_theta(); i >= 1; --i)
    out += format_shortest(-p.theta(i)) + "," + format_fixed(db10(std::max(p.directivity_at(i, jo), 1e-30)), 6) + "\n";
  for (int i = 0; i <= p.n_theta(); ++i)
    out += format_shortest(p.theta(i)) + "," + format_fixed(db10(std::max(p.directivity_at(i, j), 1e-30)), 6) + "\n";
  return out;
}

inline std::string channel_csv(const std::vector<SampleRecord>& trace) {
  std::string out = "sample_index,d_s_m,phi_rad,delta_theta_rad\n";
  for (std::size_t n = 0; n < trace.size(); ++n)
    out += std::to_string(n) + "," + format_shortest(trace[n].distance) + "," +
           format_shortest(trace[n].phase) + "," + format_shortest(trace[n].delta_theta) + "\n";
  return out;
}

struct PlotOptions {
  std::string title;
  bool show_trace = false;  // per-sample scatter layer (needs traces)
};

namespace detail {

inline std::string axis_label(SweepAxis a) {
  switch (a) {
    case SweepAxis::alpha: return "electron density index alpha";
    case SweepAxis::beta: return "plasma order beta";
    case SweepAxis::kappa: return "hardware impairment kappa";
    case SweepAxis::n_bodies: return "celestial bodies N";
    case SweepAxis::theta_s: return "steering limit theta0 [rad]";
    case SweepAxis::tx_power: return "transmit power P_T [W]";
    case SweepAxis::carrier_frequency: return "carrier frequency f_c [Hz]";
  }
  return "";
}

inline std::string xml_escape(const std::string& s) {
  std::string o;
  for (char c : s) {
    switch (c) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += c;
    }
  }
  return o;
}

inline std::string f2(double v) { return format_fixed(v, 2); }

}  // namespace detail

// Self-contained SVG: one polyline with markers and 99% CI bars per series,
// axis labels and a legend.
inline std::string sweep_svg(const std::vector<SweepResult>& series, const PlotOptions& o = {}) {
  using detail::f2;
  const double W = 760, H = 480, L = 80, R = 220, T = 50, B = 60;
  const double pw = W - L - R, ph = H - T - B;
  double xmin = INFINITY, xmax = -INFINITY, ymin = 0.0, ymax = 1.0;
  bool any = false;
  for (const auto& s : series)
    for (const auto& p : s.points) {
      any = true;
      xmin = std::min(xmin, p.value);
      xmax = std::max(xmax, p.value);
      ymax = std::max(ymax, p.mean_se + p.ci99_half);
      if (o.show_trace)
        for (const auto& t : p.trace) ymax = std::max(ymax, t.se);
    }
  if (!any) {
    xmin = 0;
    xmax = 1;
  }
  const bool logx = xmin > 0 && xmax / xmin >= 100.0;
  auto xf = [&](double v) { return logx ? std::log10(v) : v; };
  double x0 = xf(xmin), x1 = xf(xmax);
  if (x1 == x0) {
    x0 -= 0.5;
    x1 += 0.5;
  }
  ymax = std::ceil(ymax / 5.0) * 5.0;
  auto px = [&](double v) { return L + (xf(v) - x0) / (x1 - x0) * pw; };
  auto py = [&](double v) { return T + ph - (v - ymin) / (ymax - ymin) * ph; };
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                 "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f2(W) << "\" height=\"" << f2(H)
     << "\" viewBox=\"0 0 " << f2(W) << " " << f2(H) << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!o.title.empty())
    os << "<text x=\"" << f2(L + pw / 2) << "\" y=\"28\" text-anchor=\"middle\" font-size=\"15\">"
       << detail::xml_escape(o.title) << "</text>\n";
  os << "<g class=\"axes\" stroke=\"black\" fill=\"none\">\n";
  os << "<line x1=\"" << f2(L) << "\" y1=\"" << f2(T + ph) << "\" x2=\"" << f2(L + pw) << "\" y2=\"" << f2(T + ph) << "\"/>\n";
  os << "<line x1=\"" << f2(L) << "\" y1=\"" << f2(T) << "\" x2=\"" << f2(L) << "\" y2=\"" << f2(T + ph) << "\"/>\n";
  os << "</g>\n<g class=\"ticks\" font-size=\"11\">\n";
  for (int k = 0; k <= 5; ++k) {
    const double v = ymin + (ymax - ymin) * k / 5.0;
    os << "<line x1=\"" << f2(L - 4) << "\" y1=\"" << f2(py(v)) << "\" x2=\"" << f2(L) << "\" y2=\"" << f2(py(v))
       << "\" stroke=\"black\"/><text x=\"" << f2(L - 8) << "\" y=\"" << f2(py(v) + 4)
       << "\" text-anchor=\"end\">" << f2(v) << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double t = x0 + (x1 - x0) * k / 5.0;
    const double v = logx ? std::pow(10.0, t) : t;
    const double x = L + (t - x0) / (x1 - x0) * pw;
    os << "<line x1=\"" << f2(x) << "\" y1=\"" << f2(T + ph) << "\" x2=\"" << f2(x) << "\" y2=\"" << f2(T + ph + 4)
       << "\" stroke=\"black\"/><text x=\"" << f2(x) << "\" y=\"" << f2(T + ph + 18)
       << "\" text-anchor=\"middle\">" << format_significant(v, 3) << "</text>\n";
  }
  os << "</g>\n";
  const std::string xlabel = series.empty() ? "" : detail::axis_label(series.front().axis);
  os << "<text class=\"xlabel\" x=\"" << f2(L + pw / 2) << "\" y=\"" << f2(H - 15) << "\" text-anchor=\"middle\">"
     << detail::xml_escape(xlabel) << (logx ? " (log scale)" : "") << "</text>\n";
  os << "<text class=\"ylabel\" x=\"20\" y=\"" << f2(T + ph / 2) << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
     << f2(T + ph / 2) << ")\">mean SE [(bit/s)/Hz]</text>\n";

  for (std::size_t s = 0; s < series.size(); ++s) {
    const auto& sr = series[s];
    const char* col = colors[s % 10];
    os << "<g class=\"series\" stroke=\"" << col << "\" fill=\"" << col << "\">\n";
    if (o.show_trace) {
      os << "<g class=\"trace\" fill-opacity=\"0.25\" stroke=\"none\">\n";
      for (const auto& p : sr.points)
        for (const auto& t : p.trace)
          os << "<circle cx=\"" << f2(px(p.value)) << "\" cy=\"" << f2(py(t.se)) << "\" r=\"1.5\"/>\n";
      os << "</g>\n";
    }
    if (sr.points.size() > 1) {
      os << "<polyline fill=\"none\" stroke-width=\"1.5\" points=\"";
      for (std::size_t k = 0; k < sr.points.size(); ++k)
        os << (k ? " " : "") << f2(px(sr.points[k].value)) << "," << f2(py(sr.points[k].mean_se));
      os << "\"/>\n";
    }
    for (const auto& p : sr.points) {
      const double x = px(p.value);
      os << "<line class=\"errorbar\" x1=\"" << f2(x) << "\" y1=\"" << f2(py(p.mean_se - p.ci99_half)) << "\" x2=\""
         << f2(x) << "\" y2=\"" << f2(py(p.mean_se + p.ci99_half)) << "\"/>\n";
      os << "<circle class=\"marker\" cx=\"" << f2(x) << "\" cy=\"" << f2(py(p.mean_se)) << "\" r=\"3\"/>\n";
    }
    os << "</g>\n";
  }
  os << "<g class=\"legend\">\n";
  for (std::size_t s = 0; s < series.size(); ++s) {
    const double y = T + 10 + 18.0 * s;
    const std::string label = series[s].label.empty() ? "sweep over " + to_string(series[s].axis) : series[s].label;
    os << "<rect x=\"" << f2(L + pw + 15) << "\" y=\"" << f2(y - 8) << "\" width=\"12\" height=\"4\" fill=\""
       << colors[s % 10] << "\"/><text x=\"" << f2(L + pw + 32) << "\" y=\"" << f2(y) << "\">"
       << detail::xml_escape(label) << "</text>\n";
  }
  os << "</g>\n</svg>\n";
  return os.str();
}

inline void emit_plot(const std::vector<SweepResult>& series, const std::string& path, const PlotOptions& o = {}) {
  write_text_file(path, sweep_svg(series, o));
}

inline void emit_plot(const SweepResult& r, const std::string& path, const PlotOptions& o = {}) {
  emit_plot(std::vector<SweepResult>{r}, path, o);
}

}  // namespace deepspace
