#pragma once

// CSV and SVG output for experiment results, and the flat key=value
// experiment config format.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "selmallows/experiments.hpp"
#include "selmallows/io.hpp"

namespace selmallows {

// Ten significant digits for CSV cells.
inline std::string fmt_num(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

// Round-trip exact decimal.
inline std::string fmt_exact(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline void write_complexity_csv(std::ostream& os, const ComplexityCurve& c) {
  os << "p,inv_p,mean_r_star,std_r_star,searches,trials\n";
  for (const auto& pt : c.points) {
    os << fmt_num(pt.p) << ',' << fmt_num(pt.inv_p) << ',' << fmt_num(pt.mean_r_star) << ',' << fmt_num(pt.std_r_star)
       << ',' << pt.r_stars.size() << ',' << c.config.trials_per_point << '\n';
  }
}

inline void write_distance_csv(std::ostream& os, const DistanceCurve& c) {
  os << "p,r,mean_kt,std_kt,trials\n";
  for (const auto& s : c.series)
    for (const auto& pt : s.points) {
      os << fmt_num(s.p) << ',' << pt.r << ',' << fmt_num(pt.mean_kt) << ',' << fmt_num(pt.std_kt) << ','
         << pt.samples.size() << '\n';
    }
}

inline void write_topk_csv(std::ostream& os, const std::vector<TopkPoint>& pts) {
  os << "k,r,topk_success,full_success,trials\n";
  for (const auto& pt : pts) {
    os << pt.k << ',' << pt.r << ',' << fmt_num(pt.topk_success) << ',' << fmt_num(pt.full_success) << ','
       << pt.trials << '\n';
  }
}

inline void write_adversarial_csv(std::ostream& os, const std::vector<AdversarialReport>& reps) {
  os << "regime,r,failure_rate,trials\n";
  for (const auto& rep : reps) {
    os << "adversarial," << rep.r << ',' << fmt_num(rep.adversarial_failure) << ',' << rep.trials << '\n';
    os << "mixed," << rep.r << ',' << fmt_num(rep.mixed_failure) << ',' << rep.trials << '\n';
  }
}

struct PlotSeries {
  std::string name;
  std::vector<double> x;
  std::vector<double> y;
};

struct Plot {
  std::string title;
  std::string x_label;
  std::string y_label;
  std::vector<PlotSeries> series;
};

namespace detail {

inline std::string xml_escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

// Round step (1, 2 or 5 times a power of ten) giving about `target` ticks.
inline double tick_step(double span, int target) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0})
    if (m * mag >= raw) return m * mag;
  return 10.0 * mag;
}

}  // namespace detail

// Line chart with markers, axes, ticks and a legend.
inline std::string render_svg(const Plot& plot) {
  constexpr double W = 640, H = 440, L = 70, R = 150, T = 40, B = 60;
  double x0 = std::numeric_limits<double>::infinity(), x1 = -x0, y0 = x0, y1 = -x0;
  for (const auto& s : plot.series)
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      x0 = std::min(x0, s.x[i]);
      x1 = std::max(x1, s.x[i]);
      y0 = std::min(y0, s.y[i]);
      y1 = std::max(y1, s.y[i]);
    }
  if (!std::isfinite(x0)) x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  y0 = std::min(0.0, y0);
  if (x1 <= x0) x1 = x0 + 1;
  if (y1 <= y0) y1 = y0 + 1;
  const double xs = detail::tick_step(x1 - x0, 6), ys = detail::tick_step(y1 - y0, 6);
  x0 = std::floor(x0 / xs) * xs;
  x1 = std::ceil(x1 / xs) * xs;
  y1 = std::ceil(y1 / ys) * ys;
  auto px = [&](double x) { return L + (x - x0) / (x1 - x0) * (W - L - R); };
  auto py = [&](double y) { return H - B - (y - y0) / (y1 - y0) * (H - T - B); };

  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  std::ostringstream os;
  char buf[256];
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  os << "<text x=\"" << W / 2 << "\" y=\"20\" text-anchor=\"middle\" font-size=\"13\">" << detail::xml_escape(plot.title) << "</text>\n";
  std::snprintf(buf, sizeof buf, "<path d=\"M%.1f %.1f L%.1f %.1f L%.1f %.1f\" fill=\"none\" stroke=\"black\"/>\n", L, T * 1.0,
                L, H - B, W - R, H - B);
  os << buf;
  for (double x = x0; x <= x1 + xs * 1e-9; x += xs) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"middle\">%g</text>\n",
                  px(x), H - B, px(x), H - B + 5, px(x), H - B + 18, x);
    os << buf;
  }
  for (double y = y0; y <= y1 + ys * 1e-9; y += ys) {
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"black\"/>"
                  "<text x=\"%.1f\" y=\"%.1f\" text-anchor=\"end\">%g</text>\n",
                  L - 5, py(y), L, py(y), L - 8, py(y) + 4, y);
    os << buf;
  }
  os << "<text x=\"" << (L + W - R) / 2 << "\" y=\"" << H - 15 << "\" text-anchor=\"middle\">"
     << detail::xml_escape(plot.x_label) << "</text>\n";
  os << "<text transform=\"translate(18 " << (T + H - B) / 2 << ") rotate(-90)\" text-anchor=\"middle\">"
     << detail::xml_escape(plot.y_label) << "</text>\n";
  for (std::size_t k = 0; k < plot.series.size(); ++k) {
    const auto& s = plot.series[k];
    const char* color = colors[k % 6];
    std::string d;
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "%s%.1f %.1f", i ? " L" : "M", px(s.x[i]), py(s.y[i]));
      d += buf;
    }
    os << "<path d=\"" << d << "\" fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"/>\n";
    for (std::size_t i = 0; i < s.x.size(); ++i) {
      std::snprintf(buf, sizeof buf, "<circle cx=\"%.1f\" cy=\"%.1f\" r=\"3\" fill=\"%s\"/>\n", px(s.x[i]), py(s.y[i]), color);
      os << buf;
    }
    const double ly = T + 10 + 18.0 * static_cast<double>(k);
    std::snprintf(buf, sizeof buf,
                  "<line x1=\"%.1f\" y1=\"%.1f\" x2=\"%.1f\" y2=\"%.1f\" stroke=\"%s\" stroke-width=\"2\"/>", W - R + 15, ly,
                  W - R + 35, ly, color);
    os << buf << "<text x=\"" << W - R + 40 << "\" y=\"" << ly + 4 << "\">" << detail::xml_escape(s.name) << "</text>\n";
  }
  os << "</svg>\n";
  return os.str();
}

inline Plot complexity_plot(const ComplexityCurve& c) {
  Plot p{"Estimated sample complexity of retrieving the central ranking over the frequency parameter's inverse",
         "1/p", "estimated sample complexity r*", {}};
  PlotSeries s{"mean r* (" + std::string(to_string(c.config.selection_kind)) + ")", {}, {}};
  for (const auto& pt : c.points) {
    s.x.push_back(pt.inv_p);
    s.y.push_back(pt.mean_r_star);
  }
  p.series.push_back(std::move(s));
  return p;
}

inline Plot distance_plot(const DistanceCurve& c) {
  Plot p{"Average Kendall tau distance between the PosEst output and the central ranking",
         "size of the sample profile r", "average Kendall tau distance", {}};
  for (const auto& s : c.series) {
    PlotSeries ps{"p = " + fmt_num(s.p), {}, {}};
    for (const auto& pt : s.points) {
      ps.x.push_back(static_cast<double>(pt.r));
      ps.y.push_back(pt.mean_kt);
    }
    p.series.push_back(std::move(ps));
  }
  return p;
}

inline Plot topk_plot(const std::vector<TopkPoint>& pts) {
  Plot p{"Top-k and full recovery rate of PosEst", "size of the sample profile r", "success rate", {}};
  PlotSeries a{"top-" + std::to_string(pts.empty() ? 0 : pts.front().k), {}, {}}, b{"full ranking", {}, {}};
  for (const auto& pt : pts) {
    a.x.push_back(static_cast<double>(pt.r));
    a.y.push_back(pt.topk_success);
    b.x.push_back(static_cast<double>(pt.r));
    b.y.push_back(pt.full_success);
  }
  p.series = {a, b};
  return p;
}

inline Plot adversarial_plot(const std::vector<AdversarialReport>& reps) {
  Plot p{"PosEst failure rate: adversarial matching vs mixed p-frequent selection", "size of the sample profile r",
         "failure rate", {}};
  PlotSeries a{"adversarial", {}, {}}, m{"mixed", {}, {}};
  for (const auto& rep : reps) {
    a.x.push_back(static_cast<double>(rep.r));
    a.y.push_back(rep.adversarial_failure);
    m.x.push_back(static_cast<double>(rep.r));
    m.y.push_back(rep.mixed_failure);
  }
  p.series = {a, m};
  return p;
}

namespace detail {

inline std::vector<double> parse_reals(const std::string& key, std::string_view v) {
  std::vector<double> out;
  for (auto tok : split(v, ',')) {
    tok = trim(tok);
    // Accept fractions such as 1/3.
    const auto slash = tok.find('/');
    std::optional<double> x;
    if (slash != std::string_view::npos) {
      auto a = parse_number<double>(tok.substr(0, slash)), b = parse_number<double>(tok.substr(slash + 1));
      if (a && b && *b != 0.0) x = *a / *b;
    } else {
      x = parse_number<double>(tok);
    }
    if (!x) throw std::invalid_argument(key + ": not a number: '" + std::string(tok) + "'");
    out.push_back(*x);
  }
  return out;
}

// Comma list, or a range "lo:hi:step".
inline std::vector<std::size_t> parse_sizes(const std::string& key, std::string_view v) {
  std::vector<std::size_t> out;
  if (trim(v).empty()) return out;
  if (v.find(':') != std::string_view::npos) {
    const auto parts = split(v, ':');
    const auto lo = parse_number<std::size_t>(parts[0]);
    const auto hi = parts.size() > 1 ? parse_number<std::size_t>(parts[1]) : std::nullopt;
    const auto step = parts.size() > 2 ? parse_number<std::size_t>(parts[2]) : std::optional<std::size_t>(1);
    if (parts.size() > 3 || !lo || !hi || !step || *step == 0) throw std::invalid_argument(key + ": expected lo:hi:step");
    for (std::size_t r = *lo; r <= *hi; r += *step) out.push_back(r);
    return out;
  }
  for (auto tok : split(v, ',')) {
    auto x = parse_number<std::size_t>(tok);
    if (!x) throw std::invalid_argument(key + ": not a nonnegative integer: '" + std::string(trim(tok)) + "'");
    out.push_back(*x);
  }
  return out;
}

template <class T>
T parse_scalar(const std::string& key, std::string_view v) {
  auto x = parse_number<T>(v);
  if (!x) throw std::invalid_argument(key + ": bad value '" + std::string(trim(v)) + "'");
  return *x;
}

}  // namespace detail

// Sets one config field from its key=value spelling.
inline void apply_config_value(ExperimentConfig& c, const std::string& key, std::string_view v) {
  if (key == "n") c.n = detail::parse_scalar<std::size_t>(key, v);
  else if (key == "beta") c.beta = detail::parse_scalar<double>(key, v);
  else if (key == "p_values" || key == "p") c.p_values = detail::parse_reals(key, v);
  else if (key == "target_success") c.target_success = detail::parse_scalar<double>(key, v);
  else if (key == "trials_per_point" || key == "trials") c.trials_per_point = detail::parse_scalar<std::size_t>(key, v);
  else if (key == "searches") c.searches = detail::parse_scalar<std::size_t>(key, v);
  else if (key == "r_grid") c.r_grid = detail::parse_sizes(key, v);
  else if (key == "k") c.k = detail::parse_scalar<std::size_t>(key, v);
  else if (key == "selection_kind") c.selection_kind = parse_selection_kind(detail::trim(v));
  else if (key == "q") c.q = detail::parse_scalar<double>(key, v);
  else if (key == "estimator") c.estimator = parse_estimator(detail::trim(v));
  else if (key == "seed") c.seed = detail::parse_scalar<std::uint64_t>(key, v);
  else if (key == "r_cap") c.r_cap = detail::parse_scalar<std::size_t>(key, v);
  else throw std::invalid_argument("unknown config key '" + key + "'");
}

// Lines "key = value"; blank lines and lines starting with # are skipped.
inline ExperimentConfig read_config(std::istream& in, ExperimentConfig base = {}) {
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto text = detail::trim(line);
    if (text.empty() || text.front() == '#') continue;
    const auto eq = text.find('=');
    if (eq == std::string_view::npos) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": expected key=value");
    }
    try {
      apply_config_value(base, std::string(detail::trim(text.substr(0, eq))), detail::trim(text.substr(eq + 1)));
    } catch (const std::invalid_argument& e) {
      throw std::invalid_argument("config line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

// The config as key=value lines accepted by read_config.
inline std::string format_config(const ExperimentConfig& c) {
  std::ostringstream os;
  os << "n=" << c.n << "\nbeta=" << fmt_exact(c.beta) << "\np_values=";
  for (std::size_t i = 0; i < c.p_values.size(); ++i) os << (i ? "," : "") << fmt_exact(c.p_values[i]);
  os << "\ntarget_success=" << fmt_exact(c.target_success) << "\ntrials_per_point=" << c.trials_per_point
     << "\nsearches=" << c.searches << "\nr_grid=";
  for (std::size_t i = 0; i < c.r_grid.size(); ++i) os << (i ? "," : "") << c.r_grid[i];
  os << "\nk=" << c.k << "\nselection_kind=" << to_string(c.selection_kind) << "\nq=" << fmt_exact(c.q)
     << "\nestimator=" << to_string(c.estimator) << "\nseed=" << c.seed << "\nr_cap=" << c.r_cap << '\n';
  return os.str();
}

}  // namespace selmallows
