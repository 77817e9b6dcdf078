#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rblspi/error.hpp"
#include "rblspi/harness/aggregate.hpp"

namespace rblspi {

struct PlotSeries {
  std::string label;
  AggregateSeries series;
};

namespace detail {

inline std::string fmt(double v, int decimals = 2) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.*f", decimals, v);
  std::string s(buf);
  if (s == "-0.00" || s == "-0.0" || s == "-0") s.erase(0, 1);
  return s;
}

inline std::string xml_escape(const std::string& in) {
  std::string out;
  for (char c : in) {
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

inline const char* palette(std::size_t i) {
  static constexpr const char* colours[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};
  return colours[i % 6];
}

}  // namespace detail

/// Render mean lines with 95% CI error bars over a shaded 5–95 percentile band.
/// Output bytes depend only on the input.
inline std::string render_svg(const std::vector<PlotSeries>& all, const std::string& title = "") {
  if (all.empty()) throw InvalidArgument("plot: nothing to draw");
  std::size_t windows = 0;
  double lo = std::numeric_limits<double>::infinity(), hi = -lo;
  for (const auto& ps : all) {
    if (ps.series.windows.empty()) throw InvalidArgument("plot: empty series '" + ps.label + "'");
    windows = std::max(windows, ps.series.windows.size());
    for (const auto& w : ps.series.windows) {
      lo = std::min({lo, w.p5, w.mean - w.ci95});
      hi = std::max({hi, w.p95, w.mean + w.ci95});
    }
  }
  if (hi - lo < 1e-12) {
    lo -= 1.0;
    hi += 1.0;
  }
  const double pad = 0.05 * (hi - lo);
  lo -= pad;
  hi += pad;

  constexpr double width = 640, height = 400, left = 70, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right, plot_h = height - top - bottom;
  const std::size_t window = all.front().series.window;
  // Window i is drawn at the episode count closing it.
  auto x_of = [&](std::size_t i) {
    return windows == 1 ? left + plot_w / 2.0
                        : left + plot_w * static_cast<double>(i) / static_cast<double>(windows - 1);
  };
  auto y_of = [&](double v) { return top + plot_h * (hi - v) / (hi - lo); };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\"" << height
      << "\" viewBox=\"0 0 " << width << ' ' << height << "\">\n";
  svg << "<rect x=\"0\" y=\"0\" width=\"" << width << "\" height=\"" << height << "\" fill=\"white\"/>\n";
  if (!title.empty())
    svg << "<text x=\"" << detail::fmt(width / 2) << "\" y=\"20\" text-anchor=\"middle\" font-size=\"14\">"
        << detail::xml_escape(title) << "</text>\n";

  // Axes and ticks.
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w << "\" y2=\""
      << top + plot_h << "\" stroke=\"black\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\"" << top + plot_h
      << "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = lo + (hi - lo) * t / 4.0;
    const double y = y_of(v);
    svg << "<line x1=\"" << left - 4 << "\" y1=\"" << detail::fmt(y) << "\" x2=\"" << left << "\" y2=\""
        << detail::fmt(y) << "\" stroke=\"black\"/>\n";
    svg << "<text x=\"" << left - 6 << "\" y=\"" << detail::fmt(y + 4) << "\" text-anchor=\"end\" font-size=\"10\">"
        << detail::fmt(v, 1) << "</text>\n";
  }
  const std::size_t step = std::max<std::size_t>(1, windows / 8);
  for (std::size_t i = 0; i < windows; i += step) {
    const double x = x_of(i);
    svg << "<text x=\"" << detail::fmt(x) << "\" y=\"" << top + plot_h + 15
        << "\" text-anchor=\"middle\" font-size=\"10\">" << (i + 1) * window << "</text>\n";
  }
  svg << "<text x=\"" << detail::fmt(left + plot_w / 2) << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\" font-size=\"12\">episodes</text>\n";
  svg << "<text x=\"15\" y=\"" << detail::fmt(top + plot_h / 2) << "\" text-anchor=\"middle\" font-size=\"12\" "
      << "transform=\"rotate(-90 15 " << detail::fmt(top + plot_h / 2) << ")\">"
      << detail::xml_escape(all.front().series.metric) << "</text>\n";

  for (std::size_t s = 0; s < all.size(); ++s) {
    const auto& ws = all[s].series.windows;
    const char* colour = detail::palette(s);
    std::ostringstream band;
    for (std::size_t i = 0; i < ws.size(); ++i) band << detail::fmt(x_of(i)) << ',' << detail::fmt(y_of(ws[i].p95)) << ' ';
    for (std::size_t i = ws.size(); i-- > 0;) band << detail::fmt(x_of(i)) << ',' << detail::fmt(y_of(ws[i].p5)) << ' ';
    svg << "<polygon points=\"" << band.str() << "\" fill=\"" << colour << "\" fill-opacity=\"0.2\" stroke=\"none\"/>\n";

    std::ostringstream line;
    for (std::size_t i = 0; i < ws.size(); ++i) line << detail::fmt(x_of(i)) << ',' << detail::fmt(y_of(ws[i].mean)) << ' ';
    svg << "<polyline points=\"" << line.str() << "\" fill=\"none\" stroke=\"" << colour << "\" stroke-width=\"1.5\"/>\n";

    for (std::size_t i = 0; i < ws.size(); ++i) {
      const double x = x_of(i);
      svg << "<line x1=\"" << detail::fmt(x) << "\" y1=\"" << detail::fmt(y_of(ws[i].mean - ws[i].ci95)) << "\" x2=\""
          << detail::fmt(x) << "\" y2=\"" << detail::fmt(y_of(ws[i].mean + ws[i].ci95)) << "\" stroke=\"" << colour
          << "\"/>\n";
      svg << "<circle cx=\"" << detail::fmt(x) << "\" cy=\"" << detail::fmt(y_of(ws[i].mean)) << "\" r=\"2\" fill=\""
          << colour << "\"/>\n";
    }
    svg << "<text x=\"" << left + 10 << "\" y=\"" << top + 14 * (s + 1) << "\" font-size=\"11\" fill=\"" << colour
        << "\">" << detail::xml_escape(all[s].label) << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

inline void plot(const std::vector<PlotSeries>& all, const std::string& path, const std::string& title = "") {
  const std::string svg = render_svg(all, title);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << svg;
  if (!out) throw IoError("failed writing '" + path + "'");
}

}  // namespace rblspi
