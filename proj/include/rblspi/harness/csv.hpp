#pragma once

#include <algorithm>
#include <charconv>
#include <cstddef>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <system_error>
#include <tuple>
#include <vector>

#include "rblspi/error.hpp"
#include "rblspi/harness/aggregate.hpp"

namespace rblspi {

inline constexpr const char* kRawHeader = "run_id,sweep_id,episode,steps,undiscounted_return,reached_goal";
inline constexpr const char* kAggregateHeader = "sweep_id,window_index,mean,ci95,p5,p95";

struct RawRow {
  std::size_t run_id = 0;
  std::size_t sweep_id = 0;
  std::size_t episode = 0;
  std::size_t steps = 0;
  double undiscounted_return = 0.0;
  bool reached_goal = false;
};

struct AggregateRow {
  std::size_t sweep_id = 0;
  std::size_t window_index = 0;
  WindowStats stats;
};

/// Shortest decimal form that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc()) throw IoError("format_double: conversion failed");
  return std::string(buf, end);
}

inline double parse_double(const std::string& s) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("csv: bad number '" + s + "'");
  return v;
}

inline std::size_t parse_count(const std::string& s) {
  std::size_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) throw IoError("csv: bad integer '" + s + "'");
  return v;
}

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

inline std::vector<std::vector<std::string>> read_table(std::istream& in, const char* header, std::size_t columns) {
  std::string line;
  if (!std::getline(in, line) || line != header) throw IoError(std::string("csv: expected header '") + header + "'");
  std::vector<std::vector<std::string>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    auto cells = split_csv_line(line);
    if (cells.size() != columns) throw IoError("csv: wrong column count in '" + line + "'");
    rows.push_back(std::move(cells));
  }
  return rows;
}

}  // namespace detail

/// Sort into canonical (sweep_id, run_id, episode) order.
inline void canonicalise(std::vector<RawRow>& rows) {
  std::sort(rows.begin(), rows.end(), [](const RawRow& a, const RawRow& b) {
    return std::tie(a.sweep_id, a.run_id, a.episode) < std::tie(b.sweep_id, b.run_id, b.episode);
  });
}

inline void write_raw_csv(std::ostream& out, std::vector<RawRow> rows) {
  canonicalise(rows);
  out << kRawHeader << '\n';
  for (const auto& r : rows)
    out << r.run_id << ',' << r.sweep_id << ',' << r.episode << ',' << r.steps << ','
        << format_double(r.undiscounted_return) << ',' << (r.reached_goal ? 1 : 0) << '\n';
}

inline std::vector<RawRow> read_raw_csv(std::istream& in) {
  std::vector<RawRow> rows;
  for (const auto& c : detail::read_table(in, kRawHeader, 6)) {
    RawRow r;
    r.run_id = parse_count(c[0]);
    r.sweep_id = parse_count(c[1]);
    r.episode = parse_count(c[2]);
    r.steps = parse_count(c[3]);
    r.undiscounted_return = parse_double(c[4]);
    r.reached_goal = parse_count(c[5]) != 0;
    rows.push_back(r);
  }
  return rows;
}

inline void write_aggregate_csv(std::ostream& out, const std::vector<AggregateRow>& rows) {
  out << kAggregateHeader << '\n';
  for (const auto& r : rows)
    out << r.sweep_id << ',' << r.window_index << ',' << format_double(r.stats.mean) << ','
        << format_double(r.stats.ci95) << ',' << format_double(r.stats.p5) << ',' << format_double(r.stats.p95)
        << '\n';
}

inline std::vector<AggregateRow> read_aggregate_csv(std::istream& in) {
  std::vector<AggregateRow> rows;
  for (const auto& c : detail::read_table(in, kAggregateHeader, 6)) {
    AggregateRow r;
    r.sweep_id = parse_count(c[0]);
    r.window_index = parse_count(c[1]);
    r.stats = {parse_double(c[2]), parse_double(c[3]), parse_double(c[4]), parse_double(c[5])};
    rows.push_back(r);
  }
  return rows;
}

inline std::vector<AggregateRow> to_rows(std::size_t sweep_id, const AggregateSeries& series) {
  std::vector<AggregateRow> rows;
  for (std::size_t w = 0; w < series.windows.size(); ++w) rows.push_back({sweep_id, w, series.windows[w]});
  return rows;
}

/// Group aggregate rows by sweep id into series.
inline std::map<std::size_t, AggregateSeries> series_from_rows(const std::vector<AggregateRow>& rows,
                                                              const std::string& metric, std::size_t window) {
  std::map<std::size_t, AggregateSeries> out;
  for (const auto& r : rows) {
    auto& s = out[r.sweep_id];
    s.metric = metric;
    s.window = window;
    if (r.window_index != s.windows.size()) throw IoError("aggregate csv: window indices out of order");
    s.windows.push_back(r.stats);
  }
  return out;
}

/// Per-episode metric table runs[run][episode] for one sweep point.
inline std::vector<std::vector<double>> metric_table(const std::vector<RawRow>& rows, std::size_t sweep_id,
                                                     bool use_return) {
  std::map<std::size_t, std::vector<std::pair<std::size_t, double>>> by_run;
  for (const auto& r : rows)
    if (r.sweep_id == sweep_id)
      by_run[r.run_id].push_back({r.episode, use_return ? r.undiscounted_return : static_cast<double>(r.steps)});
  std::vector<std::vector<double>> out;
  for (auto& [_, eps] : by_run) {
    std::sort(eps.begin(), eps.end());
    std::vector<double> v;
    for (const auto& [__, m] : eps) v.push_back(m);
    out.push_back(std::move(v));
  }
  return out;
}

}  // namespace rblspi
