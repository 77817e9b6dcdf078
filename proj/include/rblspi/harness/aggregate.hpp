#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "rblspi/error.hpp"

namespace rblspi {

struct WindowStats {
  double mean = 0.0;
  double ci95 = 0.0;  // half-width, 1.96 σ̂ / √runs
  double p5 = 0.0;
  double p95 = 0.0;
};

struct AggregateSeries {
  std::string metric;
  std::size_t window = 100;
  std::vector<WindowStats> windows;
};

/// Linear-interpolation percentile (q in [0, 1]) of an unsorted sample.
inline double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("percentile: empty sample");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const auto hi = std::min(lo + 1, values.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

/// Mean of each non-overlapping block of `window` episodes; a trailing partial block is dropped.
inline std::vector<double> block_means(const std::vector<double>& per_episode, std::size_t window) {
  if (window < 1) throw InvalidArgument("block_means: window must be >= 1");
  std::vector<double> out;
  for (std::size_t start = 0; start + window <= per_episode.size(); start += window) {
    double sum = 0.0;
    for (std::size_t i = start; i < start + window; ++i) sum += per_episode[i];
    out.push_back(sum / static_cast<double>(window));
  }
  return out;
}

/// Across-run statistics for every window. runs[r][e] is run r's metric at episode e.
inline AggregateSeries aggregate_runs(const std::vector<std::vector<double>>& runs, std::size_t window,
                                      std::string metric) {
  if (runs.empty()) throw InvalidArgument("aggregate_runs: no runs");
  AggregateSeries series;
  series.metric = std::move(metric);
  series.window = window;
  std::vector<std::vector<double>> blocks;
  std::size_t count = std::numeric_limits<std::size_t>::max();
  for (const auto& r : runs) {
    blocks.push_back(block_means(r, window));
    count = std::min(count, blocks.back().size());
  }
  const double n = static_cast<double>(runs.size());
  for (std::size_t w = 0; w < count; ++w) {
    std::vector<double> sample;
    sample.reserve(runs.size());
    for (const auto& b : blocks) sample.push_back(b[w]);
    WindowStats s;
    double sum = 0.0;
    for (double v : sample) sum += v;
    s.mean = sum / n;
    if (runs.size() > 1) {
      double ss = 0.0;
      for (double v : sample) ss += (v - s.mean) * (v - s.mean);
      s.ci95 = 1.96 * std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
    }
    s.p5 = percentile(sample, 0.05);
    s.p95 = percentile(sample, 0.95);
    series.windows.push_back(s);
  }
  return series;
}

}  // namespace rblspi
