#pragma once

#include <atomic>
#include <exception>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "rblspi/agents/offline.hpp"
#include "rblspi/agents/online.hpp"
#include "rblspi/env/collect.hpp"
#include "rblspi/env/registry.hpp"
#include "rblspi/harness/aggregate.hpp"
#include "rblspi/harness/config.hpp"
#include "rblspi/harness/csv.hpp"
#include "rblspi/harness/plot.hpp"

namespace rblspi {

struct SweepPoint {
  std::size_t id = 0;
  std::size_t k_interval = 20;
  double alpha = 0.1;
  double beta = 0.1;
};

struct RunResult {
  std::size_t sweep_id = 0;
  std::size_t run_id = 0;
  std::vector<EpisodeLog> logs;
  std::size_t failed_updates = 0;
};

struct ExperimentResult {
  std::string metric;
  std::vector<SweepPoint> points;
  std::vector<RawRow> raw;  // canonical order
  std::map<std::size_t, AggregateSeries> aggregates;
  std::size_t failed_updates = 0;
};

/// Puddle world is scored by return, every other task by episode length.
inline bool metric_is_return(const std::string& env_name) { return env_name == "puddle_world"; }
inline std::string metric_name(const std::string& env_name) {
  return metric_is_return(env_name) ? "undiscounted_return" : "steps";
}

/// Cartesian product k_interval × alpha × beta; an absent list means the agent's own value.
inline std::vector<SweepPoint> sweep_points(const ExperimentConfig& c) {
  const auto ks = c.sweep.k_interval.empty() ? std::vector<std::size_t>{c.agent.k_interval} : c.sweep.k_interval;
  const auto as = c.sweep.alpha.empty() ? std::vector<double>{c.agent.alpha} : c.sweep.alpha;
  const auto bs = c.sweep.beta.empty() ? std::vector<double>{c.agent.beta} : c.sweep.beta;
  std::vector<SweepPoint> out;
  for (auto k : ks)
    for (double a : as)
      for (double b : bs) out.push_back({out.size(), k, a, b});
  return out;
}

/// Seed of run `run_index`; independent of the sweep point so runs pair across points and agents.
inline std::uint64_t run_seed(const ExperimentConfig& c, std::size_t run_index) { return c.base_seed + run_index; }

namespace detail {

inline std::vector<EpisodeLog> greedy_rollouts(Environment& env, const FeatureMap& fm, const Vector& theta,
                                               std::size_t episodes) {
  std::vector<EpisodeLog> logs;
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    EpisodeLog log;
    State s = env.reset();
    for (;;) {
      StepResult r = env.step(greedy_action(theta, fm.block(s), fm.action_count()));
      ++log.steps;
      log.undiscounted_return += r.reward;
      if (r.reached_goal || (r.truncated && env.spec().success_at_cap)) log.reached_goal = true;
      if (r.done()) break;
      s = r.next;
    }
    logs.push_back(log);
  }
  return logs;
}

}  // namespace detail

inline RunResult execute_run(const ExperimentConfig& c, const SweepPoint& point, std::size_t run_index) {
  const std::uint64_t seed = run_seed(c, run_index);
  auto env = make_environment(c.env.name, c.env.sparse, SeededRng::derive(seed, c.env.seed, 1).seed());
  const FeatureMap fm = make_feature_map(c.features, env->spec());
  SeededRng rng = SeededRng::derive(seed, 2);
  RunResult out;
  out.sweep_id = point.id;
  out.run_id = run_index;
  const double gamma = env->spec().discount;

  if (c.agent.name == "rblspi") {
    RblspiOptions o;
    o.alpha = point.alpha;
    o.beta = point.beta;
    o.k_interval = point.k_interval;
    RblspiAgent<FeatureMap> agent(fm, gamma, o, rng);
    out.logs = run_episodes(*env, fm, agent, c.episodes);
    out.failed_updates = agent.failed_updates();
  } else if (c.agent.name == "online_lspi") {
    OnlineLspiOptions o;
    o.k_interval = point.k_interval;
    o.epsilon = {c.agent.epsilon0, c.agent.epsilon_decay, c.agent.epsilon_floor};
    OnlineLspiAgent<FeatureMap> agent(fm, gamma, o, rng);
    out.logs = run_episodes(*env, fm, agent, c.episodes);
    out.failed_updates = agent.failed_updates();
  } else {
    const auto data = collect_uniform(*env, c.agent.samples, rng);
    const Vector start = Vector::Zero(fm.k());
    const OfflineResult learned =
        c.agent.name == "lspi"
            ? lspi_offline(data, fm, gamma, start, c.agent.max_iter)
            : blspi_offline(data, fm, gamma, point.alpha, point.beta, start, c.agent.max_iter);
    out.logs = detail::greedy_rollouts(*env, fm, learned.thetas.back(), c.episodes);
  }
  return out;
}

/// Recompute the aggregate table from raw rows.
inline std::vector<AggregateRow> aggregate_from_raw(const std::vector<RawRow>& raw, bool use_return,
                                                    std::size_t window, const std::string& metric) {
  std::vector<std::size_t> sweeps;
  for (const auto& r : raw)
    if (sweeps.empty() || sweeps.back() != r.sweep_id) sweeps.push_back(r.sweep_id);
  std::sort(sweeps.begin(), sweeps.end());
  sweeps.erase(std::unique(sweeps.begin(), sweeps.end()), sweeps.end());
  std::vector<AggregateRow> rows;
  for (auto id : sweeps) {
    const auto series = aggregate_runs(metric_table(raw, id, use_return), window, metric);
    const auto part = to_rows(id, series);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  return rows;
}

/// Execute every (sweep point, run) pair on up to `workers` threads. Output
/// order is canonical and independent of scheduling.
inline ExperimentResult run_experiment(const ExperimentConfig& c, std::size_t workers = 0) {
  validate(c);
  if (workers == 0) workers = c.workers;
  ExperimentResult result;
  result.metric = metric_name(c.env.name);
  result.points = sweep_points(c);

  std::vector<std::pair<std::size_t, std::size_t>> tasks;
  for (const auto& p : result.points)
    for (std::size_t r = 0; r < c.runs; ++r) tasks.emplace_back(p.id, r);
  std::vector<RunResult> runs(tasks.size());
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t i = next++; i < tasks.size(); i = next++) {
      try {
        runs[i] = execute_run(c, result.points[tasks[i].first], tasks[i].second);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
      }
    }
  };
  const std::size_t threads = std::min(workers, tasks.size());
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (failure) std::rethrow_exception(failure);

  for (const auto& run : runs) {
    result.failed_updates += run.failed_updates;
    for (std::size_t e = 0; e < run.logs.size(); ++e) {
      const auto& l = run.logs[e];
      result.raw.push_back({run.run_id, run.sweep_id, e, l.steps, l.undiscounted_return, l.reached_goal});
    }
  }
  canonicalise(result.raw);
  const bool use_return = metric_is_return(c.env.name);
  for (const auto& p : result.points)
    result.aggregates[p.id] = aggregate_runs(metric_table(result.raw, p.id, use_return), c.window, result.metric);
  return result;
}

inline std::string raw_csv_text(const ExperimentResult& r) {
  std::ostringstream out;
  write_raw_csv(out, r.raw);
  return out.str();
}

inline std::string aggregate_csv_text(const ExperimentResult& r) {
  std::vector<AggregateRow> rows;
  for (const auto& [id, series] : r.aggregates) {
    const auto part = to_rows(id, series);
    rows.insert(rows.end(), part.begin(), part.end());
  }
  std::ostringstream out;
  write_aggregate_csv(out, rows);
  return out.str();
}

inline void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

/// Writes raw.csv, aggregate.csv, sweeps.csv and one sweep_<id>.svg per point
/// that has at least one complete window.
inline void write_outputs(const ExperimentConfig& c, const ExperimentResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());
  write_text(dir / "raw.csv", raw_csv_text(r));
  write_text(dir / "aggregate.csv", aggregate_csv_text(r));
  std::ostringstream sweeps;
  sweeps << "sweep_id,agent,k_interval,alpha,beta\n";
  for (const auto& p : r.points)
    sweeps << p.id << ',' << c.agent.name << ',' << p.k_interval << ',' << format_double(p.alpha) << ','
           << format_double(p.beta) << '\n';
  write_text(dir / "sweeps.csv", sweeps.str());
  for (const auto& p : r.points) {
    const auto& series = r.aggregates.at(p.id);
    if (series.windows.empty()) continue;
    std::ostringstream label;
    label << c.agent.name << " K=" << p.k_interval << " alpha=" << p.alpha << " beta=" << p.beta;
    plot({{label.str(), series}}, (dir / ("sweep_" + std::to_string(p.id) + ".svg")).string(),
         c.name + " (" + c.env.name + (c.env.sparse ? ", sparse" : "") + ")");
  }
}

}  // namespace rblspi
