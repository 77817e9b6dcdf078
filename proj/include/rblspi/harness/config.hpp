#pragma once

#include <cstdint>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include <json.hpp>

#include "rblspi/env/registry.hpp"
#include "rblspi/error.hpp"
#include "rblspi/features.hpp"

namespace rblspi {

inline constexpr int kConfigSchemaVersion = 1;

struct EnvConfig {
  std::string name;
  bool sparse = false;
  std::uint64_t seed = 0;
};

struct FeatureConfig {
  std::string kind = "rbf_grid";  // rbf_grid | polynomial
  std::vector<int> grid;          // per state dimension; a single value is broadcast
  bool include_constant = true;
  int degree = 4;
};

struct AgentConfig {
  std::string name = "rblspi";  // lspi | blspi | rblspi | online_lspi
  double alpha = 0.1;
  double beta = 0.1;
  std::size_t k_interval = 20;
  double epsilon0 = 1.0;
  double epsilon_decay = 0.997;
  double epsilon_floor = 0.05;
  std::size_t samples = 5000;  // offline agents
  int max_iter = 20;           // offline agents
};

struct SweepConfig {
  std::vector<std::size_t> k_interval;
  std::vector<double> alpha;
  std::vector<double> beta;
};

struct ExperimentConfig {
  std::string name = "experiment";
  EnvConfig env;
  FeatureConfig features;
  AgentConfig agent;
  std::size_t runs = 1;
  std::size_t episodes = 100;
  std::uint64_t base_seed = 0;
  std::size_t window = 100;
  SweepConfig sweep;
  std::string output_dir = "out";
  std::size_t workers = 1;
};

namespace detail {

inline void reject_unknown(const nlohmann::json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <typename T>
void read(const nlohmann::json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) return;
  if constexpr (std::is_unsigned_v<T> && !std::is_same_v<T, bool>) {
    const auto& v = obj.at(key);
    if (!v.is_number_integer() || v.get<std::int64_t>() < 0) throw ConfigError(where + "." + key + ": expected a non-negative integer");
  }
  try {
    out = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <typename T>
void require(const nlohmann::json& obj, const char* key, T& out, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  read(obj, key, out, where);
}

}  // namespace detail

/// Grid counts per state dimension, broadcasting a single value.
inline std::vector<int> resolve_grid(const FeatureConfig& f, int state_dim) {
  if (f.grid.size() == 1) return std::vector<int>(static_cast<std::size_t>(state_dim), f.grid.front());
  if (f.grid.size() != static_cast<std::size_t>(state_dim))
    throw ConfigError("features.grid: expected 1 or " + std::to_string(state_dim) + " entries");
  return f.grid;
}

inline FeatureMap make_feature_map(const FeatureConfig& f, const EnvSpec& spec) {
  if (f.kind == "polynomial") {
    if (spec.state_dim != 1) throw ConfigError("features: polynomial basis needs a scalar state");
    return FeatureMap::polynomial(f.degree, spec.action_count, spec.state_bounds.front());
  }
  return FeatureMap::rbf_grid(spec.state_bounds, resolve_grid(f, spec.state_dim), spec.action_count,
                              f.include_constant);
}

inline void validate(const ExperimentConfig& c) {
  bool known = false;
  for (const auto& n : environment_names()) known = known || n == c.env.name;
  if (!known) throw ConfigError("env.name: unknown environment '" + c.env.name + "'");
  if (c.env.sparse && c.env.name != "mountain_car") throw ConfigError("env.sparse: only mountain_car has a sparse variant");
  if (c.features.kind != "rbf_grid" && c.features.kind != "polynomial")
    throw ConfigError("features.kind: expected rbf_grid or polynomial");
  if (c.features.kind == "rbf_grid") {
    if (c.features.grid.empty()) throw ConfigError("features.grid: required for rbf_grid");
    for (int g : c.features.grid)
      if (g < 1) throw ConfigError("features.grid: counts must be >= 1");
  }
  if (c.features.degree < 0) throw ConfigError("features.degree: must be >= 0");
  const std::set<std::string> agents{"lspi", "blspi", "rblspi", "online_lspi"};
  if (!agents.count(c.agent.name)) throw ConfigError("agent.name: unknown agent '" + c.agent.name + "'");
  if (c.env.name == "chain_walk") throw ConfigError("env.name: chain_walk is continuing; use the chain report");
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0)) throw ConfigError(std::string(what) + ": must be > 0");
  };
  positive(c.agent.alpha, "agent.alpha");
  positive(c.agent.beta, "agent.beta");
  if (c.agent.k_interval < 1) throw ConfigError("agent.k_interval: must be >= 1");
  for (double e : {c.agent.epsilon0, c.agent.epsilon_floor, c.agent.epsilon_decay})
    if (e < 0.0 || e > 1.0) throw ConfigError("agent.epsilon*: values must lie in [0, 1]");
  if (c.agent.samples < 1) throw ConfigError("agent.samples: must be >= 1");
  if (c.agent.max_iter < 1) throw ConfigError("agent.max_iter: must be >= 1");
  if (c.runs < 1) throw ConfigError("runs: must be >= 1");
  if (c.episodes < 1) throw ConfigError("episodes: must be >= 1");
  if (c.window < 1) throw ConfigError("window: must be >= 1");
  if (c.workers < 1) throw ConfigError("workers: must be >= 1");
  for (auto k : c.sweep.k_interval)
    if (k < 1) throw ConfigError("sweep.k_interval: values must be >= 1");
  for (double a : c.sweep.alpha) positive(a, "sweep.alpha");
  for (double b : c.sweep.beta) positive(b, "sweep.beta");
  const auto env = make_environment(c.env.name, c.env.sparse, 0);
  (void)make_feature_map(c.features, env->spec());
}

inline ExperimentConfig parse_config(const nlohmann::json& j) {
  using detail::read;
  using detail::require;
  detail::reject_unknown(j,
                         {"schema_version", "name", "env", "features", "agent", "runs", "episodes", "base_seed",
                          "window", "sweep", "output_dir", "workers"},
                         "config");
  int version = 0;
  require(j, "schema_version", version, "config");
  if (version != kConfigSchemaVersion)
    throw ConfigError("config: unsupported schema_version " + std::to_string(version));

  ExperimentConfig c;
  read(j, "name", c.name, "config");
  if (!j.contains("env")) throw ConfigError("config: missing required key 'env'");
  const auto& env = j.at("env");
  detail::reject_unknown(env, {"name", "sparse", "seed"}, "env");
  require(env, "name", c.env.name, "env");
  read(env, "sparse", c.env.sparse, "env");
  read(env, "seed", c.env.seed, "env");

  if (!j.contains("features")) throw ConfigError("config: missing required key 'features'");
  const auto& f = j.at("features");
  detail::reject_unknown(f, {"kind", "grid", "include_constant", "degree"}, "features");
  require(f, "kind", c.features.kind, "features");
  read(f, "grid", c.features.grid, "features");
  read(f, "include_constant", c.features.include_constant, "features");
  read(f, "degree", c.features.degree, "features");

  if (!j.contains("agent")) throw ConfigError("config: missing required key 'agent'");
  const auto& a = j.at("agent");
  detail::reject_unknown(a,
                         {"name", "alpha", "beta", "k_interval", "epsilon0", "epsilon_decay", "epsilon_floor",
                          "samples", "max_iter"},
                         "agent");
  require(a, "name", c.agent.name, "agent");
  read(a, "alpha", c.agent.alpha, "agent");
  read(a, "beta", c.agent.beta, "agent");
  read(a, "k_interval", c.agent.k_interval, "agent");
  read(a, "epsilon0", c.agent.epsilon0, "agent");
  read(a, "epsilon_decay", c.agent.epsilon_decay, "agent");
  read(a, "epsilon_floor", c.agent.epsilon_floor, "agent");
  read(a, "samples", c.agent.samples, "agent");
  read(a, "max_iter", c.agent.max_iter, "agent");

  require(j, "runs", c.runs, "config");
  require(j, "episodes", c.episodes, "config");
  read(j, "base_seed", c.base_seed, "config");
  read(j, "window", c.window, "config");
  read(j, "output_dir", c.output_dir, "config");
  read(j, "workers", c.workers, "config");
  if (j.contains("sweep")) {
    const auto& s = j.at("sweep");
    detail::reject_unknown(s, {"k_interval", "alpha", "beta"}, "sweep");
    read(s, "k_interval", c.sweep.k_interval, "sweep");
    read(s, "alpha", c.sweep.alpha, "sweep");
    read(s, "beta", c.sweep.beta, "sweep");
  }
  validate(c);
  return c;
}

inline ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(path + ": invalid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace rblspi
