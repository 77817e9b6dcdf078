#pragma once

#include <cstdint>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "rblspi/agents/offline.hpp"
#include "rblspi/env/chain_walk.hpp"
#include "rblspi/env/collect.hpp"
#include "rblspi/harness/csv.hpp"

namespace rblspi {

struct ChainReportConfig {
  std::uint64_t seed = 0;
  std::size_t samples = 5000;
  int degree = 4;
  double alpha = 1e-6;
  double beta = 1.0;
  int max_iter = 20;
};

struct ChainIteration {
  int iteration = 0;
  std::string policy;          // improved policy, one L/R per state
  std::string exact_policy;    // greedy w.r.t. the exact Q of the evaluated policy
  std::vector<double> value;   // approximate V(s) = Q(s, π(s)) of the evaluated policy
  std::vector<double> exact_value;
};

struct ChainTrace {
  std::string algorithm;
  OfflineResult result;
  std::vector<ChainIteration> iterations;
};

struct ChainReport {
  ChainReportConfig config;
  std::vector<ChainTrace> traces;  // lspi, blspi
};

inline std::string policy_string(const std::vector<int>& policy) {
  std::string s;
  for (int a : policy) s += a == ChainWalk::kLeft ? 'L' : 'R';
  return s;
}

inline std::vector<int> optimal_chain_policy() {
  std::vector<int> p(ChainWalk::kStates, ChainWalk::kRight);
  for (int s = 0; s < ChainWalk::kStates / 2; ++s) p[static_cast<std::size_t>(s)] = ChainWalk::kLeft;
  return p;
}

/// Discounted values (I - γP)⁻¹ r of a Markov chain with row-stochastic P.
inline Vector exact_values(const Matrix& p, const Vector& r, double gamma) {
  detail::require_square(p, "exact_values");
  if (p.rows() != r.size()) throw DimensionMismatch("exact_values: dimension mismatch");
  return solve_general(Matrix::Identity(p.rows(), p.cols()) - gamma * p, r);
}

/// Exact V^π(s) = Q^π(s, π(s)) for a chain policy.
inline std::vector<double> exact_chain_values(const std::vector<int>& policy, double gamma = 0.9) {
  const Vector q = exact_values(ChainWalk::policy_transition_matrix(policy), ChainWalk::expected_rewards(), gamma);
  std::vector<double> v;
  for (int s = 0; s < ChainWalk::kStates; ++s) v.push_back(q[2 * s + policy[static_cast<std::size_t>(s)]]);
  return v;
}

inline std::vector<int> exact_greedy(const std::vector<int>& policy, double gamma = 0.9) {
  const Vector q = ChainWalk::exact_q(policy, gamma);
  std::vector<int> out;
  for (int s = 0; s < ChainWalk::kStates; ++s) out.push_back(q[2 * s + 1] > q[2 * s] ? 1 : 0);
  return out;
}

inline std::vector<int> chain_policy(const FeatureMap& fm, const Vector& theta) {
  std::vector<int> p;
  for (int s = 1; s <= ChainWalk::kStates; ++s)
    p.push_back(greedy_action(theta, fm.block(State::Constant(1, s)), fm.action_count()));
  return p;
}

inline ChainTrace trace_chain(const std::string& name, const OfflineResult& r, const FeatureMap& fm) {
  ChainTrace t{name, r, {}};
  for (std::size_t j = 1; j < r.thetas.size(); ++j) {
    const auto evaluated = chain_policy(fm, r.thetas[j - 1]);
    ChainIteration it;
    it.iteration = static_cast<int>(j);
    it.policy = policy_string(chain_policy(fm, r.thetas[j]));
    it.exact_policy = policy_string(exact_greedy(evaluated));
    LinearQPolicy<FeatureMap> q(r.thetas[j], fm);
    for (int s = 1; s <= ChainWalk::kStates; ++s)
      it.value.push_back(q.q(State::Constant(1, s), evaluated[static_cast<std::size_t>(s - 1)]));
    it.exact_value = exact_chain_values(evaluated);
    t.iterations.push_back(std::move(it));
  }
  return t;
}

/// LSPI and BLSPI on one uniformly collected chain-walk batch, starting from "always left".
inline ChainReport chain_walk_report(const ChainReportConfig& cfg) {
  ChainWalk env(SeededRng::derive(cfg.seed, 1).seed());
  SeededRng rng = SeededRng::derive(cfg.seed, 2);
  const auto data = collect_uniform(env, cfg.samples, rng);
  const FeatureMap fm = FeatureMap::polynomial(cfg.degree, 2, env.spec().state_bounds.front());
  Vector start = Vector::Zero(fm.k());
  start[0] = 1.0;  // constant term of the left block
  const double gamma = env.spec().discount;
  ChainReport report{cfg, {}};
  report.traces.push_back(trace_chain("lspi", lspi_offline(data, fm, gamma, start, cfg.max_iter), fm));
  report.traces.push_back(
      trace_chain("blspi", blspi_offline(data, fm, gamma, cfg.alpha, cfg.beta, start, cfg.max_iter), fm));
  return report;
}

inline void print_chain_report(std::ostream& out, const ChainReport& r) {
  for (const auto& t : r.traces) {
    out << t.algorithm << ": " << t.result.iterations << " iterations, "
        << (t.result.converged ? "converged" : "not converged") << '\n';
    for (const auto& it : t.iterations) {
      out << "  iter " << it.iteration << "  approx " << it.policy << "  exact " << it.exact_policy << '\n';
      out << "    V approx:";
      for (double v : it.value) out << ' ' << format_double(std::round(v * 1000.0) / 1000.0);
      out << "\n    V exact: ";
      for (double v : it.exact_value) out << ' ' << format_double(std::round(v * 1000.0) / 1000.0);
      out << '\n';
    }
  }
}

/// Long-form CSV: algorithm, iteration, state, action, exact_action, value, exact_value.
inline std::string chain_report_csv(const ChainReport& r) {
  std::ostringstream out;
  out << "algorithm,iteration,state,action,exact_action,value,exact_value\n";
  for (const auto& t : r.traces)
    for (const auto& it : t.iterations)
      for (std::size_t s = 0; s < it.value.size(); ++s)
        out << t.algorithm << ',' << it.iteration << ',' << s + 1 << ',' << it.policy[s] << ','
            << it.exact_policy[s] << ',' << format_double(it.value[s]) << ',' << format_double(it.exact_value[s])
            << '\n';
  return out.str();
}

}  // namespace rblspi
