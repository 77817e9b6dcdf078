#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <vector>

#include "rblspi/eval.hpp"

namespace rblspi {

struct OfflineResult {
  // thetas[0] is the initial parameter vector, thetas[j] the result of iteration j.
  std::vector<Vector> thetas;
  bool converged = false;
  int iterations = 0;
};

namespace detail {

// Distinct states in the data set, ordered lexicographically.
inline std::vector<State> distinct_states(const std::vector<Transition>& data) {
  auto less = [](const State& x, const State& y) {
    return std::lexicographical_compare(x.data(), x.data() + x.size(), y.data(), y.data() + y.size());
  };
  std::vector<State> states;
  states.reserve(data.size());
  for (const auto& t : data) states.push_back(t.s);
  std::sort(states.begin(), states.end(), less);
  states.erase(std::unique(states.begin(), states.end(), [](const State& x, const State& y) { return x == y; }),
               states.end());
  return states;
}

// Approximate policy iteration over a fixed batch; `evaluate` maps the
// statistics of the current policy to the next parameter vector.
template <BlockFeatureMap F>
OfflineResult policy_iteration(const std::vector<Transition>& data, const F& fm, double gamma,
                               const Vector& initial_theta, int max_iter, double tol,
                               const std::function<Vector(const SufficientStats&)>& evaluate) {
  if (data.empty()) throw InvalidArgument("policy iteration: empty data set");
  if (initial_theta.size() != fm.k()) throw DimensionMismatch("policy iteration: initial theta has wrong dimension");
  if (max_iter < 1) throw InvalidArgument("policy iteration: max_iter must be >= 1");

  std::vector<Vector> blocks, next_blocks;
  blocks.reserve(data.size());
  next_blocks.reserve(data.size());
  for (const auto& t : data) {
    check_action(fm, t.a);
    blocks.push_back(fm.block(t.s));
    next_blocks.push_back(t.terminal ? Vector() : fm.block(t.s_next));
  }
  std::vector<Vector> probes;
  for (const auto& s : distinct_states(data)) probes.push_back(fm.block(s));
  auto greedy_on_probes = [&](const Vector& theta) {
    std::vector<int> actions;
    actions.reserve(probes.size());
    for (const auto& p : probes) actions.push_back(greedy_action(theta, p, fm.action_count()));
    return actions;
  };

  OfflineResult result;
  result.thetas.push_back(initial_theta);
  Vector theta = initial_theta;
  std::vector<int> policy = greedy_on_probes(theta);
  for (int it = 1; it <= max_iter; ++it) {
    SufficientStats stats(fm.k());
    for (std::size_t i = 0; i < data.size(); ++i) {
      const auto& t = data[i];
      const int next_action = t.terminal ? 0 : greedy_action(theta, next_blocks[i], fm.action_count());
      accumulate_blocks(stats, blocks[i], t.a, t.r, next_blocks[i], next_action, t.terminal, gamma);
    }
    Vector next = evaluate(stats);
    std::vector<int> next_policy = greedy_on_probes(next);
    const double change = (next - theta).cwiseAbs().maxCoeff();
    result.thetas.push_back(next);
    result.iterations = it;
    if (next_policy == policy || change < tol) {
      result.converged = true;
      break;
    }
    theta = std::move(next);
    policy = std::move(next_policy);
  }
  return result;
}

}  // namespace detail

/// Offline LSPI: alternate LSTD evaluation with greedy improvement until the
/// greedy policy stops changing on the data set's states, ‖Δθ‖∞ < tol, or max_iter.
template <BlockFeatureMap F>
OfflineResult lspi_offline(const std::vector<Transition>& data, const F& fm, double gamma, const Vector& initial_theta,
                           int max_iter = 20, double tol = 1e-6, double ridge = kDefaultRidge) {
  return detail::policy_iteration(data, fm, gamma, initial_theta, max_iter, tol,
                                  [ridge](const SufficientStats& s) { return lstd_solve(s, ridge); });
}

/// Offline Bayesian LSPI: as lspi_offline with the BLSTD posterior mean as the evaluation.
template <BlockFeatureMap F>
OfflineResult blspi_offline(const std::vector<Transition>& data, const F& fm, double gamma, double alpha, double beta,
                            const Vector& initial_theta, int max_iter = 20, double tol = 1e-6,
                            double ridge = kDefaultRidge) {
  return detail::policy_iteration(data, fm, gamma, initial_theta, max_iter, tol, [=](const SufficientStats& s) {
    return blstd_factor(s, alpha, beta, ridge).m;
  });
}

}  // namespace rblspi
