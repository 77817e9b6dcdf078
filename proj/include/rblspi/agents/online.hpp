#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <optional>
#include <vector>

#include "rblspi/env/environment.hpp"
#include "rblspi/eval.hpp"

namespace rblspi {

struct RblspiOptions {
  double alpha = 0.1;
  double beta = 0.1;
  std::size_t k_interval = 20;
  double ridge = kDefaultRidge;
  // Act greedily on the posterior mean instead of a posterior draw.
  bool sample = true;
  // Starting mean; drawn from N(0, I) when absent.
  std::optional<Vector> initial_mean;
};

/// State of a randomised BLSPI learner. Statistics persist for the whole run;
/// every k_interval collected transitions the posterior is recomputed from
/// scratch and fresh behaviour parameters θ̃ ~ N(m, S) are drawn.
template <BlockFeatureMap F>
class RblspiAgent {
 public:
  RblspiAgent(const F& fm, double gamma, RblspiOptions opts, SeededRng& rng)
      : fm_(&fm), gamma_(gamma), opts_(std::move(opts)), rng_(&rng), stats_(fm.k()) {
    if (opts_.k_interval < 1) throw InvalidArgument("rblspi: K must be >= 1");
    if (!(opts_.alpha > 0.0) || !(opts_.beta > 0.0)) throw InvalidArgument("rblspi: alpha and beta must be > 0");
    if (opts_.initial_mean) {
      if (opts_.initial_mean->size() != fm.k()) throw DimensionMismatch("rblspi: initial mean has wrong dimension");
      mean_ = *opts_.initial_mean;
    } else {
      mean_ = rng.standard_normal(fm.k());
    }
    behaviour_ = mean_;
  }

  int act(const Vector& block) const { return greedy_action(behaviour_, block, fm_->action_count()); }

  /// Record one transition. Returns true when the behaviour parameters were refreshed.
  bool observe(const Vector& block, int action, double reward, const Vector& next_block, bool terminal) {
    const int next_action = terminal ? 0 : greedy_action(mean_, next_block, fm_->action_count());
    accumulate_blocks(stats_, block, action, reward, next_block, next_action, terminal, gamma_);
    ++t_;
    if (t_ % opts_.k_interval != 0) return false;
    try {
      PosteriorFactor post = blstd_factor(stats_, opts_.alpha, opts_.beta, opts_.ridge);
      Vector draw = opts_.sample ? sample_mvn_precision(post.m, post.precision_factor, *rng_) : post.m;
      if (!draw.allFinite()) throw NotPositiveDefinite("rblspi: non-finite posterior draw");
      mean_ = std::move(post.m);
      precision_factor_ = std::move(post.precision_factor);
      behaviour_ = std::move(draw);
      ++updates_;
      return true;
    } catch (const Error&) {
      // Keep the previous policy for one more interval.
      ++failed_updates_;
      return false;
    }
  }

  const SufficientStats& stats() const { return stats_; }
  const Vector& mean() const { return mean_; }
  const Vector& behaviour() const { return behaviour_; }
  /// Posterior covariance of the last successful update (prior α⁻¹I before any).
  Matrix covariance() const {
    if (precision_factor_.size() == 0) return Matrix::Identity(fm_->k(), fm_->k()) / opts_.alpha;
    return PosteriorFactor{mean_, precision_factor_, opts_.alpha, opts_.beta}.covariance();
  }
  std::size_t steps() const { return t_; }
  std::size_t updates() const { return updates_; }
  std::size_t failed_updates() const { return failed_updates_; }
  std::size_t k_interval() const { return opts_.k_interval; }
  void begin_episode(std::size_t) {}
  const F& feature_map() const { return *fm_; }

 private:
  const F* fm_;
  double gamma_;
  RblspiOptions opts_;
  SeededRng* rng_;
  SufficientStats stats_;
  Vector mean_;
  Vector behaviour_;
  Matrix precision_factor_;
  std::size_t t_ = 0;
  std::size_t updates_ = 0;
  std::size_t failed_updates_ = 0;
};

struct EpsilonSchedule {
  double initial = 1.0;
  double decay = 0.997;
  double floor = 0.05;

  double at(std::size_t episode) const {
    return std::clamp(std::max(floor, initial * std::pow(decay, static_cast<double>(episode))), 0.0, 1.0);
  }
};

struct OnlineLspiOptions {
  std::size_t k_interval = 20;
  EpsilonSchedule epsilon;
  double ridge = kDefaultRidge;
  std::optional<Vector> initial_theta;  // zero when absent
};

/// On-policy online LSPI with ε-greedy exploration: θ is refreshed by LSTD
/// every k_interval transitions, and the successor action in the statistics is
/// greedy w.r.t. the current θ.
template <BlockFeatureMap F>
class OnlineLspiAgent {
 public:
  OnlineLspiAgent(const F& fm, double gamma, OnlineLspiOptions opts, SeededRng& rng)
      : fm_(&fm), gamma_(gamma), opts_(std::move(opts)), rng_(&rng), stats_(fm.k()) {
    if (opts_.k_interval < 1) throw InvalidArgument("online_lspi: K must be >= 1");
    for (double e : {opts_.epsilon.initial, opts_.epsilon.floor})
      if (e < 0.0 || e > 1.0) throw InvalidArgument("online_lspi: epsilon values must lie in [0, 1]");
    theta_ = opts_.initial_theta ? *opts_.initial_theta : Vector::Zero(fm.k());
    if (theta_.size() != fm.k()) throw DimensionMismatch("online_lspi: initial theta has wrong dimension");
  }

  void begin_episode(std::size_t episode) { epsilon_ = opts_.epsilon.at(episode); }

  int act(const Vector& block) {
    if (epsilon_ > 0.0 && rng_->uniform() < epsilon_)
      return static_cast<int>(rng_->uniform_index(static_cast<std::size_t>(fm_->action_count())));
    return greedy_action(theta_, block, fm_->action_count());
  }

  bool observe(const Vector& block, int action, double reward, const Vector& next_block, bool terminal) {
    const int next_action = terminal ? 0 : greedy_action(theta_, next_block, fm_->action_count());
    accumulate_blocks(stats_, block, action, reward, next_block, next_action, terminal, gamma_);
    ++t_;
    if (t_ % opts_.k_interval != 0) return false;
    try {
      theta_ = lstd_solve(stats_, opts_.ridge);
      ++updates_;
      return true;
    } catch (const Error&) {
      ++failed_updates_;
      return false;
    }
  }

  const SufficientStats& stats() const { return stats_; }
  const Vector& theta() const { return theta_; }
  double epsilon() const { return epsilon_; }
  std::size_t steps() const { return t_; }
  std::size_t updates() const { return updates_; }
  std::size_t failed_updates() const { return failed_updates_; }

 private:
  const F* fm_;
  double gamma_;
  OnlineLspiOptions opts_;
  SeededRng* rng_;
  SufficientStats stats_;
  Vector theta_;
  double epsilon_ = 0.0;
  std::size_t t_ = 0;
  std::size_t updates_ = 0;
  std::size_t failed_updates_ = 0;
};

/// Drive `agent` for `episodes` episodes. `after_step`, when set, is called
/// after every transition has been observed.
template <BlockFeatureMap F, typename Agent>
std::vector<EpisodeLog> run_episodes(Environment& env, const F& fm, Agent& agent, std::size_t episodes,
                                     const std::function<void(const Agent&)>& after_step = {}) {
  std::vector<EpisodeLog> logs;
  logs.reserve(episodes);
  for (std::size_t ep = 0; ep < episodes; ++ep) {
    agent.begin_episode(ep);
    EpisodeLog log;
    Vector block = fm.block(env.reset());
    for (;;) {
      const int a = agent.act(block);
      StepResult r = env.step(a);
      Vector next = fm.block(r.next);
      agent.observe(block, a, r.reward, next, r.terminal);
      if (after_step) after_step(agent);
      ++log.steps;
      log.undiscounted_return += r.reward;
      if (r.reached_goal || (r.truncated && env.spec().success_at_cap)) log.reached_goal = true;
      if (r.done()) break;
      block = std::move(next);
    }
    logs.push_back(log);
  }
  return logs;
}

/// Randomised BLSPI run; `rng` drives the posterior draws.
template <BlockFeatureMap F>
std::vector<EpisodeLog> rblspi_online(Environment& env, const F& fm, const RblspiOptions& opts,
                                      std::size_t episodes, SeededRng& rng) {
  RblspiAgent<F> agent(fm, env.spec().discount, opts, rng);
  return run_episodes(env, fm, agent, episodes);
}

/// ε-greedy online LSPI baseline; `rng` drives exploration.
template <BlockFeatureMap F>
std::vector<EpisodeLog> online_lspi_baseline(Environment& env, const F& fm, const OnlineLspiOptions& opts,
                                             std::size_t episodes, SeededRng& rng) {
  OnlineLspiAgent<F> agent(fm, env.spec().discount, opts, rng);
  return run_episodes(env, fm, agent, episodes);
}

}  // namespace rblspi
