#pragma once

#include <array>
#include <vector>

#include "rblspi/env/environment.hpp"

namespace rblspi {

/// 20-state chain with dead-end boundaries. Actions: 0 = left, 1 = right.
/// An action moves the intended way with probability 0.9, the opposite way
/// otherwise. Acting in state 1 or 20 earns +1, every other state 0.
/// States are 1-based; the state vector holds the index as a double.
class ChainWalk final : public Environment {
 public:
  static constexpr int kStates = 20;
  static constexpr int kLeft = 0;
  static constexpr int kRight = 1;
  static constexpr double kSuccess = 0.9;

  struct Outcome {
    int next;
    double probability;
    double reward;
  };

  explicit ChainWalk(std::uint64_t seed = 0) : Environment(seed) {
    spec_.name = "chain_walk";
    spec_.state_dim = 1;
    spec_.action_count = 2;
    spec_.discount = 0.9;
    spec_.state_bounds = {{1.0, static_cast<double>(kStates)}};
    spec_.episodic = false;
  }

  const EnvSpec& spec() const override { return spec_; }

  static int move(int state, int direction) {
    const int next = state + (direction == kLeft ? -1 : 1);
    return next < 1 ? 1 : (next > kStates ? kStates : next);
  }

  static double reward_at(int state) { return (state == 1 || state == kStates) ? 1.0 : 0.0; }

  /// Exact transition model for (state, action).
  static std::array<Outcome, 2> outcomes(int state, int action) {
    const int ok = move(state, action);
    const int slip = move(state, 1 - action);
    return {{{ok, kSuccess, reward_at(state)}, {slip, 1.0 - kSuccess, reward_at(state)}}};
  }

  /// Row-stochastic P over (state, action) pairs for a deterministic policy,
  /// index (s - 1) * 2 + a. policy[s - 1] is the action at state s.
  static Matrix policy_transition_matrix(const std::vector<int>& policy) {
    Matrix p = Matrix::Zero(2 * kStates, 2 * kStates);
    for (int s = 1; s <= kStates; ++s)
      for (int a = 0; a < 2; ++a)
        for (const auto& o : outcomes(s, a)) {
          const int next_action = policy[static_cast<std::size_t>(o.next - 1)];
          p((s - 1) * 2 + a, (o.next - 1) * 2 + next_action) += o.probability;
        }
    return p;
  }

  /// Expected immediate reward per (state, action) pair.
  static Vector expected_rewards() {
    Vector r = Vector::Zero(2 * kStates);
    for (int s = 1; s <= kStates; ++s)
      for (int a = 0; a < 2; ++a)
        for (const auto& o : outcomes(s, a)) r[(s - 1) * 2 + a] += o.probability * o.reward;
    return r;
  }

  /// Q^π = (I - γ P^π)⁻¹ R by a dense solve.
  static Vector exact_q(const std::vector<int>& policy, double gamma = 0.9) {
    const Matrix p = policy_transition_matrix(policy);
    const Matrix m = Matrix::Identity(2 * kStates, 2 * kStates) - gamma * p;
    return m.partialPivLu().solve(expected_rewards());
  }

 protected:
  State sample_start() override {
    State s(1);
    s[0] = static_cast<double>(1 + rng_.uniform_index(kStates));
    return s;
  }

  StepResult transition(const State& s, int action) override {
    const int state = static_cast<int>(s[0]);
    const int direction = rng_.uniform() < kSuccess ? action : 1 - action;
    const int next = move(state, direction);
    StepResult out;
    out.next = State::Constant(1, static_cast<double>(next));
    out.reward = reward_at(state);
    return out;
  }

 private:
  EnvSpec spec_;
};

}  // namespace rblspi
