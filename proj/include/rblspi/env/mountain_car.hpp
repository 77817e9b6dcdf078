#pragma once

#include <algorithm>
#include <cmath>

#include "rblspi/env/environment.hpp"

namespace rblspi {

/// Mountain car with state (position, velocity) and throttle actions
/// 0 = reverse, 1 = zero, 2 = forward. The episode ends at position >= 0.5.
/// Dense reward: -1 per step, 0 on the step reaching the goal.
/// Sparse reward: 1 on the step reaching the goal, 0 otherwise.
class MountainCar final : public Environment {
 public:
  static constexpr double kMinPosition = -1.2;
  static constexpr double kMaxPosition = 0.5;
  static constexpr double kMaxSpeed = 0.07;
  static constexpr double kGoal = 0.5;

  explicit MountainCar(bool sparse, std::uint64_t seed = 0) : Environment(seed), sparse_(sparse) {
    spec_.name = sparse ? "sparse_mountain_car" : "mountain_car";
    spec_.state_dim = 2;
    spec_.action_count = 3;
    spec_.discount = 0.99;
    spec_.max_steps = 500;
    spec_.state_bounds = {{kMinPosition, kMaxPosition}, {-kMaxSpeed, kMaxSpeed}};
  }

  const EnvSpec& spec() const override { return spec_; }
  bool sparse() const { return sparse_; }

  static bool is_goal(const State& s) { return s[0] >= kGoal; }

  /// Deterministic dynamics shared by the simulator and tests.
  static State dynamics(const State& s, int action) {
    const double throttle = static_cast<double>(action - 1);
    double v = s[1] + 0.001 * throttle - 0.0025 * std::cos(3.0 * s[0]);
    v = std::clamp(v, -kMaxSpeed, kMaxSpeed);
    double p = std::clamp(s[0] + v, kMinPosition, kMaxPosition);
    if (p <= kMinPosition && v < 0.0) v = 0.0;
    State next(2);
    next << p, v;
    return next;
  }

 protected:
  State sample_start() override {
    State s(2);
    s << rng_.uniform(-0.6, -0.4), 0.0;
    return s;
  }

  StepResult transition(const State& s, int action) override {
    StepResult out;
    // A goal state is absorbing: stepping from it ends the episode in place.
    out.next = is_goal(s) ? s : dynamics(s, action);
    out.terminal = is_goal(out.next);
    out.reached_goal = out.terminal;
    if (sparse_)
      out.reward = out.terminal ? 1.0 : 0.0;
    else
      out.reward = out.terminal ? 0.0 : -1.0;
    return out;
  }

 private:
  bool sparse_;
  EnvSpec spec_;
};

}  // namespace rblspi
