#pragma once

#include <cmath>
#include <numbers>

#include "rblspi/env/environment.hpp"

namespace rblspi {

/// Cart pole, state (position, velocity, angle, angular velocity); actions
/// push with -10 N (0) or +10 N (1). Failure when |angle| >= π/6 or
/// |position| >= 2.4. Reward +1 per step that does not fail, 0 on failure.
class CartPole final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kCartMass = 1.0;
  static constexpr double kPoleMass = 0.1;
  static constexpr double kHalfLength = 0.5;
  static constexpr double kForce = 10.0;
  static constexpr double kDt = 0.02;
  static constexpr double kTrack = 2.4;
  static constexpr double kFailAngle = std::numbers::pi / 6.0;
  // Velocity ranges used only to normalise features.
  static constexpr double kVelocityRange = 3.0;
  static constexpr double kAngularVelocityRange = 4.0;

  explicit CartPole(std::uint64_t seed = 0) : Environment(seed) {
    spec_.name = "cart_pole";
    spec_.state_dim = 4;
    spec_.action_count = 2;
    spec_.discount = 0.99;
    spec_.success_at_cap = true;
    spec_.max_steps = 500;
    spec_.state_bounds = {{-kTrack, kTrack},
                          {-kVelocityRange, kVelocityRange},
                          {-kFailAngle, kFailAngle},
                          {-kAngularVelocityRange, kAngularVelocityRange}};
  }

  const EnvSpec& spec() const override { return spec_; }

  /// Returns (ẍ, θ̈).
  static std::pair<double, double> accelerations(const State& s, double force) {
    constexpr double total = kCartMass + kPoleMass;
    const double theta = s[2], omega = s[3];
    const double cos_t = std::cos(theta), sin_t = std::sin(theta);
    const double temp = (force + kPoleMass * kHalfLength * omega * omega * sin_t) / total;
    const double theta_acc =
        (kGravity * sin_t - cos_t * temp) /
        (kHalfLength * (4.0 / 3.0 - kPoleMass * cos_t * cos_t / total));
    const double x_acc = temp - kPoleMass * kHalfLength * theta_acc * cos_t / total;
    return {x_acc, theta_acc};
  }

  static State euler(const State& s, double force, double dt = kDt) {
    const auto [x_acc, theta_acc] = accelerations(s, force);
    State next(4);
    next << s[0] + dt * s[1], s[1] + dt * x_acc, s[2] + dt * s[3], s[3] + dt * theta_acc;
    return next;
  }

  static bool failed(const State& s) { return std::abs(s[2]) >= kFailAngle || std::abs(s[0]) >= kTrack; }

 protected:
  State sample_start() override {
    State s(4);
    for (int i = 0; i < 4; ++i) s[i] = rng_.uniform(-0.05, 0.05);
    return s;
  }

  StepResult transition(const State& s, int action) override {
    StepResult out;
    out.next = failed(s) ? s : euler(s, action == 1 ? kForce : -kForce);
    out.terminal = failed(out.next);
    out.reward = out.terminal ? 0.0 : 1.0;
    return out;
  }

 private:
  EnvSpec spec_;
};

}  // namespace rblspi
