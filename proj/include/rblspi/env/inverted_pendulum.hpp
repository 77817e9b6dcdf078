#pragma once

#include <cmath>
#include <numbers>

#include "rblspi/env/environment.hpp"

namespace rblspi {

/// Inverted pendulum on a cart, state (angle, angular velocity). Actions apply
/// -50, 0 or +50 N plus uniform noise in [-10, 10] N. The episode ends with
/// reward -1 once |angle| >= π/2; every other step earns 0.
class InvertedPendulum final : public Environment {
 public:
  static constexpr double kGravity = 9.8;
  static constexpr double kPoleMass = 2.0;
  static constexpr double kCartMass = 8.0;
  static constexpr double kLength = 0.5;
  static constexpr double kDt = 0.1;
  static constexpr double kForce = 50.0;
  static constexpr double kNoise = 10.0;
  static constexpr double kFallAngle = std::numbers::pi / 2.0;
  // Feature normalisation box. States past it are clamped by the feature map.
  static constexpr double kFeatureAngle = std::numbers::pi / 4.0;
  static constexpr double kMaxAngularVelocity = 3.0;

  explicit InvertedPendulum(std::uint64_t seed = 0, double noise = kNoise)
      : Environment(seed), noise_(noise) {
    spec_.name = "inverted_pendulum";
    spec_.state_dim = 2;
    spec_.action_count = 3;
    spec_.discount = 0.95;
    spec_.success_at_cap = true;
    spec_.max_steps = 3000;
    spec_.state_bounds = {{-kFeatureAngle, kFeatureAngle}, {-kMaxAngularVelocity, kMaxAngularVelocity}};
  }

  const EnvSpec& spec() const override { return spec_; }

  static double force_of(int action) { return (action - 1) * kForce; }

  static double angular_acceleration(double theta, double omega, double force) {
    constexpr double a = 1.0 / (kPoleMass + kCartMass);
    const double num = kGravity * std::sin(theta) -
                       a * kPoleMass * kLength * omega * omega * std::sin(2.0 * theta) / 2.0 -
                       a * std::cos(theta) * force;
    const double den = 4.0 * kLength / 3.0 - a * kPoleMass * kLength * std::cos(theta) * std::cos(theta);
    return num / den;
  }

  /// One explicit Euler step of length dt under a constant force.
  static State euler(const State& s, double force, double dt = kDt) {
    const double acc = angular_acceleration(s[0], s[1], force);
    State next(2);
    next << s[0] + dt * s[1], s[1] + dt * acc;
    return next;
  }

  static bool fallen(const State& s) { return std::abs(s[0]) >= kFallAngle; }

 protected:
  // Episodes start upright and at rest; the actuation noise supplies the variety.
  State sample_start() override { return State::Zero(2); }

  StepResult transition(const State& s, int action) override {
    const double force = force_of(action) + (noise_ > 0.0 ? rng_.uniform(-noise_, noise_) : 0.0);
    StepResult out;
    out.next = fallen(s) ? s : euler(s, force);
    out.terminal = fallen(out.next);
    out.reward = out.terminal ? -1.0 : 0.0;
    return out;
  }

 private:
  double noise_;
  EnvSpec spec_;
};

}  // namespace rblspi
