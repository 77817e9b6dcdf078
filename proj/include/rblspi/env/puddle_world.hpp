#pragma once

#include <algorithm>
#include <array>
#include <cmath>

#include "rblspi/env/environment.hpp"

namespace rblspi {

/// Puddle world on [0, 1]². Actions 0..3 = up, down, left, right move 0.05
/// plus N(0, noise²) per dimension, clamped to the square. Reward is -1 per
/// step plus -400 · (0.1 - d) inside a puddle, d the distance to the puddle's
/// centre segment. The goal region is x + y >= 1.9.
class PuddleWorld final : public Environment {
 public:
  static constexpr double kStep = 0.05;
  static constexpr double kNoise = 0.01;
  static constexpr double kRadius = 0.1;
  static constexpr double kPenaltyScale = 400.0;
  static constexpr double kGoalSum = 1.9;

  struct Segment {
    double x0, y0, x1, y1;
  };
  static constexpr std::array<Segment, 2> kPuddles{{{0.10, 0.75, 0.45, 0.75}, {0.45, 0.40, 0.45, 0.80}}};

  explicit PuddleWorld(std::uint64_t seed = 0, double noise = kNoise) : Environment(seed), noise_(noise) {
    spec_.name = "puddle_world";
    spec_.state_dim = 2;
    spec_.action_count = 4;
    spec_.discount = 0.99;
    spec_.max_steps = 500;
    spec_.state_bounds = {{0.0, 1.0}, {0.0, 1.0}};
  }

  const EnvSpec& spec() const override { return spec_; }

  static double segment_distance(double x, double y, const Segment& seg) {
    const double dx = seg.x1 - seg.x0, dy = seg.y1 - seg.y0;
    const double len_sq = dx * dx + dy * dy;
    double t = len_sq > 0.0 ? ((x - seg.x0) * dx + (y - seg.y0) * dy) / len_sq : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    const double px = seg.x0 + t * dx - x, py = seg.y0 + t * dy - y;
    return std::sqrt(px * px + py * py);
  }

  /// Puddle penalty at (x, y): in (-40, 0] inside a puddle, 0 outside. Overlapping
  /// puddles take the deeper penalty.
  static double penalty(double x, double y) {
    double worst = 0.0;
    for (const auto& seg : kPuddles) {
      const double d = segment_distance(x, y, seg);
      if (d < kRadius) worst = std::min(worst, -kPenaltyScale * (kRadius - d));
    }
    return worst;
  }

  static bool in_puddle(double x, double y) { return penalty(x, y) < 0.0; }
  static bool in_goal(const State& s) { return s[0] + s[1] >= kGoalSum; }

 protected:
  State sample_start() override {
    State s(2);
    do {
      s << rng_.uniform(), rng_.uniform();
    } while (in_puddle(s[0], s[1]) || in_goal(s));
    return s;
  }

  StepResult transition(const State& s, int action) override {
    if (in_goal(s)) return {-1.0, s, true, false, true};
    static constexpr std::array<std::array<double, 2>, 4> kMoves{{{0, 1}, {0, -1}, {-1, 0}, {1, 0}}};
    const auto& mv = kMoves[static_cast<std::size_t>(action)];
    double x = s[0] + kStep * mv[0];
    double y = s[1] + kStep * mv[1];
    if (noise_ > 0.0) {
      x += rng_.normal(0.0, noise_);
      y += rng_.normal(0.0, noise_);
    }
    StepResult out;
    out.next = State(2);
    out.next << std::clamp(x, 0.0, 1.0), std::clamp(y, 0.0, 1.0);
    out.reward = -1.0 + penalty(out.next[0], out.next[1]);
    out.terminal = in_goal(out.next);
    out.reached_goal = out.terminal;
    return out;
  }

 private:
  double noise_;
  EnvSpec spec_;
};

}  // namespace rblspi
