#pragma once

#include <cstddef>
#include <limits>
#include <memory>
#include <string>
#include <vector>

#include "rblspi/error.hpp"
#include "rblspi/features.hpp"
#include "rblspi/numerics.hpp"

namespace rblspi {

struct EnvSpec {
  std::string name;
  int state_dim = 1;
  int action_count = 1;
  double discount = 0.99;
  // Episode step cap; unlimited for continuing tasks.
  std::size_t max_steps = std::numeric_limits<std::size_t>::max();
  std::vector<Interval> state_bounds;
  bool episodic = true;
  // Balancing tasks count surviving to the step cap as success.
  bool success_at_cap = false;
};

struct Transition {
  State s;
  int a = 0;
  double r = 0.0;
  State s_next;
  bool terminal = false;
};

struct StepResult {
  double reward = 0.0;
  State next;
  bool terminal = false;   // absorbing end of episode
  bool truncated = false;  // step cap reached
  bool reached_goal = false;
  bool done() const { return terminal || truncated; }
};

struct EpisodeLog {
  std::size_t steps = 0;
  double undiscounted_return = 0.0;
  bool reached_goal = false;
};

/// Episodic environment: reset() then step() until done. Each instance owns its
/// random stream; instances are single-owner.
class Environment {
 public:
  explicit Environment(std::uint64_t seed) : rng_(seed) {}
  virtual ~Environment() = default;

  virtual const EnvSpec& spec() const = 0;

  State reset() {
    steps_ = 0;
    done_ = false;
    state_ = sample_start();
    return state_;
  }

  StepResult step(int action) {
    if (done_) throw EpisodeFinished(spec().name + ": step after end of episode");
    if (action < 0 || action >= spec().action_count)
      throw ActionOutOfRange(spec().name + ": action " + std::to_string(action) + " out of range");
    StepResult out = transition(state_, action);
    ++steps_;
    if (!out.terminal && steps_ >= spec().max_steps) out.truncated = true;
    state_ = out.next;
    done_ = out.done();
    return out;
  }

  /// Place the environment in `s` with a fresh episode counter (testing and oracles).
  void set_state(const State& s) {
    if (s.size() != spec().state_dim) throw DimensionMismatch(spec().name + ": state dimension mismatch");
    state_ = s;
    steps_ = 0;
    done_ = false;
  }

  const State& state() const { return state_; }
  std::size_t steps() const { return steps_; }
  bool done() const { return done_; }

 protected:
  virtual State sample_start() = 0;
  virtual StepResult transition(const State& s, int action) = 0;

  SeededRng rng_;

 private:
  State state_;
  std::size_t steps_ = 0;
  bool done_ = true;
};

}  // namespace rblspi
