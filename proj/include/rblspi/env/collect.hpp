#pragma once

#include <vector>

#include "rblspi/env/environment.hpp"

namespace rblspi {

/// n transitions under uniformly random actions. Episodes restart on
/// termination or truncation; continuing tasks yield one unbroken trajectory.
/// Actions are drawn from `rng`, environment noise from the environment's own stream.
inline std::vector<Transition> collect_uniform(Environment& env, std::size_t n, SeededRng& rng) {
  if (n < 1) throw InvalidArgument("collect_uniform: n must be >= 1");
  std::vector<Transition> data;
  data.reserve(n);
  State s = env.reset();
  const auto actions = static_cast<std::size_t>(env.spec().action_count);
  while (data.size() < n) {
    const int a = static_cast<int>(rng.uniform_index(actions));
    StepResult r = env.step(a);
    data.push_back({s, a, r.reward, r.next, r.terminal});
    s = r.done() ? env.reset() : r.next;
  }
  return data;
}

}  // namespace rblspi
