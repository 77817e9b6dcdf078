#pragma once

#include <memory>
#include <string>
#include <vector>

#include "rblspi/env/cart_pole.hpp"
#include "rblspi/env/chain_walk.hpp"
#include "rblspi/env/inverted_pendulum.hpp"
#include "rblspi/env/mountain_car.hpp"
#include "rblspi/env/puddle_world.hpp"

namespace rblspi {

inline const std::vector<std::string>& environment_names() {
  static const std::vector<std::string> names{"chain_walk", "mountain_car", "inverted_pendulum", "cart_pole",
                                              "puddle_world"};
  return names;
}

inline std::unique_ptr<Environment> make_environment(const std::string& name, bool sparse, std::uint64_t seed) {
  if (name == "chain_walk") return std::make_unique<ChainWalk>(seed);
  if (name == "mountain_car") return std::make_unique<MountainCar>(sparse, seed);
  if (name == "inverted_pendulum") return std::make_unique<InvertedPendulum>(seed);
  if (name == "cart_pole") return std::make_unique<CartPole>(seed);
  if (name == "puddle_world") return std::make_unique<PuddleWorld>(seed);
  throw ConfigError("unknown environment '" + name + "'");
}

}  // namespace rblspi
