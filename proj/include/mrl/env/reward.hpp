#pragma once

#include <vector>

#include "mrl/config.hpp"
#include "mrl/sim/world.hpp"

namespace mrl::env {

struct RobotCycleEvents {
  bool collided = false;          // any collision during the cycle
  bool first_goal_entry = false;  // entered its goal for the first time this episode
  bool in_goal = false;           // at cycle end
};

struct CycleEvents {
  std::vector<RobotCycleEvents> per_robot;
  bool success_flipped = false;  // all robots simultaneously in goal, first time
};

// Per robot: base term + step penalty + collision penalty (if colliding this
// cycle) + individual bonus on first goal entry + joint bonus to everyone on
// the cycle where joint success flips true.
std::vector<double> compute_rewards(const sim::World& before, const sim::World& after,
                                    const CycleEvents& events, const RewardConfig& cfg);

}  // namespace mrl::env
