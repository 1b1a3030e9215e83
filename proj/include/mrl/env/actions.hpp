#pragma once

#include <vector>

#include "mrl/config.hpp"
#include "mrl/sim/world.hpp"

namespace mrl::env {

inline constexpr int kNumDiscreteActions = 5;

// Fixed speed-controller table:
//   0 forward, 1 arc-left, 2 arc-right, 3 spin-left, 4 spin-right.
sim::Twist action_decode(int index);

struct JointAction {
  ActionMode mode = ActionMode::Discrete;
  std::vector<int> discrete;
  std::vector<sim::Twist> continuous;

  static JointAction from_discrete(std::vector<int> idx) {
    JointAction a;
    a.mode = ActionMode::Discrete;
    a.discrete = std::move(idx);
    return a;
  }
  static JointAction from_continuous(std::vector<sim::Twist> tw) {
    JointAction a;
    a.mode = ActionMode::Continuous;
    a.continuous = std::move(tw);
    return a;
  }

  size_t size() const {
    return mode == ActionMode::Discrete ? discrete.size() : continuous.size();
  }

  std::vector<sim::Twist> decode() const;
};

}  // namespace mrl::env
