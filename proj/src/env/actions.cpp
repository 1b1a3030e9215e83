#include "mrl/env/actions.hpp"

#include "mrl/errors.hpp"

namespace mrl::env {

sim::Twist action_decode(int index) {
  switch (index) {
    case 0: return {0.3, 0.0};
    case 1: return {0.2, 0.6};
    case 2: return {0.2, -0.6};
    case 3: return {0.0, 0.8};
    case 4: return {0.0, -0.8};
    default:
      throw InvalidActionError("discrete action index " + std::to_string(index) +
                               " out of range [0, 4]");
  }
}

std::vector<sim::Twist> JointAction::decode() const {
  if (mode == ActionMode::Continuous) return continuous;
  std::vector<sim::Twist> out;
  out.reserve(discrete.size());
  for (int idx : discrete) out.push_back(action_decode(idx));
  return out;
}

}  // namespace mrl::env
