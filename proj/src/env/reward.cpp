#include "mrl/env/reward.hpp"

#include <cmath>

#include "mrl/errors.hpp"

namespace mrl::env {

namespace {
double dist_to_goal(const sim::World& w, size_t i) {
  const auto& r = w.robots[i];
  const auto& g = w.goals[i];
  return std::hypot(r.pose.x - g.cx, r.pose.y - g.cy);
}
}  // namespace

std::vector<double> compute_rewards(const sim::World& before, const sim::World& after,
                                    const CycleEvents& events, const RewardConfig& cfg) {
  const size_t n = after.robots.size();
  if (before.robots.size() != n || events.per_robot.size() != n)
    throw ArityError("compute_rewards: inconsistent robot counts");

  std::vector<double> rewards(n, 0.0);
  for (size_t i = 0; i < n; ++i) {
    double base = 0.0;
    if (cfg.base_mode == BaseRewardMode::Progress) {
      base = cfg.base_scale * (dist_to_goal(before, i) - dist_to_goal(after, i));
    } else {
      base = cfg.base_scale *
             (after.robots[i].distance_traveled - before.robots[i].distance_traveled);
    }
    double r = base + cfg.step_penalty;
    if (events.per_robot[i].collided) r += cfg.collision_penalty;
    if (events.per_robot[i].first_goal_entry) r += cfg.individual_bonus;
    if (events.success_flipped) r += cfg.joint_bonus;
    rewards[i] = r;
  }
  return rewards;
}

}  // namespace mrl::env
