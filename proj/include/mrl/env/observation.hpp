#pragma once

#include <vector>

#include "mrl/sim/world.hpp"

namespace mrl::env {

// Per-robot observation vectors, in robot-id order. With the default lidar
// each vector holds 17 values: [odom_x, odom_y, lidar_0 .. lidar_14].
struct JointObservation {
  std::vector<std::vector<double>> per_robot;

  size_t size() const { return per_robot.size(); }
  bool operator==(const JointObservation&) const = default;
};

// For each robot: read_odometry then cast_lidar, concatenated in that order.
// Consumes lidar noise draws from the world rng (robot id, then ray index).
JointObservation observe(sim::World& world);

}  // namespace mrl::env
