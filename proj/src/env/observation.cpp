#include "mrl/env/observation.hpp"

namespace mrl::env {

JointObservation observe(sim::World& world) {
  JointObservation obs;
  obs.per_robot.reserve(world.robots.size());
  for (const auto& robot : world.robots) {
    auto [ox, oy] = sim::read_odometry(robot);
    std::vector<double> vec;
    vec.reserve(2 + world.lidar.num_rays);
    vec.push_back(ox);
    vec.push_back(oy);
    for (double r : sim::cast_lidar(world, robot.id)) vec.push_back(r);
    obs.per_robot.push_back(std::move(vec));
  }
  return obs;
}

}  // namespace mrl::env
