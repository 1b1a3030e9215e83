#pragma once

namespace mrl::sim {

struct LidarConfig {
  int num_rays = 15;            // evenly spaced over 360 degrees
  double max_range = 5.0;       // meters
  double noise_sigma = 0.02;    // meters, additive Gaussian
  double robot_inflation = 1.5; // other robots' radii scaled for ray tests
};

}  // namespace mrl::sim
