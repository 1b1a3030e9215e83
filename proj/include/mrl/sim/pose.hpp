#pragma once

#include <cmath>

namespace mrl::sim {

struct Pose {
  double x = 0.0;
  double y = 0.0;
  double theta = 0.0;  // radians, kept in (-pi, pi]

  bool operator==(const Pose&) const = default;
};

// Normalizes an angle into (-pi, pi].
inline double normalize_angle(double a) {
  double r = std::remainder(a, 2.0 * M_PI);  // [-pi, pi]
  if (r <= -M_PI) r = M_PI;
  return r;
}

// Unicycle update over one interval of constant (v, omega). Uses the exact
// arc solution; falls back to the straight-line limit for tiny |omega|.
// Pure integrator: velocity limits are enforced where commands are applied,
// not here.
Pose step_kinematics(const Pose& pose, double v, double omega, double dt);

}  // namespace mrl::sim
