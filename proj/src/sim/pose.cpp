#include "mrl/sim/pose.hpp"

namespace mrl::sim {

Pose step_kinematics(const Pose& pose, double v, double omega, double dt) {
  Pose out = pose;
  if (std::abs(omega) < 1e-9) {
    out.x += v * dt * std::cos(pose.theta);
    out.y += v * dt * std::sin(pose.theta);
    out.theta = normalize_angle(pose.theta + omega * dt);
    return out;
  }
  const double th1 = pose.theta + omega * dt;
  out.x += (v / omega) * (std::sin(th1) - std::sin(pose.theta));
  out.y += (v / omega) * (std::cos(pose.theta) - std::cos(th1));
  out.theta = normalize_angle(th1);
  return out;
}

}  // namespace mrl::sim
