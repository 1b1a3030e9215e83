#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrl/config.hpp"
#include "mrl/rng.hpp"
#include "mrl/sim/lidar.hpp"
#include "mrl/sim/pose.hpp"

namespace mrl::sim {

struct Box {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;

  bool contains(double x, double y) const {
    return x >= min_x && x <= max_x && y >= min_y && y <= max_y;
  }
  bool operator==(const Box&) const = default;
};

struct GoalDisk {
  double cx = 0, cy = 0;
  double radius = 0.3;
  bool operator==(const GoalDisk&) const = default;
};

struct RobotBody {
  int id = 0;
  std::string ns;
  double radius = 0.15;
  Pose pose;                      // ground truth
  Pose odom;                      // drifting estimate, equals pose at reset
  double distance_traveled = 0.0; // meters, monotone within an episode
  bool operator==(const RobotBody&) const = default;
};

struct Twist {
  double v = 0.0;  // m/s
  double w = 0.0;  // rad/s
  bool operator==(const Twist&) const = default;
};

enum class CollisionKind { RobotRobot, RobotObstacle, RobotWall };

struct CollisionEvent {
  CollisionKind kind;
  int a = -1;  // robot id
  int b = -1;  // other robot id / obstacle index / -1 for walls
  bool operator==(const CollisionEvent&) const = default;
  bool operator<(const CollisionEvent& o) const {
    if (kind != o.kind) return kind < o.kind;
    if (a != o.a) return a < o.a;
    return b < o.b;
  }
};

struct World {
  double width = 6.0;
  double height = 4.0;
  std::vector<Box> obstacles;
  std::vector<GoalDisk> goals;
  std::vector<RobotBody> robots;
  LidarConfig lidar;
  double v_max = 0.5;
  double omega_max = 1.5;
  // Per-axis odom noise stddev over a sub-step of displacement d is
  // drift_coeff * sqrt(d): variance grows linearly with distance so the
  // calibration is independent of the sub-step size.
  double drift_coeff = 0.0;
  // Deployment knobs; identity during simulation.
  double actuator_gain = 1.0;
  double lidar_sigma_mult = 1.0;
  double drift_mult = 1.0;
  int64_t tick = 0;        // 20 ms sub-steps since reset
  int64_t clamp_count = 0; // commands clipped to the velocity limits
  Rng rng;

  bool operator==(const World& o) const {
    return width == o.width && height == o.height && obstacles == o.obstacles &&
           goals == o.goals && robots == o.robots && tick == o.tick && rng == o.rng;
  }
};

// drift_coeff so that the mean Euclidean odom error after 1 m of straight
// travel equals mean_err (mean of a 2D Gaussian radius is sigma*sqrt(pi/2)).
inline double drift_coeff_from_mean_error(double mean_err) {
  return mean_err / std::sqrt(M_PI / 2.0);
}

// Places robots at the scenario's start poses (plus jitter when enabled),
// instantiates goals and obstacles, seeds the rng. Deterministic per
// (scenario, seed). Throws ConfigError when start poses collide.
World reset_world(const ScenarioConfig& scenario, uint64_t seed);

// Casts num_rays rays from the robot at headings theta + i*(2pi/num_rays).
// Returns min intersection distances against walls, obstacle boxes and other
// robots (radii * robot_inflation), plus Gaussian noise, clamped to
// [0, max_range]. Noise is drawn from the world rng, one draw per ray.
std::vector<double> cast_lidar(World& world, int robot_id, const LidarConfig& config);
std::vector<double> cast_lidar(World& world, int robot_id);

// Noiseless geometric distance for one ray; +inf when nothing is hit. Other
// robots are inflated by lidar.robot_inflation.
double raycast(const World& world, int robot_id, double heading);

std::pair<double, double> read_odometry(const RobotBody& body);

// Deduplicated, order-independent set of collision events.
std::vector<CollisionEvent> detect_collisions(const World& world);

// True iff the robot's center is within its assigned goal disk (boundary
// inclusive, fixed assignment robot i -> goal i).
bool in_goal(const World& world, int robot_id);

// Advances every robot by one 20 ms sub-step under the given effective
// commands (clamped to the velocity limits; clamping counted). True pose
// integrates actuator_gain * command, odometry integrates the command as
// issued plus drift noise. Returns the collision events after the sub-step.
std::vector<CollisionEvent> substep_world(World& world, const std::vector<Twist>& commands);

const RobotBody& robot_by_id(const World& world, int robot_id);

}  // namespace mrl::sim
