#include "mrl/sim/world.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mrl/clock.hpp"
#include "mrl/errors.hpp"

namespace mrl::sim {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

// Nearest positive hit of a ray against one axis-aligned wall segment.
double ray_vs_walls(double x, double y, double dx, double dy, double w, double h) {
  double best = kInf;
  if (dx != 0.0) {
    for (double wall_x : {0.0, w}) {
      double t = (wall_x - x) / dx;
      if (t > 0.0) {
        double hit_y = y + t * dy;
        if (hit_y >= 0.0 && hit_y <= h) best = std::min(best, t);
      }
    }
  }
  if (dy != 0.0) {
    for (double wall_y : {0.0, h}) {
      double t = (wall_y - y) / dy;
      if (t > 0.0) {
        double hit_x = x + t * dx;
        if (hit_x >= 0.0 && hit_x <= w) best = std::min(best, t);
      }
    }
  }
  return best;
}

// Slab test; returns entry distance, 0 when the origin is inside.
double ray_vs_box(double x, double y, double dx, double dy, const Box& b) {
  double tmin = -kInf, tmax = kInf;
  if (dx == 0.0) {
    if (x < b.min_x || x > b.max_x) return kInf;
  } else {
    double t1 = (b.min_x - x) / dx;
    double t2 = (b.max_x - x) / dx;
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
  }
  if (dy == 0.0) {
    if (y < b.min_y || y > b.max_y) return kInf;
  } else {
    double t1 = (b.min_y - y) / dy;
    double t2 = (b.max_y - y) / dy;
    if (t1 > t2) std::swap(t1, t2);
    tmin = std::max(tmin, t1);
    tmax = std::min(tmax, t2);
  }
  if (tmax < tmin || tmax < 0.0) return kInf;
  return tmin > 0.0 ? tmin : 0.0;
}

double ray_vs_circle(double x, double y, double dx, double dy, double cx, double cy,
                     double r) {
  const double lx = cx - x, ly = cy - y;
  const double proj = lx * dx + ly * dy;
  const double disc = proj * proj - (lx * lx + ly * ly - r * r);
  if (disc < 0.0) return kInf;
  const double root = std::sqrt(disc);
  const double t1 = proj - root;
  if (t1 > 0.0) return t1;
  const double t2 = proj + root;
  if (t2 > 0.0) return t2;  // origin inside the circle
  return kInf;
}

double dist2_point_box(double x, double y, const Box& b) {
  const double px = clamp(x, b.min_x, b.max_x);
  const double py = clamp(y, b.min_y, b.max_y);
  const double dx = x - px, dy = y - py;
  return dx * dx + dy * dy;
}

}  // namespace

const RobotBody& robot_by_id(const World& world, int robot_id) {
  if (robot_id < 0 || robot_id >= static_cast<int>(world.robots.size()))
    throw NotFoundError("unknown robot id " + std::to_string(robot_id));
  return world.robots[robot_id];
}

World reset_world(const ScenarioConfig& scenario, uint64_t seed) {
  auto issues = validate_scenario(scenario);
  if (!issues.empty()) throw ConfigError(std::move(issues));

  World w;
  w.width = scenario.room_width;
  w.height = scenario.room_height;
  for (const auto& b : scenario.obstacles)
    w.obstacles.push_back(Box{b.min_x, b.min_y, b.max_x, b.max_y});
  for (const auto& g : scenario.goals) w.goals.push_back(GoalDisk{g.cx, g.cy, g.radius});
  w.lidar = scenario.lidar;
  w.v_max = scenario.v_max;
  w.omega_max = scenario.omega_max;
  w.drift_coeff = drift_coeff_from_mean_error(scenario.odom_mean_err_per_m);
  w.rng.reseed(seed);
  w.tick = 0;

  int id = 0;
  for (const auto& rc : scenario.robots) {
    RobotBody body;
    body.id = id++;
    body.ns = rc.ns;
    body.radius = scenario.robot_radius;
    body.pose = rc.start;
    if (scenario.start_jitter > 0.0) {
      body.pose.x += w.rng.normal(0.0, scenario.start_jitter);
      body.pose.y += w.rng.normal(0.0, scenario.start_jitter);
    }
    body.pose.theta = normalize_angle(body.pose.theta);
    body.odom = body.pose;
    body.distance_traveled = 0.0;
    w.robots.push_back(std::move(body));
  }

  if (!detect_collisions(w).empty())
    throw ConfigError({"scenario '" + scenario.name + "': start poses collide"});
  return w;
}

double raycast(const World& world, int robot_id, double heading) {
  const RobotBody& self = robot_by_id(world, robot_id);
  const double x = self.pose.x, y = self.pose.y;
  const double dx = std::cos(heading), dy = std::sin(heading);

  double best = ray_vs_walls(x, y, dx, dy, world.width, world.height);
  for (const auto& box : world.obstacles)
    best = std::min(best, ray_vs_box(x, y, dx, dy, box));
  for (const auto& other : world.robots) {
    if (other.id == robot_id) continue;
    best = std::min(best, ray_vs_circle(x, y, dx, dy, other.pose.x, other.pose.y,
                                        other.radius * world.lidar.robot_inflation));
  }
  return best;
}

std::vector<double> cast_lidar(World& world, int robot_id, const LidarConfig& config) {
  const RobotBody& self = robot_by_id(world, robot_id);
  const double sigma = config.noise_sigma * world.lidar_sigma_mult;
  std::vector<double> readings(config.num_rays);
  for (int i = 0; i < config.num_rays; ++i) {
    const double heading = self.pose.theta + i * (2.0 * M_PI / config.num_rays);
    const double d = raycast(world, robot_id, heading);
    const double noise = sigma * world.rng.normal();
    readings[i] = clamp(d + noise, 0.0, config.max_range);
  }
  return readings;
}

std::vector<double> cast_lidar(World& world, int robot_id) {
  return cast_lidar(world, robot_id, world.lidar);
}

std::pair<double, double> read_odometry(const RobotBody& body) {
  return {body.odom.x, body.odom.y};
}

std::vector<CollisionEvent> detect_collisions(const World& world) {
  std::vector<CollisionEvent> events;
  const int n = static_cast<int>(world.robots.size());
  for (int i = 0; i < n; ++i) {
    const auto& a = world.robots[i];
    for (int j = i + 1; j < n; ++j) {
      const auto& b = world.robots[j];
      const double dx = a.pose.x - b.pose.x, dy = a.pose.y - b.pose.y;
      const double rr = a.radius + b.radius;
      if (dx * dx + dy * dy < rr * rr)
        events.push_back({CollisionKind::RobotRobot, std::min(a.id, b.id),
                          std::max(a.id, b.id)});
    }
    for (int k = 0; k < static_cast<int>(world.obstacles.size()); ++k) {
      if (dist2_point_box(a.pose.x, a.pose.y, world.obstacles[k]) < a.radius * a.radius)
        events.push_back({CollisionKind::RobotObstacle, a.id, k});
    }
    if (a.pose.x - a.radius < 0.0 || a.pose.x + a.radius > world.width ||
        a.pose.y - a.radius < 0.0 || a.pose.y + a.radius > world.height)
      events.push_back({CollisionKind::RobotWall, a.id, -1});
  }
  std::sort(events.begin(), events.end());
  return events;
}

bool in_goal(const World& world, int robot_id) {
  const RobotBody& r = robot_by_id(world, robot_id);
  const GoalDisk& g = world.goals.at(robot_id);
  const double dx = r.pose.x - g.cx, dy = r.pose.y - g.cy;
  return dx * dx + dy * dy <= g.radius * g.radius;
}

std::vector<CollisionEvent> substep_world(World& world, const std::vector<Twist>& commands) {
  if (commands.size() != world.robots.size())
    throw ArityError("substep: " + std::to_string(commands.size()) + " commands for " +
                     std::to_string(world.robots.size()) + " robots");
  for (size_t i = 0; i < world.robots.size(); ++i) {
    RobotBody& r = world.robots[i];
    const double v_cmd = clamp(commands[i].v, -world.v_max, world.v_max);
    const double w_cmd = clamp(commands[i].w, -world.omega_max, world.omega_max);
    if (v_cmd != commands[i].v || w_cmd != commands[i].w) ++world.clamp_count;

    const double v_exec = world.actuator_gain * v_cmd;
    const double w_exec = world.actuator_gain * w_cmd;
    r.pose = step_kinematics(r.pose, v_exec, w_exec, kSubstepDt);

    // Odometry believes the command as issued; noise variance scales with the
    // commanded displacement.
    Pose odom_next = step_kinematics(r.odom, v_cmd, w_cmd, kSubstepDt);
    const double d = std::abs(v_cmd) * kSubstepDt;
    const double sigma = world.drift_coeff * world.drift_mult * std::sqrt(d);
    odom_next.x += sigma * world.rng.normal();
    odom_next.y += sigma * world.rng.normal();
    r.odom = odom_next;

    r.distance_traveled += std::abs(v_exec) * kSubstepDt;
  }
  ++world.tick;
  return detect_collisions(world);
}

}  // namespace mrl::sim
