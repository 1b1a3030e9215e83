#include "mrl/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mrl/errors.hpp"

namespace mrl {

using nlohmann::json;

namespace {

struct Diag {
  std::vector<std::string> issues;
  void add(const std::string& s) { issues.push_back(s); }
};

double num_or(const json& j, const char* key, double def, Diag& d, const std::string& at) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number()) {
    d.add(at + "." + key + ": expected a number");
    return def;
  }
  return j[key].get<double>();
}

int int_or(const json& j, const char* key, int def, Diag& d, const std::string& at) {
  if (!j.contains(key)) return def;
  if (!j[key].is_number_integer()) {
    d.add(at + "." + key + ": expected an integer");
    return def;
  }
  return j[key].get<int>();
}

bool bool_or(const json& j, const char* key, bool def, Diag& d, const std::string& at) {
  if (!j.contains(key)) return def;
  if (!j[key].is_boolean()) {
    d.add(at + "." + key + ": expected a boolean");
    return def;
  }
  return j[key].get<bool>();
}

std::string str_or(const json& j, const char* key, const std::string& def, Diag& d,
                   const std::string& at) {
  if (!j.contains(key)) return def;
  if (!j[key].is_string()) {
    d.add(at + "." + key + ": expected a string");
    return def;
  }
  return j[key].get<std::string>();
}

bool pair_of(const json& j, double out[2], Diag& d, const std::string& at) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
    d.add(at + ": expected [x, y]");
    return false;
  }
  out[0] = j[0].get<double>();
  out[1] = j[1].get<double>();
  return true;
}

ScenarioConfig parse_scenario(const json& j, Diag& d) {
  ScenarioConfig sc;
  sc.name = str_or(j, "name", "unnamed", d, "scenario");
  if (j.contains("room")) {
    double wh[2];
    if (pair_of(j["room"], wh, d, "scenario.room")) {
      sc.room_width = wh[0];
      sc.room_height = wh[1];
    }
  }
  sc.robot_radius = num_or(j, "robot_radius", sc.robot_radius, d, "scenario");
  sc.v_max = num_or(j, "v_max", sc.v_max, d, "scenario");
  sc.omega_max = num_or(j, "omega_max", sc.omega_max, d, "scenario");
  sc.odom_mean_err_per_m =
      num_or(j, "odom_mean_err_per_m", sc.odom_mean_err_per_m, d, "scenario");
  sc.start_jitter = num_or(j, "start_jitter", sc.start_jitter, d, "scenario");
  sc.horizon = int_or(j, "horizon", sc.horizon, d, "scenario");

  std::string mode = str_or(j, "action_mode", "discrete", d, "scenario");
  if (mode == "discrete")
    sc.action_mode = ActionMode::Discrete;
  else if (mode == "continuous")
    sc.action_mode = ActionMode::Continuous;
  else
    d.add("scenario.action_mode: 'discrete' or 'continuous', got '" + mode + "'");

  if (j.contains("robots") && j["robots"].is_array()) {
    int idx = 0;
    for (const auto& rj : j["robots"]) {
      RobotConfig rc;
      const std::string at = "scenario.robots[" + std::to_string(idx) + "]";
      rc.ns = str_or(rj, "namespace", "robot_" + std::to_string(idx), d, at);
      if (rj.contains("start")) {
        const auto& s = rj["start"];
        if (s.is_array() && s.size() == 3 && s[0].is_number() && s[1].is_number() &&
            s[2].is_number()) {
          rc.start = {s[0].get<double>(), s[1].get<double>(), s[2].get<double>()};
        } else {
          d.add(at + ".start: expected [x, y, theta]");
        }
      } else {
        d.add(at + ": missing start pose");
      }
      sc.robots.push_back(std::move(rc));
      ++idx;
    }
  } else {
    d.add("scenario.robots: expected a non-empty array");
  }

  if (j.contains("goals") && j["goals"].is_array()) {
    int idx = 0;
    for (const auto& gj : j["goals"]) {
      GoalConfig gc;
      const std::string at = "scenario.goals[" + std::to_string(idx) + "]";
      if (gj.contains("center")) {
        double c[2];
        if (pair_of(gj["center"], c, d, at + ".center")) {
          gc.cx = c[0];
          gc.cy = c[1];
        }
      } else {
        d.add(at + ": missing center");
      }
      gc.radius = num_or(gj, "radius", gc.radius, d, at);
      sc.goals.push_back(gc);
      ++idx;
    }
  } else {
    d.add("scenario.goals: expected an array");
  }

  if (j.contains("obstacles")) {
    if (!j["obstacles"].is_array()) {
      d.add("scenario.obstacles: expected an array");
    } else {
      int idx = 0;
      for (const auto& oj : j["obstacles"]) {
        BoxConfig bc;
        const std::string at = "scenario.obstacles[" + std::to_string(idx) + "]";
        double lo[2], hi[2];
        bool ok = oj.contains("min") && oj.contains("max") &&
                  pair_of(oj["min"], lo, d, at + ".min") &&
                  pair_of(oj["max"], hi, d, at + ".max");
        if (ok) {
          bc.min_x = lo[0];
          bc.min_y = lo[1];
          bc.max_x = hi[0];
          bc.max_y = hi[1];
          sc.obstacles.push_back(bc);
        } else if (!oj.contains("min") || !oj.contains("max")) {
          d.add(at + ": expected min and max corners");
        }
        ++idx;
      }
    }
  }

  if (j.contains("lidar")) {
    const auto& lj = j["lidar"];
    sc.lidar.num_rays = int_or(lj, "num_rays", sc.lidar.num_rays, d, "scenario.lidar");
    sc.lidar.max_range = num_or(lj, "max_range", sc.lidar.max_range, d, "scenario.lidar");
    sc.lidar.noise_sigma =
        num_or(lj, "noise_sigma", sc.lidar.noise_sigma, d, "scenario.lidar");
    sc.lidar.robot_inflation =
        num_or(lj, "robot_inflation", sc.lidar.robot_inflation, d, "scenario.lidar");
  }

  if (j.contains("reward")) {
    const auto& rj = j["reward"];
    std::string bm = str_or(rj, "base_mode", "progress", d, "scenario.reward");
    if (bm == "progress")
      sc.reward.base_mode = BaseRewardMode::Progress;
    else if (bm == "distance_moved")
      sc.reward.base_mode = BaseRewardMode::DistanceMoved;
    else
      d.add("scenario.reward.base_mode: 'progress' or 'distance_moved', got '" + bm + "'");
    sc.reward.base_scale = num_or(rj, "base_scale", sc.reward.base_scale, d, "scenario.reward");
    sc.reward.joint_bonus =
        num_or(rj, "joint_bonus", sc.reward.joint_bonus, d, "scenario.reward");
    sc.reward.individual_bonus =
        num_or(rj, "individual_bonus", sc.reward.individual_bonus, d, "scenario.reward");
    sc.reward.collision_penalty =
        num_or(rj, "collision_penalty", sc.reward.collision_penalty, d, "scenario.reward");
    sc.reward.step_penalty =
        num_or(rj, "step_penalty", sc.reward.step_penalty, d, "scenario.reward");
  }
  return sc;
}

AlgorithmConfig parse_algorithm(const json& j, Diag& d) {
  AlgorithmConfig a;
  a.name = str_or(j, "name", a.name, d, "algorithm");
  if (j.contains("hidden")) {
    if (!j["hidden"].is_array() || j["hidden"].empty()) {
      d.add("algorithm.hidden: expected a non-empty array of layer widths");
    } else {
      a.hidden.clear();
      for (const auto& hj : j["hidden"]) {
        if (!hj.is_number_integer() || hj.get<int>() < 1) {
          d.add("algorithm.hidden: widths must be positive integers");
          a.hidden = {256, 256};
          break;
        }
        a.hidden.push_back(hj.get<int>());
      }
    }
  }
  a.gamma = num_or(j, "gamma", a.gamma, d, "algorithm");
  a.learning_rate = num_or(j, "learning_rate", a.learning_rate, d, "algorithm");
  a.rmsprop_decay = num_or(j, "rmsprop_decay", a.rmsprop_decay, d, "algorithm");
  a.rmsprop_damping = num_or(j, "rmsprop_damping", a.rmsprop_damping, d, "algorithm");
  a.batch_size = int_or(j, "batch_size", a.batch_size, d, "algorithm");
  a.replay_capacity = int_or(j, "replay_capacity", a.replay_capacity, d, "algorithm");
  a.per_alpha = num_or(j, "per_alpha", a.per_alpha, d, "algorithm");
  a.per_beta0 = num_or(j, "per_beta0", a.per_beta0, d, "algorithm");
  a.per_epsilon = num_or(j, "per_epsilon", a.per_epsilon, d, "algorithm");
  a.epsilon_start = num_or(j, "epsilon_start", a.epsilon_start, d, "algorithm");
  a.epsilon_final = num_or(j, "epsilon_final", a.epsilon_final, d, "algorithm");
  a.epsilon_decay_episodes =
      int_or(j, "epsilon_decay_episodes", a.epsilon_decay_episodes, d, "algorithm");
  a.target_sync_steps = int_or(j, "target_sync_steps", a.target_sync_steps, d, "algorithm");
  a.learn_start = int_or(j, "learn_start", a.learn_start, d, "algorithm");
  a.train_every = int_or(j, "train_every", a.train_every, d, "algorithm");
  a.clip_grad_norm = num_or(j, "clip_grad_norm", a.clip_grad_norm, d, "algorithm");
  a.parameter_sharing = bool_or(j, "parameter_sharing", a.parameter_sharing, d, "algorithm");
  return a;
}

TrainingConfig parse_training(const json& j, Diag& d) {
  TrainingConfig t;
  t.episodes = int_or(j, "episodes", t.episodes, d, "training");
  t.checkpoint_every = int_or(j, "checkpoint_every", t.checkpoint_every, d, "training");
  if (j.contains("early_stop")) {
    const auto& ej = j["early_stop"];
    t.early_stop.enabled = bool_or(ej, "enabled", false, d, "training.early_stop");
    t.early_stop.window = int_or(ej, "window", 20, d, "training.early_stop");
    t.early_stop.threshold = num_or(ej, "threshold", 0.8, d, "training.early_stop");
    t.early_stop.metric = str_or(ej, "metric", "per_robot", d, "training.early_stop");
    if (t.early_stop.metric != "per_robot" && t.early_stop.metric != "joint")
      d.add("training.early_stop.metric: 'per_robot' or 'joint'");
  }
  return t;
}

DeployPerturbation parse_deploy(const json& j, Diag& d) {
  DeployPerturbation p;
  p.actuator_gain = num_or(j, "actuator_gain", p.actuator_gain, d, "deploy");
  p.lidar_noise_mult = num_or(j, "lidar_noise_mult", p.lidar_noise_mult, d, "deploy");
  p.odom_drift_mult = num_or(j, "odom_drift_mult", p.odom_drift_mult, d, "deploy");
  if (j.contains("latency_ms")) {
    double lh[2];
    if (pair_of(j["latency_ms"], lh, d, "deploy.latency_ms")) {
      p.latency_lo_ms = lh[0];
      p.latency_hi_ms = lh[1];
    }
  }
  p.start_jitter = num_or(j, "start_jitter", p.start_jitter, d, "deploy");
  return p;
}

void validate_algorithm(const AlgorithmConfig& a, Diag& d) {
  if (a.gamma <= 0.0 || a.gamma > 1.0) d.add("algorithm.gamma must be in (0, 1]");
  if (a.learning_rate <= 0.0) d.add("algorithm.learning_rate must be positive");
  if (a.batch_size < 1) d.add("algorithm.batch_size must be >= 1");
  if (a.replay_capacity < a.batch_size)
    d.add("algorithm.replay_capacity must be >= batch_size");
  if (a.per_alpha < 0.0) d.add("algorithm.per_alpha must be >= 0");
  if (a.per_beta0 <= 0.0 || a.per_beta0 > 1.0) d.add("algorithm.per_beta0 must be in (0, 1]");
  if (a.per_epsilon <= 0.0) d.add("algorithm.per_epsilon must be positive");
  if (a.epsilon_start < 0.0 || a.epsilon_start > 1.0 || a.epsilon_final < 0.0 ||
      a.epsilon_final > a.epsilon_start)
    d.add("algorithm.epsilon schedule must satisfy 0 <= final <= start <= 1");
  if (a.epsilon_decay_episodes < 1) d.add("algorithm.epsilon_decay_episodes must be >= 1");
  if (a.target_sync_steps < 1) d.add("algorithm.target_sync_steps must be >= 1");
  if (a.train_every < 1) d.add("algorithm.train_every must be >= 1");
  if (a.clip_grad_norm < 0.0) d.add("algorithm.clip_grad_norm must be >= 0");
  if (a.learn_start < a.batch_size) d.add("algorithm.learn_start must be >= batch_size");
}

void validate_training(const TrainingConfig& t, Diag& d) {
  if (t.episodes < 0) d.add("training.episodes must be >= 0");
  if (t.checkpoint_every < 1) d.add("training.checkpoint_every must be >= 1");
  if (t.early_stop.window < 1) d.add("training.early_stop.window must be >= 1");
  if (t.early_stop.threshold < 0.0 || t.early_stop.threshold > 1.0)
    d.add("training.early_stop.threshold must be in [0, 1]");
}

void validate_deploy(const DeployPerturbation& p, Diag& d) {
  if (p.actuator_gain <= 0.0) d.add("deploy.actuator_gain must be positive");
  if (p.lidar_noise_mult <= 0.0) d.add("deploy.lidar_noise_mult must be positive");
  if (p.odom_drift_mult <= 0.0) d.add("deploy.odom_drift_mult must be positive");
  if (p.latency_lo_ms < 0.0 || p.latency_hi_ms < p.latency_lo_ms)
    d.add("deploy.latency_ms must satisfy 0 <= lo <= hi");
  if (p.start_jitter < 0.0) d.add("deploy.start_jitter must be >= 0");
}

}  // namespace

std::vector<std::string> validate_scenario(const ScenarioConfig& sc) {
  Diag d;
  if (sc.room_width <= 0.0 || sc.room_height <= 0.0)
    d.add("scenario.room must have positive width and height");
  if (sc.robots.empty()) d.add("scenario needs at least one robot");
  if (sc.goals.size() != sc.robots.size())
    d.add("scenario has " + std::to_string(sc.robots.size()) + " robots but " +
          std::to_string(sc.goals.size()) + " goals (one goal per robot)");
  if (sc.robot_radius <= 0.0) d.add("scenario.robot_radius must be positive");
  if (sc.v_max <= 0.0) d.add("scenario.v_max must be positive");
  if (sc.omega_max <= 0.0) d.add("scenario.omega_max must be positive");
  if (sc.odom_mean_err_per_m < 0.0) d.add("scenario.odom_mean_err_per_m must be >= 0");
  if (sc.start_jitter < 0.0) d.add("scenario.start_jitter must be >= 0");
  if (sc.horizon < 1) d.add("scenario.horizon must be >= 1");
  if (sc.lidar.num_rays < 1) d.add("scenario.lidar.num_rays must be >= 1");
  if (sc.lidar.max_range <= 0.0) d.add("scenario.lidar.max_range must be positive");
  if (sc.lidar.noise_sigma < 0.0) d.add("scenario.lidar.noise_sigma must be >= 0");
  if (sc.lidar.robot_inflation <= 0.0) d.add("scenario.lidar.robot_inflation must be positive");

  const auto& rw = sc.reward;
  if (!(rw.joint_bonus > rw.individual_bonus && rw.individual_bonus > 0.0 &&
        rw.collision_penalty < 0.0))
    d.add("scenario.reward must satisfy joint_bonus > individual_bonus > 0 > collision_penalty");

  for (size_t i = 0; i < sc.obstacles.size(); ++i) {
    const auto& b = sc.obstacles[i];
    const std::string at = "scenario.obstacles[" + std::to_string(i) + "]";
    if (b.min_x >= b.max_x || b.min_y >= b.max_y) d.add(at + ": min corner must be below max");
    if (b.min_x < 0.0 || b.min_y < 0.0 || b.max_x > sc.room_width || b.max_y > sc.room_height)
      d.add(at + ": box extends outside the room");
  }
  for (size_t i = 0; i < sc.goals.size(); ++i) {
    const auto& g = sc.goals[i];
    const std::string at = "scenario.goals[" + std::to_string(i) + "]";
    if (g.radius <= 0.0) d.add(at + ": radius must be positive");
    if (g.cx < 0.0 || g.cx > sc.room_width || g.cy < 0.0 || g.cy > sc.room_height)
      d.add(at + ": center outside the room");
  }

  for (size_t i = 0; i < sc.robots.size(); ++i) {
    const auto& a = sc.robots[i];
    const std::string at = "scenario.robots[" + std::to_string(i) + "]";
    if (a.ns.empty()) d.add(at + ": namespace must be non-empty");
    for (size_t k = i + 1; k < sc.robots.size(); ++k)
      if (a.ns == sc.robots[k].ns)
        d.add("scenario: duplicate namespace '" + a.ns + "'");

    const double r = sc.robot_radius;
    if (a.start.x - r < 0.0 || a.start.x + r > sc.room_width || a.start.y - r < 0.0 ||
        a.start.y + r > sc.room_height)
      d.add(at + ": start pose too close to the walls");
    for (size_t k = i + 1; k < sc.robots.size(); ++k) {
      const auto& b = sc.robots[k];
      const double dx = a.start.x - b.start.x, dy = a.start.y - b.start.y;
      if (dx * dx + dy * dy < 4.0 * r * r)
        d.add(at + ": start pose collides with robot " + std::to_string(k));
    }
    for (size_t k = 0; k < sc.obstacles.size(); ++k) {
      const auto& b = sc.obstacles[k];
      const double px = std::min(std::max(a.start.x, b.min_x), b.max_x);
      const double py = std::min(std::max(a.start.y, b.min_y), b.max_y);
      const double dx = a.start.x - px, dy = a.start.y - py;
      if (dx * dx + dy * dy < r * r)
        d.add(at + ": start pose collides with obstacle " + std::to_string(k));
    }
  }
  return d.issues;
}

BenchConfig parse_config(const std::string& json_text, const std::string& origin) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError({origin + ": " + e.what()});
  }
  Diag d;
  BenchConfig cfg;
  if (!root.contains("scenario") || !root["scenario"].is_object()) {
    d.add(origin + ": missing top-level 'scenario' object");
  } else {
    cfg.scenario = parse_scenario(root["scenario"], d);
  }
  if (root.contains("algorithm")) cfg.algorithm = parse_algorithm(root["algorithm"], d);
  if (root.contains("training")) cfg.training = parse_training(root["training"], d);
  if (root.contains("deploy")) cfg.deploy = parse_deploy(root["deploy"], d);

  if (root.contains("scenario") && root["scenario"].is_object())
    for (const auto& issue : validate_scenario(cfg.scenario)) d.add(issue);
  validate_algorithm(cfg.algorithm, d);
  validate_training(cfg.training, d);
  validate_deploy(cfg.deploy, d);

  if (!d.issues.empty()) throw ConfigError(std::move(d.issues));
  return cfg;
}

BenchConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"missing config file: " + path});
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str(), path);
}

uint64_t fnv1a64(const void* data, size_t len) {
  const auto* p = static_cast<const unsigned char*>(data);
  uint64_t h = 0xcbf29ce484222325ULL;
  for (size_t i = 0; i < len; ++i) {
    h ^= p[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string fnv1a64_hex(const std::string& bytes) {
  uint64_t h = fnv1a64(bytes.data(), bytes.size());
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return std::string(buf);
}

}  // namespace mrl
