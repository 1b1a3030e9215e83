#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "mrl/sim/lidar.hpp"
#include "mrl/sim/pose.hpp"

namespace mrl {

enum class ActionMode { Discrete, Continuous };

enum class BaseRewardMode { Progress, DistanceMoved };

struct RewardConfig {
  BaseRewardMode base_mode = BaseRewardMode::Progress;
  double base_scale = 1.0;          // per meter
  double joint_bonus = 100.0;       // all robots in their goals at once
  double individual_bonus = 10.0;   // first goal entry, once per episode
  double collision_penalty = -1.0;  // per colliding cycle
  double step_penalty = -0.01;
};

struct BoxConfig {
  double min_x = 0, min_y = 0, max_x = 0, max_y = 0;
};

struct GoalConfig {
  double cx = 0, cy = 0;
  double radius = 0.3;
};

struct RobotConfig {
  std::string ns;
  sim::Pose start;
};

struct ScenarioConfig {
  std::string name;
  double room_width = 6.0;
  double room_height = 4.0;
  std::vector<RobotConfig> robots;
  std::vector<GoalConfig> goals;
  std::vector<BoxConfig> obstacles;
  sim::LidarConfig lidar;
  double robot_radius = 0.15;
  double v_max = 0.5;
  double omega_max = 1.5;
  // Mean odometry error after 1 m of travel; the drift model is calibrated
  // from this figure.
  double odom_mean_err_per_m = 0.03;
  double start_jitter = 0.0;  // sigma, meters, drawn from the world rng
  int horizon = 200;
  ActionMode action_mode = ActionMode::Discrete;
  RewardConfig reward;
};

struct EarlyStopConfig {
  bool enabled = false;
  int window = 20;
  double threshold = 0.8;
  // "per_robot": every robot's own success rate must exceed the threshold
  // (the convergence detector); "joint": trailing joint success rate.
  std::string metric = "per_robot";
};

struct AlgorithmConfig {
  std::string name = "multi_dqn";
  std::vector<int> hidden = {256, 256};
  double gamma = 0.99;
  double learning_rate = 3e-4;
  double rmsprop_decay = 0.99;
  double rmsprop_damping = 1e-8;
  int batch_size = 64;
  int replay_capacity = 100000;
  double per_alpha = 0.6;
  double per_beta0 = 0.4;
  double per_epsilon = 1e-3;
  double epsilon_start = 1.0;
  double epsilon_final = 0.05;
  int epsilon_decay_episodes = 500;
  int target_sync_steps = 1000;
  int learn_start = 1000;  // transitions per agent before training begins
  int train_every = 1;     // gradient step every N cycles
  double clip_grad_norm = 0.0;  // global L2 cap per update, 0 disables
  bool parameter_sharing = false;
};

struct TrainingConfig {
  int episodes = 2000;
  int checkpoint_every = 200;
  EarlyStopConfig early_stop;
};

struct DeployPerturbation {
  double actuator_gain = 1.10;
  double lidar_noise_mult = 2.0;
  double odom_drift_mult = 2.0;
  double latency_lo_ms = 0.0;
  double latency_hi_ms = 25.0;
  double start_jitter = 0.05;  // sigma, meters

  static DeployPerturbation identity() {
    return DeployPerturbation{1.0, 1.0, 1.0, 0.0, 0.0, 0.0};
  }
  bool is_identity() const {
    return actuator_gain == 1.0 && lidar_noise_mult == 1.0 && odom_drift_mult == 1.0 &&
           latency_lo_ms == 0.0 && latency_hi_ms == 0.0 && start_jitter == 0.0;
  }
};

struct BenchConfig {
  ScenarioConfig scenario;
  AlgorithmConfig algorithm;
  TrainingConfig training;
  DeployPerturbation deploy;
};

// Parses and validates a config file, reporting all problems at once.
// Throws ConfigError with the full list of diagnostics.
BenchConfig load_config(const std::string& path);
BenchConfig parse_config(const std::string& json_text, const std::string& origin);

// Scenario-level geometry validation; returns diagnostics (empty when valid).
std::vector<std::string> validate_scenario(const ScenarioConfig& sc);

// FNV-1a over the raw config bytes, for run manifests.
uint64_t fnv1a64(const void* data, size_t len);
std::string fnv1a64_hex(const std::string& bytes);

}  // namespace mrl
