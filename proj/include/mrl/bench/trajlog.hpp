#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mrl/config.hpp"
#include "mrl/env/actions.hpp"
#include "mrl/sim/world.hpp"

namespace mrl::bench {

// Bit-exact trajectory log: per episode, the seed, every joint action and
// every post-cycle pose (doubles stored as hex bit patterns). The full config
// JSON travels with the log so a replay is self-contained.
struct EpisodeLog {
  int episode = 0;
  uint64_t seed = 0;
  std::vector<std::vector<int>> actions;                  // [cycle][robot]
  std::vector<std::vector<sim::Pose>> poses;              // [cycle 0..T][robot]
};

struct TrajectoryLog {
  int version = 1;
  std::string config_json;
  uint64_t base_seed = 0;
  std::vector<EpisodeLog> episodes;
};

void write_trajlog(const TrajectoryLog& log, const std::string& path);
TrajectoryLog read_trajlog(const std::string& path);

struct ReplayOutcome {
  bool ok = true;
  int episodes_checked = 0;
  int first_divergent_episode = -1;
  int64_t first_divergent_cycle = -1;
  std::string message;
};

// Re-executes the logged actions in a fresh environment and compares every
// pose bit for bit.
ReplayOutcome replay_check(const TrajectoryLog& log);

class TrajectoryRecorder {
 public:
  TrajectoryRecorder(std::string config_json, uint64_t base_seed) {
    log_.config_json = std::move(config_json);
    log_.base_seed = base_seed;
  }

  void begin_episode(int episode, uint64_t seed, const sim::World& world);
  void record_cycle(const env::JointAction& action, const sim::World& world_after);
  const TrajectoryLog& log() const { return log_; }

 private:
  TrajectoryLog log_;
};

}  // namespace mrl::bench
