#pragma once

#include <cstdint>
#include <memory>
#include <string>

#include "mrl/algo/dqn.hpp"
#include "mrl/config.hpp"

namespace mrl::algo {

struct LoadedCheckpoint {
  std::unique_ptr<MultiDqn> algorithm;
  std::string scenario_name;
  uint64_t seed = 0;
  int n_robots = 0;
};

// Format: "MRL1" magic, 4-byte big-endian metadata length, UTF-8 JSON
// metadata {version, n_agents, layer_sizes, n_actions, gamma,
// hyperparameters, scenario_name, seed}, then per-agent little-endian
// 64-bit-float parameter blocks (online then target), layer-major,
// row-major within layers.
void save_checkpoint(const MultiDqn& algorithm, const std::string& scenario_name,
                     const std::string& path);

LoadedCheckpoint load_checkpoint(const std::string& path);

// Robot count / observation width / action count must match the scenario.
void ensure_compatible(const LoadedCheckpoint& ckpt, const ScenarioConfig& scenario);

}  // namespace mrl::algo
