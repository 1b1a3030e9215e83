#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "mrl/algo/dqn.hpp"
#include "mrl/audit.hpp"
#include "mrl/config.hpp"
#include "mrl/manager/backend.hpp"
#include "mrl/manager/convergence.hpp"
#include "mrl/manager/registry.hpp"

namespace mrl::manager {

enum class RunMode { SimTrain, SimEval, Deploy };

struct EpisodeRecord {
  int episode = 0;
  std::vector<double> returns;       // per robot
  int steps = 0;
  bool success = false;              // all robots in goals at some cycle
  std::vector<char> robot_success;   // in own goal when the episode ended
  double epsilon = 0.0;
  double wall_sec = 0.0;
  std::string failure;               // non-empty when the episode aborted
};

struct TrainingResult {
  std::vector<EpisodeRecord> records;
  std::vector<double> trail20;       // trailing joint success rate per episode
  int episodes_run = 0;
  int convergence_episode = -1;      // first episode the detector fired, -1 if never
  bool stopped_early = false;
};

struct EvaluationResult {
  std::vector<EpisodeRecord> records;
  int successes = 0;
  double success_rate = 0.0;
};

// The central orchestrator: owns the episode loop and the per-cycle order of
// Fig-style operation (state -> action -> emit -> execute -> gather ->
// reward -> store/train).
class Manager {
 public:
  Manager(RunMode mode, Backend& backend, algo::Algorithm* algorithm);

  struct EpisodeContext {
    env::JointObservation obs;
    int episode = 0;
    double epsilon = 0.0;
    bool train = false;
    int cycles = 0;
  };

  // Exactly one control cycle in the fixed order; audited.
  env::StepResult run_cycle(EpisodeContext& ctx);

  EpisodeRecord run_episode(int episode_index, uint64_t seed, double epsilon, bool train);

  // Up to cfg.episodes episodes with per-episode callbacks; early stopping per
  // cfg.early_stop (the convergence detector is computed and logged each
  // episode regardless).
  using EpisodeCallback =
      std::function<void(const EpisodeRecord&, double trail20, bool converged)>;
  TrainingResult run_training(const TrainingConfig& cfg, uint64_t base_seed,
                              const EpisodeCallback& on_episode = nullptr);

  // Greedy policy, no learning; episodes must be >= 1.
  EvaluationResult run_evaluation(int episodes, uint64_t base_seed);

  RunMode mode() const { return mode_; }
  const CycleAudit& last_audit() const { return audit_; }
  int64_t audit_violations() const { return audit_violations_; }
  int64_t transitions_stored() const { return transitions_stored_; }

  // Fixed cycle order with store/train only in SimTrain mode.
  static bool audit_order_ok(const CycleAudit& audit, bool train_mode);

 private:
  RunMode mode_;
  Backend& backend_;
  algo::Algorithm* algorithm_;
  CycleAudit audit_;
  int64_t audit_violations_ = 0;
  int64_t transitions_stored_ = 0;
  int64_t cycle_counter_ = 0;
};

}  // namespace mrl::manager
