#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mrl/audit.hpp"
#include "mrl/comm/buffers.hpp"
#include "mrl/config.hpp"
#include "mrl/env/actions.hpp"
#include "mrl/env/observation.hpp"
#include "mrl/env/reward.hpp"
#include "mrl/rng.hpp"
#include "mrl/sim/world.hpp"

namespace mrl::env {

struct StepResult {
  JointObservation obs;
  std::vector<double> rewards;
  bool done = false;
  bool success = false;
  CycleEvents events;
  int64_t cycle = 0;
};

bool is_success(const sim::World& world);

// Joint MDP over the simulator. step() routes actions through the comm layer
// (emit -> dispatch -> gate -> five 20 ms sub-steps -> gather); the plant
// side of the deployment backend drives execute_cycle() directly with the
// commands that arrived over the wire.
class Env {
 public:
  explicit Env(ScenarioConfig scenario,
               DeployPerturbation perturbation = DeployPerturbation::identity(),
               uint64_t perturbation_seed = 0);

  JointObservation reset(uint64_t seed);
  StepResult step(const JointAction& action);
  StepResult execute_cycle(const std::vector<sim::Twist>& effective_commands);

  const sim::World& world() const { return world_; }
  sim::World& mutable_world() { return world_; }
  const ScenarioConfig& scenario() const { return scenario_; }
  const comm::ReceiverBuffer& receiver() const { return receiver_; }
  std::vector<comm::StateRecord> last_states() const;

  bool done() const { return done_; }
  bool success() const { return success_; }
  int steps() const { return steps_; }
  int64_t cycle() const { return steps_; }
  int robot_count() const { return static_cast<int>(scenario_.robots.size()); }
  int obs_dim() const { return 2 + scenario_.lidar.num_rays; }

  void set_audit(CycleAudit* sink) { audit_ = sink; }

 private:
  void mark(CycleStage stage) {
    if (audit_ != nullptr) audit_->push_back(stage);
  }

  ScenarioConfig scenario_;
  DeployPerturbation perturbation_;
  Rng perturbation_rng_;
  sim::World world_;
  comm::EmitterBuffer emitter_;
  comm::ReceiverBuffer receiver_;
  std::vector<comm::CommandGate> gates_;
  std::vector<bool> entered_goal_;
  int steps_ = 0;
  bool done_ = false;
  bool success_ = false;
  bool was_reset_ = false;
  CycleAudit* audit_ = nullptr;
};

}  // namespace mrl::env
