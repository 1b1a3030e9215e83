#pragma once

#include <cstdint>

#include "mrl/audit.hpp"
#include "mrl/config.hpp"
#include "mrl/env/environment.hpp"

namespace mrl::manager {

// What the manager drives: the clean simulator or the perturbed deployment
// stack, both stepped one control cycle at a time.
class Backend {
 public:
  virtual ~Backend() = default;
  virtual env::JointObservation reset(int episode, uint64_t seed) = 0;
  virtual env::StepResult step(const env::JointAction& action) = 0;
  virtual int robot_count() const = 0;
  virtual const ScenarioConfig& scenario() const = 0;
  virtual int64_t world_tick() const = 0;
  virtual void set_audit(CycleAudit* sink) = 0;
};

}  // namespace mrl::manager
