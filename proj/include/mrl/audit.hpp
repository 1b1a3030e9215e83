#pragma once

#include <vector>

namespace mrl {

// One control cycle, in the fixed order the orchestrator must follow.
enum class CycleStage {
  ReceiveState,
  SelectAction,
  Emit,
  Execute,
  Gather,
  Reward,
  Store,
  Train,
};

using CycleAudit = std::vector<CycleStage>;

}  // namespace mrl
