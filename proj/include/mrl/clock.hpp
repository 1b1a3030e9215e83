#pragma once

namespace mrl {

// One shared clock for physics and comm: 20 ms sub-steps, commands dispatched
// within the first 20 ms of each 100 ms control cycle.
inline constexpr int kSubstepMs = 20;
inline constexpr int kCycleMs = 100;
inline constexpr int kSubstepsPerCycle = kCycleMs / kSubstepMs;
inline constexpr double kSubstepDt = kSubstepMs / 1000.0;
inline constexpr int kSendDeadlineMs = 20;

}  // namespace mrl
