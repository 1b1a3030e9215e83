#pragma once

#include <cstdint>
#include <string>

#include "mrl/clock.hpp"
#include "mrl/comm/buffers.hpp"
#include "mrl/comm/channel.hpp"
#include "mrl/comm/protocol.hpp"
#include "mrl/rng.hpp"

namespace mrl::comm {

// One robot's onboard side of the control plane. Registers with the manager
// and the plant, then relays: COMMANDs from the manager pass through the
// delivery gate (seeded latency draw against the 20 ms send deadline, hold
// previous on a miss) before reaching the plant; STATEs from the plant are
// forwarded up. Runs as a separate process in deploy mode or pumped in-process.
class RobotEndpoint {
 public:
  struct Options {
    int robot_id = 0;
    std::string ns;
    uint64_t seed = 0;
    double latency_lo_ms = 0.0;
    double latency_hi_ms = 0.0;
    int deadline_ms = kSendDeadlineMs;
    bool stop_on_miss = false;
  };

  RobotEndpoint(Options options, ByteChannel& manager_ch, ByteChannel& plant_ch);

  // Drains pending input from both channels. Returns false once SHUTDOWN has
  // been processed.
  bool pump();

  // Blocking loop for process mode; returns on SHUTDOWN or closed peer.
  void run();

  bool finished() const { return finished_; }
  int64_t commands_seen() const { return commands_seen_; }
  int64_t commands_missed() const { return commands_missed_; }

 private:
  void handle_manager(const WireMessage& msg);
  void handle_plant(const WireMessage& msg);

  Options opt_;
  ByteChannel& manager_ch_;
  ByteChannel& plant_ch_;
  FrameParser manager_parser_;
  FrameParser plant_parser_;
  CommandGate gate_;
  Rng latency_rng_;
  bool finished_ = false;
  int64_t commands_seen_ = 0;
  int64_t commands_missed_ = 0;
};

}  // namespace mrl::comm
