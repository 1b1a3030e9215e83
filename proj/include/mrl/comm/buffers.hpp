#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "mrl/clock.hpp"
#include "mrl/sim/world.hpp"

namespace mrl::comm {

struct CommandEnvelope {
  int robot_id = -1;
  std::string ns;
  int64_t cycle_id = 0;
  sim::Twist action;
  int exec_ms = kCycleMs;   // positive multiple of the 20 ms sub-step
  int64_t issue_ms = -1;    // stamped at dispatch
};

// Per-robot FIFO command queues; at most one dispatch per robot per cycle.
class EmitterBuffer {
 public:
  void register_robot(int robot_id, std::string ns);
  size_t robot_count() const { return robots_.size(); }
  const std::string& robot_ns(int robot_id) const;

  // Splits a decoded joint action into per-robot envelopes, FIFO order.
  // Throws ArityError unless one action per registered robot.
  size_t emit(const std::vector<sim::Twist>& actions, int64_t cycle_id);

  // Pops one envelope per non-empty queue, stamped with issue_ms = clock.
  // Dispatched cycle_ids are strictly increasing per robot.
  std::vector<CommandEnvelope> dispatch(int64_t clock_ms);

  size_t queue_size(int robot_id) const;

  // Drops queued envelopes and restarts the per-robot cycle counters; used at
  // episode boundaries.
  void reset_cycles();

  int send_deadline_ms = kSendDeadlineMs;

 private:
  struct Lane {
    std::string ns;
    std::deque<CommandEnvelope> queue;
    int64_t last_emitted_cycle = -1;
    int64_t last_dispatched_cycle = -1;
  };
  std::vector<Lane> robots_;
};

// Robot-side delivery semantics: a command that arrives within the first
// send_deadline ms of the cycle takes effect; otherwise the robot holds its
// previous command (initially zero velocity) or stops, if configured.
class CommandGate {
 public:
  explicit CommandGate(int deadline_ms = kSendDeadlineMs, bool stop_on_miss = false)
      : deadline_ms_(deadline_ms), stop_on_miss_(stop_on_miss) {}

  // cmd == nullptr models an empty queue (nothing dispatched this cycle).
  sim::Twist apply(const CommandEnvelope* cmd, double arrival_in_cycle_ms) {
    if (cmd != nullptr && arrival_in_cycle_ms <= deadline_ms_) {
      held_ = cmd->action;
    } else if (stop_on_miss_) {
      held_ = sim::Twist{0.0, 0.0};
    }
    return held_;
  }

  const sim::Twist& held() const { return held_; }

 private:
  sim::Twist held_{};
  int deadline_ms_;
  bool stop_on_miss_;
};

struct StateRecord {
  int robot_id = -1;
  int64_t cycle_id = 0;
  std::array<double, 2> odom{0.0, 0.0};
  std::vector<double> lidar;
  bool collided = false;
  bool in_goal = false;
};

// Latest-state slot per robot; a gathered joint state holds exactly one
// record per robot, all with the same cycle_id.
class ReceiverBuffer {
 public:
  void register_robot(int robot_id);
  size_t robot_count() const { return slots_.size(); }

  // Stores into the robot's slot. Duplicate (robot, cycle) overwrites and
  // counts a warning. Unregistered robot -> NotFoundError.
  void collect(const StateRecord& state);

  bool complete(int64_t cycle_id) const;
  std::vector<int> missing(int64_t cycle_id) const;

  // Returns states in robot-id order. A missing state is an internal bug in
  // simulation mode; deployment polls complete() under a wall timeout before
  // calling this and raises GatherTimeoutError instead.
  std::vector<StateRecord> gather_joint(int64_t cycle_id) const;

  int warnings() const { return warnings_; }

  int gather_timeout_ms = 200;  // deployment mode only

 private:
  struct Slot {
    bool filled = false;
    StateRecord state;
  };
  std::vector<Slot> slots_;
  int warnings_ = 0;
};

}  // namespace mrl::comm
