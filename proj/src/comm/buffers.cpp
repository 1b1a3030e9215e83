#include "mrl/comm/buffers.hpp"

#include "mrl/errors.hpp"

namespace mrl::comm {

void EmitterBuffer::register_robot(int robot_id, std::string ns) {
  if (robot_id != static_cast<int>(robots_.size()))
    throw ConflictError("emitter ids must be registered densely, expected " +
                        std::to_string(robots_.size()));
  robots_.push_back(Lane{std::move(ns), {}, -1, -1});
}

const std::string& EmitterBuffer::robot_ns(int robot_id) const {
  if (robot_id < 0 || robot_id >= static_cast<int>(robots_.size()))
    throw NotFoundError("emitter: unknown robot id " + std::to_string(robot_id));
  return robots_[robot_id].ns;
}

size_t EmitterBuffer::emit(const std::vector<sim::Twist>& actions, int64_t cycle_id) {
  if (actions.size() != robots_.size())
    throw ArityError("emit: " + std::to_string(actions.size()) + " actions for " +
                     std::to_string(robots_.size()) + " registered robots");
  for (size_t i = 0; i < actions.size(); ++i) {
    Lane& lane = robots_[i];
    if (cycle_id <= lane.last_emitted_cycle)
      throw RangeError("emit: cycle_id must increase per robot");
    CommandEnvelope env;
    env.robot_id = static_cast<int>(i);
    env.ns = lane.ns;
    env.cycle_id = cycle_id;
    env.action = actions[i];
    lane.queue.push_back(std::move(env));
    lane.last_emitted_cycle = cycle_id;
  }
  return actions.size();
}

std::vector<CommandEnvelope> EmitterBuffer::dispatch(int64_t clock_ms) {
  std::vector<CommandEnvelope> due;
  for (auto& lane : robots_) {
    if (lane.queue.empty()) continue;
    CommandEnvelope env = std::move(lane.queue.front());
    lane.queue.pop_front();
    env.issue_ms = clock_ms;
    if (env.cycle_id <= lane.last_dispatched_cycle)
      throw RangeError("dispatch: per-robot FIFO violated");
    lane.last_dispatched_cycle = env.cycle_id;
    due.push_back(std::move(env));
  }
  return due;
}

void EmitterBuffer::reset_cycles() {
  for (auto& lane : robots_) {
    lane.queue.clear();
    lane.last_emitted_cycle = -1;
    lane.last_dispatched_cycle = -1;
  }
}

size_t EmitterBuffer::queue_size(int robot_id) const {
  if (robot_id < 0 || robot_id >= static_cast<int>(robots_.size()))
    throw NotFoundError("emitter: unknown robot id " + std::to_string(robot_id));
  return robots_[robot_id].queue.size();
}

void ReceiverBuffer::register_robot(int robot_id) {
  if (robot_id != static_cast<int>(slots_.size()))
    throw ConflictError("receiver ids must be registered densely, expected " +
                        std::to_string(slots_.size()));
  slots_.push_back(Slot{});
}

void ReceiverBuffer::collect(const StateRecord& state) {
  if (state.robot_id < 0 || state.robot_id >= static_cast<int>(slots_.size()))
    throw NotFoundError("receiver: unknown robot id " + std::to_string(state.robot_id));
  Slot& slot = slots_[state.robot_id];
  if (slot.filled && slot.state.cycle_id == state.cycle_id) ++warnings_;
  slot.state = state;
  slot.filled = true;
}

bool ReceiverBuffer::complete(int64_t cycle_id) const {
  for (const auto& slot : slots_)
    if (!slot.filled || slot.state.cycle_id != cycle_id) return false;
  return !slots_.empty();
}

std::vector<int> ReceiverBuffer::missing(int64_t cycle_id) const {
  std::vector<int> ids;
  for (size_t i = 0; i < slots_.size(); ++i)
    if (!slots_[i].filled || slots_[i].state.cycle_id != cycle_id)
      ids.push_back(static_cast<int>(i));
  return ids;
}

std::vector<StateRecord> ReceiverBuffer::gather_joint(int64_t cycle_id) const {
  auto absent = missing(cycle_id);
  if (!absent.empty()) {
    std::string what = "gather: missing states for cycle " + std::to_string(cycle_id) + ":";
    for (int id : absent) what += " " + std::to_string(id);
    throw Error(what);
  }
  std::vector<StateRecord> joint;
  joint.reserve(slots_.size());
  for (const auto& slot : slots_) joint.push_back(slot.state);
  return joint;
}

}  // namespace mrl::comm
