#include "mrl/comm/endpoint.hpp"

namespace mrl::comm {

RobotEndpoint::RobotEndpoint(Options options, ByteChannel& manager_ch, ByteChannel& plant_ch)
    : opt_(std::move(options)),
      manager_ch_(manager_ch),
      plant_ch_(plant_ch),
      gate_(opt_.deadline_ms, opt_.stop_on_miss),
      latency_rng_(opt_.seed) {
  const RegisterMsg hello{opt_.robot_id, opt_.ns};
  manager_ch_.send(encode_message(hello));
  plant_ch_.send(encode_message(hello));
}

void RobotEndpoint::handle_manager(const WireMessage& msg) {
  if (const auto* cmd = std::get_if<CommandMsg>(&msg)) {
    ++commands_seen_;
    const double latency =
        latency_rng_.uniform(opt_.latency_lo_ms, opt_.latency_hi_ms);
    CommandEnvelope env;
    env.robot_id = cmd->robot_id;
    env.cycle_id = cmd->cycle;
    env.action = sim::Twist{cmd->v, cmd->w};
    env.exec_ms = cmd->exec_ms;
    const sim::Twist effective = gate_.apply(&env, latency);
    if (latency > opt_.deadline_ms) ++commands_missed_;

    CommandMsg out;
    out.robot_id = opt_.robot_id;
    out.cycle = cmd->cycle;
    out.v = effective.v;
    out.w = effective.w;
    out.exec_ms = cmd->exec_ms;
    plant_ch_.send(encode_message(out));
  } else if (const auto* reset = std::get_if<ResetMsg>(&msg)) {
    gate_ = CommandGate(opt_.deadline_ms, opt_.stop_on_miss);  // robots start at rest
    plant_ch_.send(encode_message(*reset));
  } else if (std::holds_alternative<ShutdownMsg>(msg)) {
    plant_ch_.send(encode_message(ShutdownMsg{}));
    finished_ = true;
  } else if (std::holds_alternative<RegisterAckMsg>(msg)) {
    // handshake complete; cycle/substep timing is fixed by the shared clock
  }
}

void RobotEndpoint::handle_plant(const WireMessage& msg) {
  if (std::holds_alternative<StateMsg>(msg) || std::holds_alternative<ResetAckMsg>(msg)) {
    manager_ch_.send(encode_message(msg));
  }
}

bool RobotEndpoint::pump() {
  std::string bytes;
  if (manager_ch_.poll_recv(&bytes) > 0) manager_parser_.feed(bytes);
  while (auto frame = manager_parser_.next()) handle_manager(decode_message(*frame));

  bytes.clear();
  if (plant_ch_.poll_recv(&bytes) > 0) plant_parser_.feed(bytes);
  while (auto frame = plant_parser_.next()) handle_plant(decode_message(*frame));

  return !finished_;
}

void RobotEndpoint::run() {
  while (!finished_) {
    if (!pump()) break;
    if (manager_ch_.closed() || plant_ch_.closed()) break;
    wait_any(&manager_ch_, &plant_ch_, 100);
  }
}

}  // namespace mrl::comm
