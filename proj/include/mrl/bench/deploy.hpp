#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mrl/comm/buffers.hpp"
#include "mrl/comm/channel.hpp"
#include "mrl/comm/endpoint.hpp"
#include "mrl/comm/protocol.hpp"
#include "mrl/config.hpp"
#include "mrl/env/environment.hpp"
#include "mrl/manager/backend.hpp"
#include "mrl/manager/registry.hpp"

namespace mrl::bench {

enum class Transport { InProcess, Socket };

// The deployment stack: the perturbed plant (the emulated lab, including all
// robots' shared physics) lives in this process; each robot's onboard
// endpoint applies delivery latency against the 20 ms deadline and relays
// frames between manager and plant. With the socket transport the endpoints
// are separate processes speaking the wire protocol over localhost TCP.
class DeployBackend : public manager::Backend {
 public:
  struct Options {
    Transport transport = Transport::Socket;
    DeployPerturbation perturbation;
    uint64_t deploy_seed = 0;
    std::string endpoint_binary;     // socket mode
    int gather_timeout_ms = 200;     // wall clock, per gather
    int handshake_timeout_ms = 10000;
  };

  DeployBackend(const ScenarioConfig& scenario, Options options);
  ~DeployBackend() override;

  env::JointObservation reset(int episode, uint64_t seed) override;
  env::StepResult step(const env::JointAction& action) override;
  int robot_count() const override { return static_cast<int>(scenario_.robots.size()); }
  const ScenarioConfig& scenario() const override { return scenario_; }
  int64_t world_tick() const override { return plant_env_.world().tick; }
  void set_audit(CycleAudit* sink) override;

  const manager::RobotRegistry& registry() const { return registry_; }
  const env::Env& plant() const { return plant_env_; }
  int receiver_warnings() const { return receiver_.warnings(); }

  // Makes one robot fall silent (kills its process in socket mode) so gather
  // timeouts can be exercised.
  void silence_endpoint(int robot_id);

  void shutdown();

 private:
  void handshake();
  void pump_endpoints();
  void plant_pump();
  void manager_pump();
  void pump_once();
  bool wait_until_complete(int64_t cycle_id, bool need_acks);
  void send_to_robot(int robot_id, const comm::WireMessage& msg);
  void handle_plant_frame(int robot_id, const comm::WireMessage& msg);
  void handle_manager_frame(int robot_id, const comm::WireMessage& msg);
  void execute_pending();

  ScenarioConfig scenario_;
  Options opt_;
  env::Env plant_env_;
  manager::RobotRegistry registry_;
  comm::EmitterBuffer emitter_;
  comm::ReceiverBuffer receiver_;
  CycleAudit* audit_ = nullptr;

  // bench-process channel ends
  std::vector<std::unique_ptr<comm::ByteChannel>> mgr_chan_;
  std::vector<std::unique_ptr<comm::ByteChannel>> plant_chan_;
  std::vector<comm::FrameParser> mgr_parser_;
  std::vector<comm::FrameParser> plant_parser_;

  // in-process endpoints (empty in socket mode)
  std::vector<std::unique_ptr<comm::ByteChannel>> ep_mgr_chan_;
  std::vector<std::unique_ptr<comm::ByteChannel>> ep_plant_chan_;
  std::vector<std::unique_ptr<comm::RobotEndpoint>> endpoints_;
  std::vector<bool> endpoint_alive_;

  // socket mode
  std::unique_ptr<comm::TcpListener> mgr_listener_;
  std::unique_ptr<comm::TcpListener> plant_listener_;
  std::vector<long> endpoint_pids_;

  // plant session
  std::vector<std::optional<sim::Twist>> pending_cmds_;
  int64_t pending_cycle_ = -1;
  std::vector<bool> reset_seen_;
  int64_t reset_episode_ = -1;
  uint64_t pending_world_seed_ = 0;
  env::StepResult last_result_;
  bool last_result_valid_ = false;

  // manager session
  std::vector<bool> reset_acked_;
  int64_t cycle_ = 0;
  bool shut_down_ = false;
};

}  // namespace mrl::bench
