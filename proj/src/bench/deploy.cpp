#include "mrl/bench/deploy.hpp"

#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>

#include "mrl/clock.hpp"
#include "mrl/errors.hpp"
#include "mrl/rng.hpp"

namespace mrl::bench {

using namespace mrl::comm;

namespace {
uint64_t endpoint_seed(uint64_t deploy_seed, int robot_id) {
  return mix_seed(deploy_seed, 0xE0 + static_cast<uint64_t>(robot_id));
}
}  // namespace

DeployBackend::DeployBackend(const ScenarioConfig& scenario, Options options)
    : scenario_(scenario),
      opt_(std::move(options)),
      plant_env_(scenario, opt_.perturbation, mix_seed(opt_.deploy_seed, 0xB1)) {
  const int n = robot_count();
  mgr_chan_.resize(n);
  plant_chan_.resize(n);
  mgr_parser_.resize(n);
  plant_parser_.resize(n);
  pending_cmds_.assign(n, std::nullopt);
  reset_seen_.assign(n, false);
  reset_acked_.assign(n, false);
  endpoint_alive_.assign(n, true);
  receiver_.gather_timeout_ms = opt_.gather_timeout_ms;

  if (opt_.transport == Transport::InProcess) {
    for (int i = 0; i < n; ++i) {
      auto [mgr_side, ep_mgr_side] = make_inproc_pair();
      auto [plant_side, ep_plant_side] = make_inproc_pair();
      mgr_chan_[i] = std::move(mgr_side);
      plant_chan_[i] = std::move(plant_side);
      ep_mgr_chan_.push_back(std::move(ep_mgr_side));
      ep_plant_chan_.push_back(std::move(ep_plant_side));
      RobotEndpoint::Options eo;
      eo.robot_id = i;
      eo.ns = scenario_.robots[i].ns;
      eo.seed = endpoint_seed(opt_.deploy_seed, i);
      eo.latency_lo_ms = opt_.perturbation.latency_lo_ms;
      eo.latency_hi_ms = opt_.perturbation.latency_hi_ms;
      endpoints_.push_back(
          std::make_unique<RobotEndpoint>(eo, *ep_mgr_chan_[i], *ep_plant_chan_[i]));
    }
  } else {
    if (opt_.endpoint_binary.empty())
      throw Error("socket transport needs the endpoint binary path");
    mgr_listener_ = std::make_unique<TcpListener>();
    plant_listener_ = std::make_unique<TcpListener>();
    for (int i = 0; i < n; ++i) {
      const pid_t pid = ::fork();
      if (pid < 0) throw Error("fork failed");
      if (pid == 0) {
        const std::string rid = std::to_string(i);
        const std::string mport = std::to_string(mgr_listener_->port());
        const std::string pport = std::to_string(plant_listener_->port());
        const std::string seed = std::to_string(endpoint_seed(opt_.deploy_seed, i));
        const std::string lo = std::to_string(opt_.perturbation.latency_lo_ms);
        const std::string hi = std::to_string(opt_.perturbation.latency_hi_ms);
        const char* argv[] = {opt_.endpoint_binary.c_str(),
                              "--robot-id", rid.c_str(),
                              "--namespace", scenario_.robots[i].ns.c_str(),
                              "--manager-port", mport.c_str(),
                              "--plant-port", pport.c_str(),
                              "--seed", seed.c_str(),
                              "--latency-lo", lo.c_str(),
                              "--latency-hi", hi.c_str(),
                              nullptr};
        ::execv(opt_.endpoint_binary.c_str(), const_cast<char* const*>(argv));
        ::_exit(127);
      }
      endpoint_pids_.push_back(pid);
    }
  }
  handshake();
}

DeployBackend::~DeployBackend() {
  try {
    shutdown();
  } catch (...) {
  }
}

void DeployBackend::shutdown() {
  if (shut_down_) return;
  shut_down_ = true;
  for (int i = 0; i < robot_count(); ++i) {
    if (!endpoint_alive_[i] || !mgr_chan_[i]) continue;
    try {
      mgr_chan_[i]->send(encode_message(ShutdownMsg{}));
    } catch (...) {
    }
  }
  if (opt_.transport == Transport::InProcess) {
    pump_endpoints();
    plant_pump();
  } else {
    const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(3);
    for (long pid : endpoint_pids_) {
      int status = 0;
      while (::waitpid(static_cast<pid_t>(pid), &status, WNOHANG) == 0) {
        if (std::chrono::steady_clock::now() > deadline) {
          ::kill(static_cast<pid_t>(pid), SIGKILL);
          ::waitpid(static_cast<pid_t>(pid), &status, 0);
          break;
        }
        ::usleep(10 * 1000);
      }
    }
    endpoint_pids_.clear();
  }
}

void DeployBackend::handshake() {
  const int n = robot_count();

  if (opt_.transport == Transport::Socket) {
    // Each endpoint opens a manager connection and a plant connection; the
    // first frame on each identifies the robot.
    const auto deadline =
        std::chrono::steady_clock::now() + std::chrono::milliseconds(opt_.handshake_timeout_ms);
    auto accept_all = [&](TcpListener& listener,
                          std::vector<std::unique_ptr<ByteChannel>>& chans,
                          const char* what) {
      int accepted = 0;
      while (accepted < n) {
        if (std::chrono::steady_clock::now() > deadline)
          throw Error(std::string("deploy handshake timeout waiting for ") + what);
        auto chan = listener.accept(100);
        if (!chan) continue;
        std::string bytes;
        FrameParser parser;
        std::optional<std::string> frame;
        while (!frame) {
          if (std::chrono::steady_clock::now() > deadline)
            throw Error("deploy handshake: no REGISTER frame");
          if (chan->wait_recv(&bytes, 100)) {
            parser.feed(bytes);
            bytes.clear();
          }
          frame = parser.next();
        }
        const auto msg = decode_message(*frame);
        const auto* reg = std::get_if<RegisterMsg>(&msg);
        if (reg == nullptr) throw Error("deploy handshake: expected REGISTER");
        if (reg->robot_id < 0 || reg->robot_id >= n || chans[reg->robot_id] != nullptr)
          throw Error("deploy handshake: bad robot id in REGISTER");
        chan->send(encode_message(RegisterAckMsg{reg->robot_id, kCycleMs, kSubstepMs}));
        chans[reg->robot_id] = std::move(chan);
        ++accepted;
      }
    };
    accept_all(*mgr_listener_, mgr_chan_, "manager connections");
    accept_all(*plant_listener_, plant_chan_, "plant connections");
    for (int i = 0; i < n; ++i) registry_.register_robot(scenario_.robots[i].ns, i);
  } else {
    // In-process endpoints queued their REGISTERs at construction.
    for (int i = 0; i < n; ++i) {
      std::string bytes;
      mgr_chan_[i]->poll_recv(&bytes);
      mgr_parser_[i].feed(bytes);
      auto frame = mgr_parser_[i].next();
      if (!frame) throw Error("deploy handshake: missing REGISTER (manager side)");
      const auto msg = decode_message(*frame);
      const auto* reg = std::get_if<RegisterMsg>(&msg);
      if (reg == nullptr || reg->robot_id != i)
        throw Error("deploy handshake: bad REGISTER (manager side)");
      registry_.register_robot(reg->ns, i);
      mgr_chan_[i]->send(encode_message(RegisterAckMsg{i, kCycleMs, kSubstepMs}));

      bytes.clear();
      plant_chan_[i]->poll_recv(&bytes);
      plant_parser_[i].feed(bytes);
      auto pframe = plant_parser_[i].next();
      if (!pframe) throw Error("deploy handshake: missing REGISTER (plant side)");
      const auto pmsg = decode_message(*pframe);
      if (std::get_if<RegisterMsg>(&pmsg) == nullptr)
        throw Error("deploy handshake: bad REGISTER (plant side)");
      plant_chan_[i]->send(encode_message(RegisterAckMsg{i, kCycleMs, kSubstepMs}));
    }
    pump_endpoints();
  }

  for (int i = 0; i < n; ++i) emitter_.register_robot(i, scenario_.robots[i].ns);
  for (int i = 0; i < n; ++i) receiver_.register_robot(i);
}

void DeployBackend::send_to_robot(int robot_id, const WireMessage& msg) {
  if (!endpoint_alive_[robot_id]) return;
  try {
    mgr_chan_[robot_id]->send(encode_message(msg));
  } catch (const Error&) {
    endpoint_alive_[robot_id] = false;
  }
}

void DeployBackend::pump_endpoints() {
  for (size_t i = 0; i < endpoints_.size(); ++i)
    if (endpoint_alive_[i]) endpoints_[i]->pump();
}

void DeployBackend::execute_pending() {
  std::vector<sim::Twist> twists(pending_cmds_.size());
  for (size_t i = 0; i < pending_cmds_.size(); ++i) twists[i] = *pending_cmds_[i];
  last_result_ = plant_env_.execute_cycle(twists);
  last_result_valid_ = true;

  for (int i = 0; i < robot_count(); ++i) {
    StateMsg st;
    st.robot_id = i;
    st.cycle = last_result_.cycle;
    st.odom = {last_result_.obs.per_robot[i][0], last_result_.obs.per_robot[i][1]};
    st.lidar.assign(last_result_.obs.per_robot[i].begin() + 2,
                    last_result_.obs.per_robot[i].end());
    st.collided = last_result_.events.per_robot[i].collided;
    st.in_goal = last_result_.events.per_robot[i].in_goal;
    try {
      plant_chan_[i]->send(encode_message(st));
    } catch (const Error&) {
      // a robot that died mid-cycle surfaces as a gather timeout upstream
    }
  }
  for (auto& c : pending_cmds_) c.reset();
  pending_cycle_ = -1;
}

void DeployBackend::handle_plant_frame(int robot_id, const WireMessage& msg) {
  if (const auto* cmd = std::get_if<CommandMsg>(&msg)) {
    if (pending_cycle_ < 0) pending_cycle_ = cmd->cycle;
    if (cmd->cycle != pending_cycle_)
      throw Error("plant: command cycle skew (got " + std::to_string(cmd->cycle) +
                  ", expected " + std::to_string(pending_cycle_) + ")");
    pending_cmds_[robot_id] = sim::Twist{cmd->v, cmd->w};
    bool all = true;
    for (const auto& c : pending_cmds_)
      if (!c) all = false;
    if (all) execute_pending();
  } else if (const auto* reset = std::get_if<ResetMsg>(&msg)) {
    reset_seen_[robot_id] = true;
    bool all = true;
    for (int i = 0; i < robot_count(); ++i)
      if (!reset_seen_[i]) all = false;
    if (all) {
      env::JointObservation obs = plant_env_.reset(pending_world_seed_);
      for (auto& c : pending_cmds_) c.reset();
      pending_cycle_ = -1;
      last_result_valid_ = false;
      for (int i = 0; i < robot_count(); ++i) {
        StateMsg st;
        st.robot_id = i;
        st.cycle = 0;
        st.odom = {obs.per_robot[i][0], obs.per_robot[i][1]};
        st.lidar.assign(obs.per_robot[i].begin() + 2, obs.per_robot[i].end());
        st.collided = false;
        st.in_goal = sim::in_goal(plant_env_.world(), i);
        try {
          plant_chan_[i]->send(encode_message(ResetAckMsg{i, reset->episode}));
          plant_chan_[i]->send(encode_message(st));
        } catch (const Error&) {
        }
      }
      for (size_t i = 0; i < reset_seen_.size(); ++i) reset_seen_[i] = false;
    }
  }
  // REGISTER is consumed during the handshake; SHUTDOWN needs no reply.
}

void DeployBackend::handle_manager_frame(int robot_id, const WireMessage& msg) {
  if (const auto* st = std::get_if<StateMsg>(&msg)) {
    StateRecord rec;
    rec.robot_id = st->robot_id;
    rec.cycle_id = st->cycle;
    rec.odom = st->odom;
    rec.lidar = st->lidar;
    rec.collided = st->collided;
    rec.in_goal = st->in_goal;
    receiver_.collect(rec);
  } else if (const auto* ack = std::get_if<ResetAckMsg>(&msg)) {
    if (ack->robot_id == robot_id) reset_acked_[robot_id] = true;
  }
}

void DeployBackend::plant_pump() {
  for (int i = 0; i < robot_count(); ++i) {
    if (!plant_chan_[i]) continue;
    std::string bytes;
    if (plant_chan_[i]->poll_recv(&bytes) > 0) plant_parser_[i].feed(bytes);
    while (auto frame = plant_parser_[i].next())
      handle_plant_frame(i, decode_message(*frame));
  }
}

void DeployBackend::manager_pump() {
  for (int i = 0; i < robot_count(); ++i) {
    if (!mgr_chan_[i]) continue;
    std::string bytes;
    if (mgr_chan_[i]->poll_recv(&bytes) > 0) mgr_parser_[i].feed(bytes);
    while (auto frame = mgr_parser_[i].next())
      handle_manager_frame(i, decode_message(*frame));
  }
}

void DeployBackend::pump_once() {
  if (opt_.transport == Transport::InProcess) {
    pump_endpoints();  // manager -> endpoint traffic, forward to plant
    plant_pump();      // execute when all commands arrived
    pump_endpoints();  // plant -> endpoint traffic, forward to manager
    manager_pump();
  } else {
    plant_pump();
    manager_pump();
  }
}

bool DeployBackend::wait_until_complete(int64_t cycle_id, bool need_acks) {
  const auto deadline = std::chrono::steady_clock::now() +
                        std::chrono::milliseconds(opt_.gather_timeout_ms);
  while (true) {
    pump_once();
    bool ready = receiver_.complete(cycle_id);
    if (ready && need_acks)
      for (int i = 0; i < robot_count(); ++i) ready = ready && reset_acked_[i];
    if (ready) return true;
    if (opt_.transport == Transport::InProcess) return false;  // lockstep: no more data
    if (std::chrono::steady_clock::now() > deadline) return false;

    std::vector<struct pollfd> fds;
    for (auto& c : mgr_chan_)
      if (auto* t = dynamic_cast<TcpChannel*>(c.get())) fds.push_back({t->fd(), POLLIN, 0});
    for (auto& c : plant_chan_)
      if (auto* t = dynamic_cast<TcpChannel*>(c.get())) fds.push_back({t->fd(), POLLIN, 0});
    if (!fds.empty()) ::poll(fds.data(), fds.size(), 5);
  }
}

env::JointObservation DeployBackend::reset(int episode, uint64_t seed) {
  pending_world_seed_ = seed;
  for (size_t i = 0; i < reset_acked_.size(); ++i) reset_acked_[i] = false;
  cycle_ = 0;
  emitter_.reset_cycles();

  for (int i = 0; i < robot_count(); ++i) {
    const auto& start = scenario_.robots[i].start;
    send_to_robot(i, ResetMsg{episode, {start.x, start.y, start.theta}});
  }
  if (!wait_until_complete(0, true)) {
    std::vector<int> missing = receiver_.missing(0);
    throw GatherTimeoutError(missing, "reset: no joint state for episode " +
                                          std::to_string(episode));
  }
  auto joint = receiver_.gather_joint(0);
  env::JointObservation obs;
  for (const auto& st : joint) {
    std::vector<double> vec;
    vec.reserve(2 + st.lidar.size());
    vec.push_back(st.odom[0]);
    vec.push_back(st.odom[1]);
    vec.insert(vec.end(), st.lidar.begin(), st.lidar.end());
    obs.per_robot.push_back(std::move(vec));
  }
  return obs;
}

env::StepResult DeployBackend::step(const env::JointAction& action) {
  const int64_t cycle_id = cycle_ + 1;
  const int64_t clock_ms = cycle_ * kCycleMs;

  if (audit_ != nullptr) audit_->push_back(CycleStage::Emit);
  plant_env_.set_audit(audit_);
  emitter_.emit(action.decode(), cycle_id);
  auto due = emitter_.dispatch(clock_ms);
  for (const auto& envlp : due) {
    CommandMsg cmd;
    cmd.robot_id = envlp.robot_id;
    cmd.cycle = envlp.cycle_id;
    cmd.v = envlp.action.v;
    cmd.w = envlp.action.w;
    cmd.exec_ms = envlp.exec_ms;
    send_to_robot(envlp.robot_id, cmd);
  }

  if (!wait_until_complete(cycle_id, false)) {
    std::vector<int> missing = receiver_.missing(cycle_id);
    std::string what = "gather timeout at cycle " + std::to_string(cycle_id) +
                       ", missing robots:";
    for (int m : missing) what += " " + std::to_string(m);
    plant_env_.set_audit(nullptr);
    throw GatherTimeoutError(missing, what);
  }
  plant_env_.set_audit(nullptr);

  auto joint = receiver_.gather_joint(cycle_id);
  if (!last_result_valid_ || last_result_.cycle != cycle_id)
    throw Error("deploy: plant result out of sync");

  env::StepResult result = last_result_;
  result.obs.per_robot.clear();
  for (const auto& st : joint) {
    std::vector<double> vec;
    vec.reserve(2 + st.lidar.size());
    vec.push_back(st.odom[0]);
    vec.push_back(st.odom[1]);
    vec.insert(vec.end(), st.lidar.begin(), st.lidar.end());
    result.obs.per_robot.push_back(std::move(vec));
  }
  cycle_ = cycle_id;
  return result;
}

void DeployBackend::silence_endpoint(int robot_id) {
  if (robot_id < 0 || robot_id >= robot_count())
    throw NotFoundError("unknown robot id " + std::to_string(robot_id));
  endpoint_alive_[robot_id] = false;
  if (opt_.transport == Transport::Socket && robot_id < static_cast<int>(endpoint_pids_.size())) {
    ::kill(static_cast<pid_t>(endpoint_pids_[robot_id]), SIGKILL);
    int status = 0;
    ::waitpid(static_cast<pid_t>(endpoint_pids_[robot_id]), &status, 0);
  }
}

void DeployBackend::set_audit(CycleAudit* sink) { audit_ = sink; }

}  // namespace mrl::bench
