#include "mrl/env/environment.hpp"

#include "mrl/clock.hpp"
#include "mrl/errors.hpp"

namespace mrl::env {

bool is_success(const sim::World& world) {
  for (const auto& r : world.robots)
    if (!sim::in_goal(world, r.id)) return false;
  return true;
}

Env::Env(ScenarioConfig scenario, DeployPerturbation perturbation, uint64_t perturbation_seed)
    : scenario_(std::move(scenario)),
      perturbation_(perturbation),
      perturbation_rng_(perturbation_seed) {
  auto issues = validate_scenario(scenario_);
  if (!issues.empty()) throw ConfigError(std::move(issues));
  for (size_t i = 0; i < scenario_.robots.size(); ++i) {
    emitter_.register_robot(static_cast<int>(i), scenario_.robots[i].ns);
    receiver_.register_robot(static_cast<int>(i));
  }
}

JointObservation Env::reset(uint64_t seed) {
  world_ = sim::reset_world(scenario_, seed);
  world_.actuator_gain = perturbation_.actuator_gain;
  world_.lidar_sigma_mult = perturbation_.lidar_noise_mult;
  world_.drift_mult = perturbation_.odom_drift_mult;

  if (perturbation_.start_jitter > 0.0) {
    // Placement error when repositioning robots between episodes. Retries
    // deterministically on the rare draw that lands a robot in contact.
    for (int attempt = 0; attempt < 100; ++attempt) {
      for (auto& r : world_.robots) {
        const auto& nominal = scenario_.robots[r.id].start;
        r.pose.x = nominal.x + perturbation_rng_.normal(0.0, perturbation_.start_jitter);
        r.pose.y = nominal.y + perturbation_rng_.normal(0.0, perturbation_.start_jitter);
        r.odom = r.pose;
      }
      if (sim::detect_collisions(world_).empty()) break;
      if (attempt == 99)
        throw ConfigError({"deploy start jitter cannot place robots collision-free"});
    }
  }

  steps_ = 0;
  done_ = false;
  success_ = false;
  was_reset_ = true;
  entered_goal_.assign(world_.robots.size(), false);
  gates_.assign(world_.robots.size(), comm::CommandGate(emitter_.send_deadline_ms));
  emitter_.reset_cycles();

  // Initial joint state is gathered like any other cycle, as cycle 0.
  JointObservation obs = observe(world_);
  for (size_t i = 0; i < world_.robots.size(); ++i) {
    comm::StateRecord st;
    st.robot_id = static_cast<int>(i);
    st.cycle_id = 0;
    st.odom = {obs.per_robot[i][0], obs.per_robot[i][1]};
    st.lidar.assign(obs.per_robot[i].begin() + 2, obs.per_robot[i].end());
    st.collided = false;
    st.in_goal = sim::in_goal(world_, static_cast<int>(i));
    receiver_.collect(st);
  }
  return obs;
}

StepResult Env::step(const JointAction& action) {
  if (!was_reset_) throw Error("step before reset");
  if (done_) throw EpisodeFinishedError("episode already finished");
  if (action.mode != scenario_.action_mode)
    throw InvalidActionError("action mode does not match the environment's action mode");
  if (action.size() != world_.robots.size())
    throw ArityError("joint action size " + std::to_string(action.size()) + " for " +
                     std::to_string(world_.robots.size()) + " robots");

  const int64_t cycle_id = steps_ + 1;
  const int64_t cycle_start_ms = static_cast<int64_t>(steps_) * kCycleMs;

  mark(CycleStage::Emit);
  emitter_.emit(action.decode(), cycle_id);
  auto due = emitter_.dispatch(cycle_start_ms);

  std::vector<sim::Twist> effective(world_.robots.size());
  std::vector<const comm::CommandEnvelope*> per_robot(world_.robots.size(), nullptr);
  for (const auto& cmd : due) per_robot[cmd.robot_id] = &cmd;
  for (size_t i = 0; i < effective.size(); ++i)
    effective[i] = gates_[i].apply(per_robot[i], 0.0);  // in-process: no latency

  return execute_cycle(effective);
}

StepResult Env::execute_cycle(const std::vector<sim::Twist>& effective_commands) {
  if (!was_reset_) throw Error("step before reset");
  if (done_) throw EpisodeFinishedError("episode already finished");

  const sim::World before = world_;
  const int64_t cycle_id = steps_ + 1;

  mark(CycleStage::Execute);
  std::vector<bool> collided(world_.robots.size(), false);
  for (int s = 0; s < kSubstepsPerCycle; ++s) {
    for (const auto& ev : sim::substep_world(world_, effective_commands)) {
      collided[ev.a] = true;
      if (ev.kind == sim::CollisionKind::RobotRobot) collided[ev.b] = true;
    }
  }

  StepResult result;
  result.cycle = cycle_id;
  result.events.per_robot.resize(world_.robots.size());

  JointObservation obs = observe(world_);
  bool all_in_goal = true;
  for (size_t i = 0; i < world_.robots.size(); ++i) {
    auto& ev = result.events.per_robot[i];
    ev.collided = collided[i];
    ev.in_goal = sim::in_goal(world_, static_cast<int>(i));
    if (ev.in_goal && !entered_goal_[i]) {
      ev.first_goal_entry = true;
      entered_goal_[i] = true;
    }
    all_in_goal = all_in_goal && ev.in_goal;

    comm::StateRecord st;
    st.robot_id = static_cast<int>(i);
    st.cycle_id = cycle_id;
    st.odom = {obs.per_robot[i][0], obs.per_robot[i][1]};
    st.lidar.assign(obs.per_robot[i].begin() + 2, obs.per_robot[i].end());
    st.collided = ev.collided;
    st.in_goal = ev.in_goal;
    receiver_.collect(st);
  }
  result.events.success_flipped = all_in_goal && !success_;

  mark(CycleStage::Gather);
  auto joint = receiver_.gather_joint(cycle_id);
  result.obs.per_robot.clear();
  for (const auto& st : joint) {
    std::vector<double> vec;
    vec.reserve(2 + st.lidar.size());
    vec.push_back(st.odom[0]);
    vec.push_back(st.odom[1]);
    vec.insert(vec.end(), st.lidar.begin(), st.lidar.end());
    result.obs.per_robot.push_back(std::move(vec));
  }

  mark(CycleStage::Reward);
  result.rewards = compute_rewards(before, world_, result.events, scenario_.reward);

  steps_ += 1;
  if (result.events.success_flipped) success_ = true;
  result.success = success_;
  done_ = success_ || steps_ >= scenario_.horizon;
  result.done = done_;
  return result;
}

std::vector<comm::StateRecord> Env::last_states() const {
  return receiver_.gather_joint(steps_);
}

}  // namespace mrl::env
