#include "mrl/manager/manager.hpp"

#include <chrono>
#include <cmath>

#include "mrl/errors.hpp"
#include "mrl/rng.hpp"

namespace mrl::manager {

Manager::Manager(RunMode mode, Backend& backend, algo::Algorithm* algorithm)
    : mode_(mode), backend_(backend), algorithm_(algorithm) {
  if (mode == RunMode::SimTrain && algorithm == nullptr)
    throw Error("SimTrain mode requires an algorithm instance");
  if (algorithm != nullptr && algorithm->n_agents() > 0 &&
      backend.robot_count() < 1)
    throw Error("backend has no robots");
}

env::StepResult Manager::run_cycle(EpisodeContext& ctx) {
  audit_.clear();
  backend_.set_audit(&audit_);

  audit_.push_back(CycleStage::ReceiveState);
  const env::JointObservation prev = ctx.obs;

  audit_.push_back(CycleStage::SelectAction);
  const double eps = ctx.train ? ctx.epsilon : 0.0;
  env::JointAction action = algorithm_->select_actions(prev, eps);

  env::StepResult result = backend_.step(action);  // emit/execute/gather/reward

  if (ctx.train && mode_ == RunMode::SimTrain) {
    audit_.push_back(CycleStage::Store);
    // Horizon truncation bootstraps; only task success is a true terminal.
    algorithm_->store_transitions(prev, action, result.rewards, result.obs,
                                  result.success);
    transitions_stored_ += backend_.robot_count();
    ++cycle_counter_;
    if (cycle_counter_ % algorithm_->train_every() == 0) {
      audit_.push_back(CycleStage::Train);
      algorithm_->train_step();
    }
  }

  backend_.set_audit(nullptr);
  if (!audit_order_ok(audit_, ctx.train && mode_ == RunMode::SimTrain))
    ++audit_violations_;

  ctx.obs = result.obs;
  ctx.cycles += 1;
  return result;
}

bool Manager::audit_order_ok(const CycleAudit& audit, bool train_mode) {
  static const CycleStage base[] = {CycleStage::ReceiveState, CycleStage::SelectAction,
                                    CycleStage::Emit,         CycleStage::Execute,
                                    CycleStage::Gather,       CycleStage::Reward};
  size_t i = 0;
  for (CycleStage want : base) {
    if (i >= audit.size() || audit[i] != want) return false;
    ++i;
  }
  if (!train_mode) return i == audit.size();
  if (i >= audit.size() || audit[i] != CycleStage::Store) return false;
  ++i;
  if (i == audit.size()) return true;  // train skipped this cycle
  return audit[i] == CycleStage::Train && i + 1 == audit.size();
}

EpisodeRecord Manager::run_episode(int episode_index, uint64_t seed, double epsilon,
                                   bool train) {
  const auto t0 = std::chrono::steady_clock::now();

  EpisodeRecord rec;
  rec.episode = episode_index;
  rec.epsilon = epsilon;
  rec.returns.assign(backend_.robot_count(), 0.0);
  rec.robot_success.assign(backend_.robot_count(), 0);

  EpisodeContext ctx;
  ctx.episode = episode_index;
  ctx.epsilon = epsilon;
  ctx.train = train;

  try {
    ctx.obs = backend_.reset(episode_index, seed);
    while (true) {
      env::StepResult result = run_cycle(ctx);
      for (size_t i = 0; i < result.rewards.size(); ++i) rec.returns[i] += result.rewards[i];
      rec.steps = ctx.cycles;
      if (result.done) {
        rec.success = result.success;
        for (size_t i = 0; i < result.events.per_robot.size(); ++i)
          rec.robot_success[i] = result.events.per_robot[i].in_goal ? 1 : 0;
        break;
      }
    }
  } catch (const GatherTimeoutError& e) {
    // A silent endpoint aborts the episode; recorded as failed.
    rec.success = false;
    rec.failure = e.what();
  }

  rec.wall_sec =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return rec;
}

TrainingResult Manager::run_training(const TrainingConfig& cfg, uint64_t base_seed,
                                     const EpisodeCallback& on_episode) {
  if (mode_ != RunMode::SimTrain) throw Error("run_training requires SimTrain mode");

  TrainingResult out;
  std::vector<std::vector<char>> success_history;
  int joint_window_sum = 0;
  std::vector<char> joint_history;

  for (int ep = 0; ep < cfg.episodes; ++ep) {
    algorithm_->set_progress(cfg.episodes > 1 ? static_cast<double>(ep) / (cfg.episodes - 1)
                                              : 1.0);
    const double eps = algorithm_->epsilon_for_episode(ep);
    EpisodeRecord rec = run_episode(ep, mix_seed(base_seed, ep), eps, true);

    success_history.push_back(rec.robot_success);
    joint_history.push_back(rec.success ? 1 : 0);
    joint_window_sum += rec.success ? 1 : 0;
    if (static_cast<int>(joint_history.size()) > 20)
      joint_window_sum -= joint_history[joint_history.size() - 21];
    const int window_len = std::min<int>(20, static_cast<int>(joint_history.size()));
    const double trail20 = static_cast<double>(joint_window_sum) / window_len;

    const bool converged = convergence_check(success_history);
    if (converged && out.convergence_episode < 0) out.convergence_episode = ep;

    out.records.push_back(rec);
    out.trail20.push_back(trail20);
    out.episodes_run = ep + 1;
    if (on_episode) on_episode(rec, trail20, converged);

    if (cfg.early_stop.enabled) {
      bool stop = false;
      if (cfg.early_stop.metric == "joint") {
        if (static_cast<int>(joint_history.size()) >= cfg.early_stop.window) {
          int sum = 0;
          for (size_t t = joint_history.size() - cfg.early_stop.window;
               t < joint_history.size(); ++t)
            sum += joint_history[t];
          stop = static_cast<double>(sum) / cfg.early_stop.window >=
                 cfg.early_stop.threshold;
        }
      } else {
        stop = convergence_check(success_history, cfg.early_stop.window,
                                 cfg.early_stop.threshold);
      }
      if (stop) {
        out.stopped_early = true;
        break;
      }
    }
  }
  return out;
}

EvaluationResult Manager::run_evaluation(int episodes, uint64_t base_seed) {
  if (episodes < 1) throw Error("evaluation needs at least 1 episode");
  if (algorithm_ == nullptr) throw Error("evaluation requires a loaded policy");

  EvaluationResult out;
  for (int ep = 0; ep < episodes; ++ep) {
    EpisodeRecord rec = run_episode(ep, mix_seed(base_seed, ep), 0.0, false);
    out.successes += rec.success ? 1 : 0;
    out.records.push_back(std::move(rec));
  }
  out.success_rate = static_cast<double>(out.successes) / episodes;
  return out;
}

}  // namespace mrl::manager
