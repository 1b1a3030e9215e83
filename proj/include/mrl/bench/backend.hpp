#pragma once

#include <memory>

#include "mrl/bench/trajlog.hpp"
#include "mrl/env/environment.hpp"
#include "mrl/manager/backend.hpp"

namespace mrl::bench {

// The clean training/evaluation simulator.
class SimBackend : public manager::Backend {
 public:
  explicit SimBackend(const ScenarioConfig& scenario) : env_(scenario) {}

  env::JointObservation reset(int, uint64_t seed) override { return env_.reset(seed); }
  env::StepResult step(const env::JointAction& action) override { return env_.step(action); }
  int robot_count() const override { return env_.robot_count(); }
  const ScenarioConfig& scenario() const override { return env_.scenario(); }
  int64_t world_tick() const override { return env_.world().tick; }
  void set_audit(CycleAudit* sink) override { env_.set_audit(sink); }

  env::Env& environment() { return env_; }

 private:
  env::Env env_;
};

// Decorator that captures a bit-exact trajectory log of a sim-backed run.
class RecordingBackend : public manager::Backend {
 public:
  RecordingBackend(SimBackend& inner, TrajectoryRecorder& recorder)
      : inner_(inner), recorder_(recorder) {}

  env::JointObservation reset(int episode, uint64_t seed) override {
    auto obs = inner_.reset(episode, seed);
    recorder_.begin_episode(episode, seed, inner_.environment().world());
    return obs;
  }
  env::StepResult step(const env::JointAction& action) override {
    auto result = inner_.step(action);
    recorder_.record_cycle(action, inner_.environment().world());
    return result;
  }
  int robot_count() const override { return inner_.robot_count(); }
  const ScenarioConfig& scenario() const override { return inner_.scenario(); }
  int64_t world_tick() const override { return inner_.world_tick(); }
  void set_audit(CycleAudit* sink) override { inner_.set_audit(sink); }

 private:
  SimBackend& inner_;
  TrajectoryRecorder& recorder_;
};

}  // namespace mrl::bench
