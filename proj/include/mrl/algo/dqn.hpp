#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrl/algo/mlp.hpp"
#include "mrl/algo/replay.hpp"
#include "mrl/config.hpp"
#include "mrl/env/actions.hpp"
#include "mrl/env/observation.hpp"

namespace mrl::algo {

// Q_a = value + advantage_a - mean(advantages).
std::vector<double> dueling_combine(double value, std::span<const double> advantages);

// done -> reward; else reward + gamma * q_target[argmax q_online].
double double_dqn_target(double reward, bool done, double gamma,
                         std::span<const double> q_online_next,
                         std::span<const double> q_target_next);

// Net-level variant: forwards next_obs through both nets (dueling heads).
double double_dqn_target(double reward, std::span<const double> next_obs, bool done,
                         double gamma, const Mlp& online, const Mlp& target);

// Dueling head split of a (1 + n_actions)-wide output.
std::vector<double> q_from_heads(std::span<const double> head_out);

// Allocation-free helpers over one dueling head row [value, adv_0..adv_{n-1}].
// argmax over Q equals argmax over the advantages (the value and the mean
// shift every action equally).
inline int head_argmax(const double* head, int n_actions) {
  int best = 0;
  for (int a = 1; a < n_actions; ++a)
    if (head[1 + a] > head[1 + best]) best = a;
  return best;
}
inline double head_q_at(const double* head, int n_actions, int action) {
  double mean = 0.0;
  for (int a = 0; a < n_actions; ++a) mean += head[1 + a];
  mean /= n_actions;
  return head[0] + head[1 + action] - mean;
}

struct DqnHyper {
  int obs_dim = 17;
  int n_actions = env::kNumDiscreteActions;
  std::vector<int> hidden = {256, 256};
  double gamma = 0.99;
  double learning_rate = 3e-4;
  double rmsprop_decay = 0.99;
  double rmsprop_damping = 1e-8;
  int batch_size = 64;
  int replay_capacity = 100000;
  double per_alpha = 0.6;
  double per_epsilon = 1e-3;
  int target_sync_steps = 1000;
  int learn_start = 1000;
  double clip_grad_norm = 0.0;  // 0 disables
  double obs_scale = 5.0;  // inputs divided by this before the network

  static DqnHyper from_config(const AlgorithmConfig& cfg, int obs_dim, double obs_scale);
};

// One independent learner: online/target dueling pair, epsilon-greedy
// action selection, prioritized replay, RMSProp updates.
class DqnAgent {
 public:
  DqnAgent(const DqnHyper& hyper, uint64_t seed);

  int select_action(std::span<const double> obs, double epsilon);
  std::vector<double> q_values(std::span<const double> obs) const;

  // Stores with priority from the transition's own TD error.
  void store(Transition t);

  // Not-ready (no gradient step) -> nullopt; otherwise the weighted loss.
  std::optional<double> train_step(double beta);

  void sync_target();
  int64_t gradient_steps() const { return gradient_steps_; }
  size_t replay_size() const { return replay_.size(); }
  const PrioritizedReplay& replay() const { return replay_; }

  const Mlp& online() const { return online_; }
  const Mlp& target() const { return target_; }
  Mlp& online_mut() { return online_; }
  Mlp& target_mut() { return target_; }
  const DqnHyper& hyper() const { return hyper_; }

 private:
  double td_error(const Transition& t) const;
  void scale_obs(std::span<const double> obs, double* out) const;

  DqnHyper hyper_;
  Mlp online_;
  Mlp target_;
  RmsProp opt_;
  PrioritizedReplay replay_;
  Rng rng_;
  int64_t gradient_steps_ = 0;

  // reused batch scratch
  Mlp::BatchTrace trace_;
  Mlp::BatchTrace scratch_;
  std::vector<double> x_, xn_, heads_, heads_next_online_, heads_next_target_;
  std::vector<double> out_grad_, grad_, td_;
};

// Pluggable algorithm surface driven by the manager.
class Algorithm {
 public:
  virtual ~Algorithm() = default;
  virtual std::string name() const = 0;
  virtual int n_agents() const = 0;
  virtual int n_actions() const = 0;
  virtual int obs_dim() const = 0;
  virtual env::JointAction select_actions(const env::JointObservation& obs,
                                          double epsilon) = 0;
  virtual void store_transitions(const env::JointObservation& obs,
                                 const env::JointAction& action,
                                 const std::vector<double>& rewards,
                                 const env::JointObservation& next_obs, bool terminal) = 0;
  virtual std::optional<double> train_step() = 0;
  virtual double epsilon_for_episode(int episode) const = 0;
  virtual void set_progress(double fraction) = 0;  // anneals beta
  virtual int train_every() const = 0;
};

// Independent multi-DQN: one DqnAgent per robot unless parameter sharing is
// on, in which case all robots act through (and feed) one shared agent.
class MultiDqn : public Algorithm {
 public:
  MultiDqn(const AlgorithmConfig& cfg, int n_robots, int obs_dim, double obs_scale,
           uint64_t seed);

  std::string name() const override { return "multi_dqn"; }
  int n_agents() const override { return static_cast<int>(agents_.size()); }
  int n_robots() const { return n_robots_; }
  int n_actions() const override { return env::kNumDiscreteActions; }
  int obs_dim() const override { return obs_dim_; }

  env::JointAction select_actions(const env::JointObservation& obs,
                                  double epsilon) override;
  void store_transitions(const env::JointObservation& obs, const env::JointAction& action,
                         const std::vector<double>& rewards,
                         const env::JointObservation& next_obs, bool terminal) override;
  std::optional<double> train_step() override;
  double epsilon_for_episode(int episode) const override;
  void set_progress(double fraction) override;
  int train_every() const override { return config_.train_every; }

  DqnAgent& agent(int i) { return agents_[i]; }
  const DqnAgent& agent(int i) const { return agents_[i]; }
  DqnAgent& agent_for_robot(int robot) {
    return agents_[config_.parameter_sharing ? 0 : robot];
  }
  const AlgorithmConfig& config() const { return config_; }
  uint64_t seed() const { return seed_; }

  // Flat little-endian parameter image (online then target per agent),
  // layer-major, row-major within layers; used by the checkpoint codec.
  std::vector<double> parameter_image() const;
  void load_parameter_image(const std::vector<double>& image);

 private:
  AlgorithmConfig config_;
  int n_robots_;
  int obs_dim_;
  uint64_t seed_;
  double beta_;
  std::vector<DqnAgent> agents_;
};

// Registry keyed by AlgorithmConfig.name.
using AlgorithmFactory = std::function<std::unique_ptr<Algorithm>(
    const AlgorithmConfig&, const ScenarioConfig&, uint64_t seed)>;
void register_algorithm(const std::string& name, AlgorithmFactory factory);
std::vector<std::string> registered_algorithms();
std::unique_ptr<Algorithm> make_algorithm(const AlgorithmConfig& cfg,
                                          const ScenarioConfig& scenario, uint64_t seed);

}  // namespace mrl::algo
