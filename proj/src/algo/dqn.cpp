#include "mrl/algo/dqn.hpp"

#include <algorithm>
#include <cmath>

#include "mrl/errors.hpp"

namespace mrl::algo {

std::vector<double> dueling_combine(double value, std::span<const double> advantages) {
  if (advantages.empty()) throw Error("dueling_combine: advantages must be non-empty");
  double mean = 0.0;
  for (double a : advantages) mean += a;
  mean /= static_cast<double>(advantages.size());
  std::vector<double> q(advantages.size());
  for (size_t i = 0; i < advantages.size(); ++i) q[i] = value + advantages[i] - mean;
  return q;
}

std::vector<double> q_from_heads(std::span<const double> head_out) {
  if (head_out.size() < 2) throw Error("dueling head needs value plus advantages");
  return dueling_combine(head_out[0], head_out.subspan(1));
}

double double_dqn_target(double reward, bool done, double gamma,
                         std::span<const double> q_online_next,
                         std::span<const double> q_target_next) {
  if (done) return reward;
  size_t best = 0;
  for (size_t a = 1; a < q_online_next.size(); ++a)
    if (q_online_next[a] > q_online_next[best]) best = a;
  return reward + gamma * q_target_next[best];
}

double double_dqn_target(double reward, std::span<const double> next_obs, bool done,
                         double gamma, const Mlp& online, const Mlp& target) {
  if (done) return reward;
  const auto qo = q_from_heads(online.forward(next_obs));
  const auto qt = q_from_heads(target.forward(next_obs));
  return double_dqn_target(reward, false, gamma, qo, qt);
}

DqnHyper DqnHyper::from_config(const AlgorithmConfig& cfg, int obs_dim, double obs_scale) {
  DqnHyper h;
  h.obs_dim = obs_dim;
  h.hidden = cfg.hidden;
  h.gamma = cfg.gamma;
  h.learning_rate = cfg.learning_rate;
  h.rmsprop_decay = cfg.rmsprop_decay;
  h.rmsprop_damping = cfg.rmsprop_damping;
  h.batch_size = cfg.batch_size;
  h.replay_capacity = cfg.replay_capacity;
  h.per_alpha = cfg.per_alpha;
  h.per_epsilon = cfg.per_epsilon;
  h.target_sync_steps = cfg.target_sync_steps;
  h.learn_start = cfg.learn_start;
  h.clip_grad_norm = cfg.clip_grad_norm;
  h.obs_scale = obs_scale;
  return h;
}

namespace {
std::vector<int> dueling_sizes(const DqnHyper& h) {
  std::vector<int> sizes;
  sizes.push_back(h.obs_dim);
  for (int w : h.hidden) sizes.push_back(w);
  sizes.push_back(1 + h.n_actions);  // value head + advantage vector
  return sizes;
}
}  // namespace

DqnAgent::DqnAgent(const DqnHyper& hyper, uint64_t seed)
    : hyper_(hyper),
      online_(dueling_sizes(hyper)),
      target_(dueling_sizes(hyper)),
      opt_(online_.param_count(), hyper.learning_rate, hyper.rmsprop_decay,
           hyper.rmsprop_damping),
      replay_(hyper.replay_capacity, hyper.per_alpha, hyper.per_epsilon),
      rng_(seed) {
  online_.init_weights(rng_);
  target_.params() = online_.params();
}

void DqnAgent::scale_obs(std::span<const double> obs, double* out) const {
  for (size_t i = 0; i < obs.size(); ++i) out[i] = obs[i] / hyper_.obs_scale;
}

std::vector<double> DqnAgent::q_values(std::span<const double> obs) const {
  std::vector<double> scaled(obs.size());
  scale_obs(obs, scaled.data());
  return q_from_heads(online_.forward(scaled));
}

int DqnAgent::select_action(std::span<const double> obs, double epsilon) {
  const double u = rng_.uniform();
  if (u < epsilon) return rng_.uniform_int(0, hyper_.n_actions - 1);
  const auto q = q_values(obs);
  return static_cast<int>(std::max_element(q.begin(), q.end()) - q.begin());
}

double DqnAgent::td_error(const Transition& t) const {
  std::vector<double> scaled(t.obs.size());
  scale_obs(t.obs, scaled.data());
  const auto h = online_.forward(scaled);

  double y = t.reward;
  if (!t.done) {
    std::vector<double> scaled_next(t.next_obs.size());
    scale_obs(t.next_obs, scaled_next.data());
    const auto ho = online_.forward(scaled_next);
    const auto ht = target_.forward(scaled_next);
    y += hyper_.gamma *
         head_q_at(ht.data(), hyper_.n_actions, head_argmax(ho.data(), hyper_.n_actions));
  }
  return head_q_at(h.data(), hyper_.n_actions, t.action) - y;
}

void DqnAgent::store(Transition t) {
  if (static_cast<int>(t.obs.size()) != hyper_.obs_dim ||
      static_cast<int>(t.next_obs.size()) != hyper_.obs_dim)
    throw Error("transition observation size != " + std::to_string(hyper_.obs_dim));
  if (!std::isfinite(t.reward)) throw Error("transition reward must be finite");
  const double td = td_error(t);
  replay_.add(std::move(t), td);
}

void DqnAgent::sync_target() { target_.params() = online_.params(); }

std::optional<double> DqnAgent::train_step(double beta) {
  const size_t need = std::max<size_t>(hyper_.batch_size, hyper_.learn_start);
  if (replay_.size() < need) return std::nullopt;

  auto batch = replay_.sample(hyper_.batch_size, beta, rng_);
  if (!batch) return std::nullopt;
  const int B = static_cast<int>(batch->items.size());
  const int n_act = hyper_.n_actions;
  const int d = hyper_.obs_dim;

  x_.resize(static_cast<size_t>(B) * d);
  xn_.resize(static_cast<size_t>(B) * d);
  for (int s = 0; s < B; ++s) {
    scale_obs(batch->items[s]->obs, x_.data() + static_cast<size_t>(s) * d);
    scale_obs(batch->items[s]->next_obs, xn_.data() + static_cast<size_t>(s) * d);
  }

  online_.forward_batch(x_, B, &trace_, &heads_);
  online_.forward_batch(xn_, B, &scratch_, &heads_next_online_);
  target_.forward_batch(xn_, B, &scratch_, &heads_next_target_);

  const int width = 1 + n_act;
  out_grad_.assign(static_cast<size_t>(B) * width, 0.0);
  td_.resize(B);
  double loss = 0.0;
  for (int s = 0; s < B; ++s) {
    const double* h = heads_.data() + static_cast<size_t>(s) * width;
    const double* ho = heads_next_online_.data() + static_cast<size_t>(s) * width;
    const double* ht = heads_next_target_.data() + static_cast<size_t>(s) * width;
    const Transition& t = *batch->items[s];
    const double y = t.done ? t.reward
                            : t.reward + hyper_.gamma *
                                             head_q_at(ht, n_act, head_argmax(ho, n_act));
    td_[s] = head_q_at(h, n_act, t.action) - y;
    const double w = batch->weights[s];
    loss += w * td_[s] * td_[s];

    // dQ_a/dvalue = 1, dQ_a/dadv_k = delta(k,a) - 1/n.
    const double g = 2.0 * w * td_[s] / B;
    double* og = out_grad_.data() + static_cast<size_t>(s) * width;
    og[0] = g;
    for (int k = 0; k < n_act; ++k)
      og[1 + k] = g * ((k == t.action ? 1.0 : 0.0) - 1.0 / n_act);
  }
  loss /= B;

  online_.backward_batch(trace_, out_grad_, &grad_);
  if (hyper_.clip_grad_norm > 0.0) {
    double norm_sq = 0.0;
    for (double g : grad_) norm_sq += g * g;
    const double norm = std::sqrt(norm_sq);
    if (norm > hyper_.clip_grad_norm) {
      const double scale = hyper_.clip_grad_norm / norm;
      for (double& g : grad_) g *= scale;
    }
  }
  opt_.step(online_.params(), grad_);

  if (!std::isfinite(loss) || !online_.params_finite())
    throw TrainingDivergedError(
        "non-finite loss or parameters after gradient step " +
        std::to_string(gradient_steps_ + 1) + " (loss=" + std::to_string(loss) + ")");

  for (int s = 0; s < B; ++s) replay_.update_priority(batch->indices[s], td_[s]);

  ++gradient_steps_;
  if (gradient_steps_ % hyper_.target_sync_steps == 0) sync_target();
  return loss;
}

MultiDqn::MultiDqn(const AlgorithmConfig& cfg, int n_robots, int obs_dim, double obs_scale,
                   uint64_t seed)
    : config_(cfg), n_robots_(n_robots), obs_dim_(obs_dim), seed_(seed),
      beta_(cfg.per_beta0) {
  if (n_robots < 1) throw Error("multi_dqn needs at least one robot");
  const int count = cfg.parameter_sharing ? 1 : n_robots;
  DqnHyper hyper = DqnHyper::from_config(cfg, obs_dim, obs_scale);
  agents_.reserve(count);
  for (int i = 0; i < count; ++i)
    agents_.emplace_back(hyper, mix_seed(seed, 101 + static_cast<uint64_t>(i)));
}

env::JointAction MultiDqn::select_actions(const env::JointObservation& obs,
                                          double epsilon) {
  if (static_cast<int>(obs.size()) != n_robots_)
    throw ArityError("select_actions: observation count != robot count");
  std::vector<int> idx(n_robots_);
  for (int i = 0; i < n_robots_; ++i)
    idx[i] = agent_for_robot(i).select_action(obs.per_robot[i], epsilon);
  return env::JointAction::from_discrete(std::move(idx));
}

void MultiDqn::store_transitions(const env::JointObservation& obs,
                                 const env::JointAction& action,
                                 const std::vector<double>& rewards,
                                 const env::JointObservation& next_obs, bool terminal) {
  if (action.mode != ActionMode::Discrete)
    throw CompatibilityError("multi_dqn stores discrete actions only");
  for (int i = 0; i < n_robots_; ++i) {
    Transition t;
    t.agent_id = i;
    t.obs = obs.per_robot[i];
    t.action = action.discrete[i];
    t.reward = rewards[i];
    t.next_obs = next_obs.per_robot[i];
    t.done = terminal;
    agent_for_robot(i).store(std::move(t));
  }
}

std::optional<double> MultiDqn::train_step() {
  double sum = 0.0;
  int trained = 0;
  for (auto& agent : agents_) {
    if (auto loss = agent.train_step(beta_)) {
      sum += *loss;
      ++trained;
    }
  }
  if (trained == 0) return std::nullopt;
  return sum / trained;
}

double MultiDqn::epsilon_for_episode(int episode) const {
  const double frac =
      std::min(1.0, static_cast<double>(episode) / config_.epsilon_decay_episodes);
  return config_.epsilon_start - (config_.epsilon_start - config_.epsilon_final) * frac;
}

void MultiDqn::set_progress(double fraction) {
  const double f = std::clamp(fraction, 0.0, 1.0);
  beta_ = config_.per_beta0 + (1.0 - config_.per_beta0) * f;
}

std::vector<double> MultiDqn::parameter_image() const {
  std::vector<double> image;
  for (const auto& agent : agents_) {
    image.insert(image.end(), agent.online().params().begin(),
                 agent.online().params().end());
    image.insert(image.end(), agent.target().params().begin(),
                 agent.target().params().end());
  }
  return image;
}

void MultiDqn::load_parameter_image(const std::vector<double>& image) {
  size_t off = 0;
  for (auto& agent : agents_) {
    const size_t n = agent.online().param_count();
    if (off + 2 * n > image.size())
      throw CheckpointError(CheckpointError::Kind::ArchMismatch,
                            "parameter image too small for this architecture");
    std::copy(image.begin() + off, image.begin() + off + n,
              agent.online_mut().params().begin());
    off += n;
    std::copy(image.begin() + off, image.begin() + off + n,
              agent.target_mut().params().begin());
    off += n;
  }
  if (off != image.size())
    throw CheckpointError(CheckpointError::Kind::ArchMismatch,
                          "parameter image larger than this architecture");
}

namespace {
std::map<std::string, AlgorithmFactory>& factory_map() {
  static std::map<std::string, AlgorithmFactory> factories;
  return factories;
}

const bool kMultiDqnRegistered = [] {
  register_algorithm(
      "multi_dqn",
      [](const AlgorithmConfig& cfg, const ScenarioConfig& sc, uint64_t seed) {
        if (sc.action_mode != ActionMode::Discrete)
          throw CompatibilityError("multi_dqn requires a discrete action space");
        const int obs_dim = 2 + sc.lidar.num_rays;
        return std::unique_ptr<Algorithm>(new MultiDqn(
            cfg, static_cast<int>(sc.robots.size()), obs_dim, sc.lidar.max_range, seed));
      });
  return true;
}();
}  // namespace

void register_algorithm(const std::string& name, AlgorithmFactory factory) {
  factory_map()[name] = std::move(factory);
}

std::vector<std::string> registered_algorithms() {
  std::vector<std::string> names;
  for (const auto& [name, _] : factory_map()) names.push_back(name);
  return names;
}

std::unique_ptr<Algorithm> make_algorithm(const AlgorithmConfig& cfg,
                                          const ScenarioConfig& scenario, uint64_t seed) {
  auto it = factory_map().find(cfg.name);
  if (it == factory_map().end())
    throw NotFoundError("unknown algorithm '" + cfg.name + "'");
  return it->second(cfg, scenario, seed);
}

}  // namespace mrl::algo
