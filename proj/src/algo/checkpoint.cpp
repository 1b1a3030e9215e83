#include "mrl/algo/checkpoint.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include <json.hpp>

#include "mrl/errors.hpp"

namespace mrl::algo {

using nlohmann::json;
using CK = CheckpointError::Kind;

namespace {

constexpr char kMagic[4] = {'M', 'R', 'L', '1'};
constexpr int kVersion = 1;

void write_le_doubles(std::ostream& out, const std::vector<double>& values) {
  for (double v : values) {
    const uint64_t bits = std::bit_cast<uint64_t>(v);
    char buf[8];
    for (int i = 0; i < 8; ++i) buf[i] = static_cast<char>((bits >> (8 * i)) & 0xff);
    out.write(buf, 8);
  }
}

json algorithm_config_json(const AlgorithmConfig& c, int n_robots) {
  json j;
  j["name"] = c.name;
  j["hidden"] = c.hidden;
  j["learning_rate"] = c.learning_rate;
  j["rmsprop_decay"] = c.rmsprop_decay;
  j["rmsprop_damping"] = c.rmsprop_damping;
  j["batch_size"] = c.batch_size;
  j["replay_capacity"] = c.replay_capacity;
  j["per_alpha"] = c.per_alpha;
  j["per_beta0"] = c.per_beta0;
  j["per_epsilon"] = c.per_epsilon;
  j["epsilon_start"] = c.epsilon_start;
  j["epsilon_final"] = c.epsilon_final;
  j["epsilon_decay_episodes"] = c.epsilon_decay_episodes;
  j["target_sync_steps"] = c.target_sync_steps;
  j["learn_start"] = c.learn_start;
  j["train_every"] = c.train_every;
  j["parameter_sharing"] = c.parameter_sharing;
  j["n_robots"] = n_robots;
  return j;
}

AlgorithmConfig algorithm_config_from_json(const json& j, double gamma) {
  AlgorithmConfig c;
  c.name = j.value("name", c.name);
  if (j.contains("hidden")) c.hidden = j["hidden"].get<std::vector<int>>();
  c.gamma = gamma;
  c.learning_rate = j.value("learning_rate", c.learning_rate);
  c.rmsprop_decay = j.value("rmsprop_decay", c.rmsprop_decay);
  c.rmsprop_damping = j.value("rmsprop_damping", c.rmsprop_damping);
  c.batch_size = j.value("batch_size", c.batch_size);
  c.replay_capacity = j.value("replay_capacity", c.replay_capacity);
  c.per_alpha = j.value("per_alpha", c.per_alpha);
  c.per_beta0 = j.value("per_beta0", c.per_beta0);
  c.per_epsilon = j.value("per_epsilon", c.per_epsilon);
  c.epsilon_start = j.value("epsilon_start", c.epsilon_start);
  c.epsilon_final = j.value("epsilon_final", c.epsilon_final);
  c.epsilon_decay_episodes = j.value("epsilon_decay_episodes", c.epsilon_decay_episodes);
  c.target_sync_steps = j.value("target_sync_steps", c.target_sync_steps);
  c.learn_start = j.value("learn_start", c.learn_start);
  c.train_every = j.value("train_every", c.train_every);
  c.parameter_sharing = j.value("parameter_sharing", c.parameter_sharing);
  return c;
}

}  // namespace

void save_checkpoint(const MultiDqn& algorithm, const std::string& scenario_name,
                     const std::string& path) {
  const auto& sizes = algorithm.agent(0).online().layer_sizes();

  json meta;
  meta["version"] = kVersion;
  meta["n_agents"] = algorithm.n_agents();
  meta["layer_sizes"] = sizes;
  meta["n_actions"] = algorithm.n_actions();
  meta["gamma"] = algorithm.config().gamma;
  meta["hyperparameters"] = algorithm_config_json(algorithm.config(), algorithm.n_robots());
  meta["hyperparameters"]["obs_scale"] = algorithm.agent(0).hyper().obs_scale;
  meta["scenario_name"] = scenario_name;
  meta["seed"] = algorithm.seed();
  const std::string meta_str = meta.dump();

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError(CK::Io, "cannot open for writing: " + path);
  out.write(kMagic, 4);
  const uint32_t len = static_cast<uint32_t>(meta_str.size());
  const char hdr[4] = {static_cast<char>((len >> 24) & 0xff),
                       static_cast<char>((len >> 16) & 0xff),
                       static_cast<char>((len >> 8) & 0xff),
                       static_cast<char>(len & 0xff)};
  out.write(hdr, 4);
  out.write(meta_str.data(), static_cast<std::streamsize>(meta_str.size()));
  write_le_doubles(out, algorithm.parameter_image());
  if (!out) throw CheckpointError(CK::Io, "write failed: " + path);
}

LoadedCheckpoint load_checkpoint(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError(CK::Io, "cannot open checkpoint: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());

  if (bytes.size() < 8) throw CheckpointError(CK::Truncated, "checkpoint shorter than header");
  if (std::memcmp(bytes.data(), kMagic, 4) != 0)
    throw CheckpointError(CK::BadMagic, "bad magic bytes");
  const auto* b = reinterpret_cast<const unsigned char*>(bytes.data() + 4);
  const uint32_t meta_len =
      (uint32_t(b[0]) << 24) | (uint32_t(b[1]) << 16) | (uint32_t(b[2]) << 8) | uint32_t(b[3]);
  if (bytes.size() < 8 + static_cast<size_t>(meta_len))
    throw CheckpointError(CK::Truncated, "metadata truncated");

  json meta;
  try {
    meta = json::parse(bytes.substr(8, meta_len));
  } catch (const json::parse_error& e) {
    throw CheckpointError(CK::Truncated, std::string("corrupt metadata: ") + e.what());
  }
  const int version = meta.value("version", -1);
  if (version != kVersion)
    throw CheckpointError(CK::BadVersion,
                          "unsupported checkpoint version " + std::to_string(version));

  const int n_agents = meta.value("n_agents", 0);
  const auto layer_sizes = meta.value("layer_sizes", std::vector<int>{});
  const int n_actions = meta.value("n_actions", 0);
  const double gamma = meta.value("gamma", 0.99);
  const std::string scenario_name = meta.value("scenario_name", "");
  const uint64_t seed = meta.value("seed", uint64_t{0});
  if (n_agents < 1 || layer_sizes.size() < 2 || n_actions < 1)
    throw CheckpointError(CK::Truncated, "metadata missing required fields");
  if (!meta.contains("hyperparameters"))
    throw CheckpointError(CK::Truncated, "metadata missing hyperparameters");

  AlgorithmConfig cfg = algorithm_config_from_json(meta["hyperparameters"], gamma);
  const int n_robots = meta["hyperparameters"].value("n_robots", n_agents);
  const int obs_dim = layer_sizes.front();
  if (layer_sizes.back() != 1 + n_actions)
    throw CheckpointError(CK::ArchMismatch, "layer_sizes do not match n_actions");
  std::vector<int> hidden(layer_sizes.begin() + 1, layer_sizes.end() - 1);
  if (hidden != cfg.hidden)
    throw CheckpointError(CK::ArchMismatch, "layer_sizes do not match hyperparameters");

  // obs_scale is baked into the agents; recover it from the hyperparameters.
  const double obs_scale = meta["hyperparameters"].value("obs_scale", 5.0);
  auto algorithm = std::make_unique<MultiDqn>(cfg, n_robots, obs_dim, obs_scale, seed);
  if (algorithm->n_agents() != n_agents)
    throw CheckpointError(CK::ArchMismatch, "n_agents inconsistent with parameter sharing");

  const size_t per_agent = algorithm->agent(0).online().param_count();
  const size_t expected = static_cast<size_t>(n_agents) * 2 * per_agent;
  const size_t blob_off = 8 + meta_len;
  if (bytes.size() - blob_off < expected * 8)
    throw CheckpointError(CK::Truncated, "parameter block truncated");
  if (bytes.size() - blob_off > expected * 8)
    throw CheckpointError(CK::Truncated, "trailing bytes after parameter block");

  std::vector<double> image(expected);
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data() + blob_off);
  for (size_t i = 0; i < expected; ++i) {
    uint64_t bits = 0;
    for (int k = 7; k >= 0; --k) bits = (bits << 8) | p[i * 8 + k];
    image[i] = std::bit_cast<double>(bits);
  }
  algorithm->load_parameter_image(image);

  LoadedCheckpoint out;
  out.algorithm = std::move(algorithm);
  out.scenario_name = scenario_name;
  out.seed = seed;
  out.n_robots = n_robots;
  return out;
}

void ensure_compatible(const LoadedCheckpoint& ckpt, const ScenarioConfig& scenario) {
  if (ckpt.n_robots != static_cast<int>(scenario.robots.size()))
    throw CheckpointError(CK::ArchMismatch,
                          "checkpoint trained for " + std::to_string(ckpt.n_robots) +
                              " robots, scenario has " +
                              std::to_string(scenario.robots.size()));
  const int obs_dim = 2 + scenario.lidar.num_rays;
  if (ckpt.algorithm->obs_dim() != obs_dim)
    throw CheckpointError(CK::ArchMismatch,
                          "checkpoint observation width " +
                              std::to_string(ckpt.algorithm->obs_dim()) +
                              " != scenario width " + std::to_string(obs_dim));
  if (scenario.action_mode != ActionMode::Discrete)
    throw CheckpointError(CK::ArchMismatch, "checkpoint requires a discrete action space");
}

}  // namespace mrl::algo
