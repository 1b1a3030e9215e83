#include "mrl/bench/trajlog.hpp"

#include <bit>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mrl/env/environment.hpp"
#include "mrl/errors.hpp"

namespace mrl::bench {

using nlohmann::json;

namespace {

std::string hex_double(double v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx",
                static_cast<unsigned long long>(std::bit_cast<uint64_t>(v)));
  return buf;
}

double double_from_hex(const std::string& s) {
  if (s.size() != 16) throw ConfigError({"trajlog: bad pose hex '" + s + "'"});
  uint64_t bits = 0;
  for (char c : s) {
    bits <<= 4;
    if (c >= '0' && c <= '9') bits |= static_cast<uint64_t>(c - '0');
    else if (c >= 'a' && c <= 'f') bits |= static_cast<uint64_t>(c - 'a' + 10);
    else throw ConfigError({"trajlog: bad pose hex '" + s + "'"});
  }
  return std::bit_cast<double>(bits);
}

std::string pose_hex(const sim::Pose& p) {
  return hex_double(p.x) + hex_double(p.y) + hex_double(p.theta);
}

sim::Pose pose_from_hex(const std::string& s) {
  if (s.size() != 48) throw ConfigError({"trajlog: bad pose record"});
  return {double_from_hex(s.substr(0, 16)), double_from_hex(s.substr(16, 16)),
          double_from_hex(s.substr(32, 16))};
}

}  // namespace

void TrajectoryRecorder::begin_episode(int episode, uint64_t seed,
                                       const sim::World& world) {
  EpisodeLog ep;
  ep.episode = episode;
  ep.seed = seed;
  std::vector<sim::Pose> initial;
  for (const auto& r : world.robots) initial.push_back(r.pose);
  ep.poses.push_back(std::move(initial));
  log_.episodes.push_back(std::move(ep));
}

void TrajectoryRecorder::record_cycle(const env::JointAction& action,
                                      const sim::World& world_after) {
  if (log_.episodes.empty()) throw Error("trajlog: record_cycle before begin_episode");
  if (action.mode != ActionMode::Discrete)
    throw Error("trajlog records discrete-action runs only");
  EpisodeLog& ep = log_.episodes.back();
  ep.actions.push_back(action.discrete);
  std::vector<sim::Pose> poses;
  for (const auto& r : world_after.robots) poses.push_back(r.pose);
  ep.poses.push_back(std::move(poses));
}

void write_trajlog(const TrajectoryLog& log, const std::string& path) {
  json root;
  root["version"] = log.version;
  root["base_seed"] = log.base_seed;
  root["config"] = json::parse(log.config_json);
  json eps = json::array();
  for (const auto& ep : log.episodes) {
    json je;
    je["episode"] = ep.episode;
    je["seed"] = ep.seed;
    je["actions"] = ep.actions;
    json poses = json::array();
    for (const auto& cycle : ep.poses) {
      json row = json::array();
      for (const auto& p : cycle) row.push_back(pose_hex(p));
      poses.push_back(std::move(row));
    }
    je["poses"] = std::move(poses);
    eps.push_back(std::move(je));
  }
  root["episodes"] = std::move(eps);

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write trajectory log: " + path);
  out << root.dump();
}

TrajectoryLog read_trajlog(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"missing trajectory log: " + path});
  json root;
  try {
    root = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError({std::string("trajlog parse: ") + e.what()});
  }
  TrajectoryLog log;
  log.version = root.value("version", -1);
  if (log.version != 1) throw ConfigError({"trajlog: unsupported version"});
  if (!root.contains("config")) throw ConfigError({"trajlog: missing embedded config"});
  log.config_json = root["config"].dump();
  log.base_seed = root.value("base_seed", uint64_t{0});
  for (const auto& je : root.value("episodes", json::array())) {
    EpisodeLog ep;
    ep.episode = je.value("episode", 0);
    ep.seed = je.value("seed", uint64_t{0});
    ep.actions = je.value("actions", std::vector<std::vector<int>>{});
    for (const auto& row : je.value("poses", json::array())) {
      std::vector<sim::Pose> cycle;
      for (const auto& h : row) cycle.push_back(pose_from_hex(h.get<std::string>()));
      ep.poses.push_back(std::move(cycle));
    }
    log.episodes.push_back(std::move(ep));
  }
  return log;
}

ReplayOutcome replay_check(const TrajectoryLog& log) {
  ReplayOutcome out;
  BenchConfig cfg = parse_config(log.config_json, "trajlog-embedded-config");

  env::Env environment(cfg.scenario);
  for (const auto& ep : log.episodes) {
    environment.reset(ep.seed);
    if (ep.poses.empty()) {
      out.ok = false;
      out.first_divergent_episode = ep.episode;
      out.first_divergent_cycle = 0;
      out.message = "episode has no pose records";
      return out;
    }

    auto poses_match = [&](const std::vector<sim::Pose>& logged) {
      const auto& robots = environment.world().robots;
      if (logged.size() != robots.size()) return false;
      for (size_t r = 0; r < robots.size(); ++r)
        if (!(robots[r].pose == logged[r])) return false;
      return true;
    };

    if (!poses_match(ep.poses[0])) {
      out.ok = false;
      out.first_divergent_episode = ep.episode;
      out.first_divergent_cycle = 0;
      out.message = "initial poses diverge";
      return out;
    }
    for (size_t c = 0; c < ep.actions.size(); ++c) {
      try {
        environment.step(env::JointAction::from_discrete(ep.actions[c]));
      } catch (const Error& e) {
        out.ok = false;
        out.first_divergent_episode = ep.episode;
        out.first_divergent_cycle = static_cast<int64_t>(c + 1);
        out.message = std::string("replay step failed: ") + e.what();
        return out;
      }
      if (c + 1 >= ep.poses.size() || !poses_match(ep.poses[c + 1])) {
        out.ok = false;
        out.first_divergent_episode = ep.episode;
        out.first_divergent_cycle = static_cast<int64_t>(c + 1);
        out.message = "poses diverge";
        return out;
      }
    }
    ++out.episodes_checked;
  }
  return out;
}

}  // namespace mrl::bench
