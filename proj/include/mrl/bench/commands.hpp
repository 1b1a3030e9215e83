#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace mrl::bench {

// Exit codes shared by the CLI: 0 success, 1 usage/config, 2 runtime
// failure, 3 replay divergence.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 1;
inline constexpr int kExitRuntime = 2;
inline constexpr int kExitDivergence = 3;

struct TrainArgs {
  std::string config_path;
  uint64_t seed = 0;
  std::string out_dir = "out";
  std::optional<int> episodes;  // overrides training.episodes
  std::string trajlog_path;     // empty: no trajectory log
};

struct EvalArgs {
  std::string checkpoint_path;
  std::string config_path;
  std::string backend = "sim";  // sim | deploy
  std::optional<int> episodes;  // defaults: sim 200, deploy 50
  uint64_t seed = 0;
  std::string out_dir = "out";
  std::string transport = "socket";  // deploy only: socket | inproc
  std::string endpoint_binary;       // default: mrl-endpoint next to the CLI
  std::string trajlog_path;          // sim backend only
};

struct ReplayArgs {
  std::string log_path;
  std::string svg_path;  // default: <log>.svg
};

struct PlotArgs {
  std::string metrics_path;
  std::string out_dir = "out";
};

int cmd_train(const TrainArgs& args, std::ostream& log);
int cmd_eval(const EvalArgs& args, std::ostream& log);
int cmd_replay(const ReplayArgs& args, std::ostream& log);
int cmd_plot(const PlotArgs& args, std::ostream& log);

struct EvalSummary {
  double success_rate = 0.0;
  int successes = 0;
  int episodes = 0;
};

// Library form of cmd_eval used by the acceptance suite; throws on failure.
EvalSummary run_eval(const EvalArgs& args, std::ostream& log);

std::string default_endpoint_binary();

}  // namespace mrl::bench
