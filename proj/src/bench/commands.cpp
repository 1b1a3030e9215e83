#include "mrl/bench/commands.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "mrl/algo/checkpoint.hpp"
#include "mrl/bench/backend.hpp"
#include "mrl/bench/deploy.hpp"
#include "mrl/bench/metrics.hpp"
#include "mrl/bench/svg.hpp"
#include "mrl/bench/trajlog.hpp"
#include "mrl/errors.hpp"
#include "mrl/manager/manager.hpp"

namespace mrl::bench {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError({"missing config file: " + path});
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_manifest(const std::string& out_dir, const std::string& mode,
                    const std::string& config_path, const std::string& config_bytes,
                    uint64_t seed, int episodes) {
  json m;
  m["version"] = 1;
  m["mode"] = mode;
  m["config_path"] = config_path;
  m["config_fnv64"] = fnv1a64_hex(config_bytes);
  m["seed"] = seed;
  m["episodes"] = episodes;
  std::ofstream out(out_dir + "/manifest.json", std::ios::trunc);
  if (!out) throw Error("cannot write manifest in " + out_dir);
  out << m.dump(2) << "\n";
}

}  // namespace

std::string default_endpoint_binary() {
  char buf[4096];
  const ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return "mrl-endpoint";
  buf[n] = 0;
  fs::path self(buf);
  return (self.parent_path() / "mrl-endpoint").string();
}

int cmd_train(const TrainArgs& args, std::ostream& log) {
  BenchConfig cfg;
  std::string config_bytes;
  try {
    config_bytes = read_file(args.config_path);
    cfg = parse_config(config_bytes, args.config_path);
  } catch (const ConfigError& e) {
    log << e.what() << "\n";
    return kExitConfig;
  }
  if (args.episodes) cfg.training.episodes = *args.episodes;

  try {
    fs::create_directories(args.out_dir);
    write_manifest(args.out_dir, "train", args.config_path, config_bytes, args.seed,
                   cfg.training.episodes);

    auto algorithm = algo::make_algorithm(cfg.algorithm, cfg.scenario, args.seed);
    auto* dqn = dynamic_cast<algo::MultiDqn*>(algorithm.get());

    SimBackend sim(cfg.scenario);
    TrajectoryRecorder recorder(config_bytes, args.seed);
    std::unique_ptr<RecordingBackend> recording;
    manager::Backend* backend = &sim;
    if (!args.trajlog_path.empty()) {
      recording = std::make_unique<RecordingBackend>(sim, recorder);
      backend = recording.get();
    }

    manager::Manager mgr(manager::RunMode::SimTrain, *backend, algorithm.get());
    MetricsWriter metrics(args.out_dir + "/metrics.csv", sim.robot_count());

    const std::string latest = args.out_dir + "/checkpoint_latest.mrl";
    const std::string best = args.out_dir + "/checkpoint_best.mrl";
    int episodes_done = 0;
    double best_trail20 = 0.0;
    auto on_episode = [&](const manager::EpisodeRecord& rec, double trail20, bool) {
      metrics.append(row_from_record(rec, trail20));
      ++episodes_done;
      if (dqn != nullptr && episodes_done % cfg.training.checkpoint_every == 0)
        algo::save_checkpoint(*dqn, cfg.scenario.name, latest);
      // keep the strongest policy seen, judged by the trailing success rate
      if (dqn != nullptr && episodes_done >= 20 && trail20 > best_trail20) {
        best_trail20 = trail20;
        algo::save_checkpoint(*dqn, cfg.scenario.name, best);
      }
      if (episodes_done % 100 == 0)
        log << "episode " << rec.episode << " trail20=" << format_double(trail20)
            << " eps=" << format_double(rec.epsilon) << "\n";
    };

    auto result = mgr.run_training(cfg.training, args.seed, on_episode);

    if (result.episodes_run > 0 && dqn != nullptr)
      algo::save_checkpoint(*dqn, cfg.scenario.name, args.out_dir + "/checkpoint.mrl");
    if (!args.trajlog_path.empty()) write_trajlog(recorder.log(), args.trajlog_path);

    double best_trail = 0.0;
    for (double t : result.trail20) best_trail = std::max(best_trail, t);
    log << "trained " << result.episodes_run << " episodes, best trail20=" <<
        format_double(best_trail);
    if (result.convergence_episode >= 0)
      log << ", convergence detector fired at episode " << result.convergence_episode;
    if (result.stopped_early) log << ", stopped early";
    log << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    log << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << "training failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

EvalSummary run_eval(const EvalArgs& args, std::ostream& log) {
  const std::string config_bytes = read_file(args.config_path);
  BenchConfig cfg = parse_config(config_bytes, args.config_path);

  auto ckpt = algo::load_checkpoint(args.checkpoint_path);
  algo::ensure_compatible(ckpt, cfg.scenario);

  const bool deploy = args.backend == "deploy";
  if (!deploy && args.backend != "sim")
    throw ConfigError({"backend must be 'sim' or 'deploy', got '" + args.backend + "'"});
  const int episodes = args.episodes.value_or(deploy ? 50 : 200);

  fs::create_directories(args.out_dir);
  write_manifest(args.out_dir, deploy ? "eval-deploy" : "eval-sim", args.config_path,
                 config_bytes, args.seed, episodes);

  std::unique_ptr<manager::Backend> backend;
  SimBackend* sim_ptr = nullptr;
  if (deploy) {
    DeployBackend::Options opts;
    opts.transport = args.transport == "inproc" ? Transport::InProcess : Transport::Socket;
    if (args.transport != "inproc" && args.transport != "socket")
      throw ConfigError({"transport must be 'socket' or 'inproc'"});
    opts.perturbation = cfg.deploy;
    opts.deploy_seed = args.seed;
    opts.endpoint_binary =
        args.endpoint_binary.empty() ? default_endpoint_binary() : args.endpoint_binary;
    backend = std::make_unique<DeployBackend>(cfg.scenario, opts);
  } else {
    auto sim = std::make_unique<SimBackend>(cfg.scenario);
    sim_ptr = sim.get();
    backend = std::move(sim);
  }

  TrajectoryRecorder recorder(config_bytes, args.seed);
  std::unique_ptr<RecordingBackend> recording;
  manager::Backend* driver = backend.get();
  if (!args.trajlog_path.empty()) {
    if (deploy) throw ConfigError({"--trajlog requires the sim backend"});
    recording = std::make_unique<RecordingBackend>(*sim_ptr, recorder);
    driver = recording.get();
  }

  manager::Manager mgr(deploy ? manager::RunMode::Deploy : manager::RunMode::SimEval,
                       *driver, ckpt.algorithm.get());
  auto result = mgr.run_evaluation(episodes, args.seed);

  MetricsWriter metrics(args.out_dir + "/eval_metrics.csv", driver->robot_count());
  int joint_sum = 0;
  std::vector<char> joint_hist;
  for (const auto& rec : result.records) {
    joint_hist.push_back(rec.success ? 1 : 0);
    joint_sum += rec.success ? 1 : 0;
    if (static_cast<int>(joint_hist.size()) > 20)
      joint_sum -= joint_hist[joint_hist.size() - 21];
    const int win = std::min<int>(20, static_cast<int>(joint_hist.size()));
    metrics.append(row_from_record(rec, static_cast<double>(joint_sum) / win));
  }
  if (!args.trajlog_path.empty()) write_trajlog(recorder.log(), args.trajlog_path);

  EvalSummary summary;
  summary.success_rate = result.success_rate;
  summary.successes = result.successes;
  summary.episodes = episodes;
  log << "success_rate=" << format_double(summary.success_rate) << " ("
      << summary.successes << "/" << episodes << ")\n";
  return summary;
}

int cmd_eval(const EvalArgs& args, std::ostream& log) {
  try {
    run_eval(args, log);
    return kExitOk;
  } catch (const ConfigError& e) {
    log << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << "evaluation failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_replay(const ReplayArgs& args, std::ostream& log) {
  try {
    TrajectoryLog traj = read_trajlog(args.log_path);
    ReplayOutcome outcome = replay_check(traj);
    if (!outcome.ok) {
      log << "replay divergence in episode " << outcome.first_divergent_episode
          << " at cycle " << outcome.first_divergent_cycle << ": " << outcome.message
          << "\n";
      return kExitDivergence;
    }

    BenchConfig cfg = parse_config(traj.config_json, "trajlog-embedded-config");
    std::vector<std::vector<sim::Pose>> paths;
    if (!traj.episodes.empty()) {
      const auto& ep = traj.episodes.back();
      const size_t n = ep.poses.empty() ? 0 : ep.poses[0].size();
      paths.assign(n, {});
      for (const auto& cycle : ep.poses)
        for (size_t r = 0; r < cycle.size(); ++r) paths[r].push_back(cycle[r]);
    }
    const std::string svg =
        args.svg_path.empty() ? args.log_path + ".svg" : args.svg_path;
    write_trajectory_svg(svg, cfg.scenario, paths);
    log << "replayed " << outcome.episodes_checked << " episodes, zero divergence; wrote "
        << svg << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    log << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << "replay failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

int cmd_plot(const PlotArgs& args, std::ostream& log) {
  try {
    fs::create_directories(args.out_dir);
    auto files = emit_plots(args.metrics_path, args.out_dir);
    for (const auto& f : files) log << "wrote " << f << "\n";
    return kExitOk;
  } catch (const ConfigError& e) {
    log << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    log << "plot failed: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace mrl::bench
