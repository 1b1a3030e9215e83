#include <doctest.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mrl/algo/checkpoint.hpp"
#include "mrl/bench/backend.hpp"
#include "mrl/bench/commands.hpp"
#include "mrl/bench/deploy.hpp"
#include "mrl/bench/metrics.hpp"
#include "mrl/bench/svg.hpp"
#include "mrl/bench/trajlog.hpp"
#include "mrl/errors.hpp"
#include "mrl/manager/manager.hpp"
#include "test_helpers.hpp"

using namespace mrl;
using namespace mrl::bench;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

std::string fresh_dir(const std::string& name) {
  const std::string dir = "/tmp/mrl_test_" + name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

// A tiny but complete config for fast end-to-end runs.
std::string write_small_config(const std::string& dir, int horizon = 12,
                               int robots = 3) {
  std::ostringstream js;
  js << R"({"scenario": {"name": "small", "room": [6.0, 4.0], "horizon": )" << horizon
     << R"(, "robots": [)";
  for (int i = 0; i < robots; ++i) {
    if (i) js << ",";
    js << R"({"namespace": "robot_)" << i << R"(", "start": [1.5, )" << (1.0 + i)
       << R"(, 0.0]})";
  }
  js << R"(], "goals": [)";
  for (int i = 0; i < robots; ++i) {
    if (i) js << ",";
    js << R"({"center": [4.5, )" << (1.0 + i) << R"(], "radius": 0.3})";
  }
  js << R"(]},
  "algorithm": {"hidden": [16, 16], "batch_size": 8, "learn_start": 8,
                 "epsilon_decay_episodes": 5, "replay_capacity": 4096},
  "training": {"episodes": 2, "checkpoint_every": 1}})";
  const std::string path = dir + "/config.json";
  std::ofstream out(path);
  out << js.str();
  return path;
}

}  // namespace

TEST_CASE("bundled scenario configs load and match the paper layout") {
  auto cfg1 = load_config(mrl_test::config_dir() + "/scenario1.json");
  CHECK(cfg1.scenario.robots.size() == 3);
  CHECK(cfg1.scenario.obstacles.empty());
  CHECK(cfg1.scenario.room_width == doctest::Approx(6.0));
  CHECK(cfg1.scenario.room_height == doctest::Approx(4.0));
  CHECK(cfg1.scenario.lidar.num_rays == 15);

  auto cfg2 = load_config(mrl_test::config_dir() + "/scenario2.json");
  CHECK(cfg2.scenario.robots.size() == 3);
  CHECK(cfg2.scenario.obstacles.size() == 2);
}

TEST_CASE("config validation reports every problem at once") {
  const std::string bad = R"({
    "scenario": {
      "name": "bad",
      "robots": [{"namespace": "a", "start": [1.0, 1.0, 0.0]},
                  {"namespace": "a", "start": [1.0, 1.0, 0.0]},
                  {"namespace": "c", "start": [9.0, 1.0, 0.0]}],
      "goals": [{"center": [4.0, 1.0]}, {"center": [4.0, 2.0]}],
      "horizon": 0
    }
  })";
  try {
    parse_config(bad, "inline");
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    const std::string what = e.what();
    CHECK(e.issues().size() >= 4);
    CHECK(what.find("3 robots but 2 goals") != std::string::npos);
    CHECK(what.find("duplicate namespace") != std::string::npos);
    CHECK(what.find("horizon") != std::string::npos);
    CHECK(what.find("collides with robot") != std::string::npos);
  }
  CHECK_THROWS_AS(load_config("/tmp/no_such_config.json"), ConfigError);
}

TEST_CASE("metrics round trip and formatting") {
  const std::string dir = fresh_dir("metrics");
  MetricsWriter writer(dir + "/m.csv", 3);
  MetricsRow row;
  row.episode = 0;
  row.returns = {1.5, -0.25, 0.1};
  row.robot_success = {1, 0, 1};
  row.joint_success = false;
  row.steps = 42;
  row.epsilon = 0.5;
  row.trail20 = 0.25;
  writer.append(row);

  auto file = read_metrics(dir + "/m.csv");
  CHECK(file.n_robots == 3);
  REQUIRE(file.rows.size() == 1);
  CHECK(file.rows[0].returns[1] == doctest::Approx(-0.25));
  CHECK(file.rows[0].steps == 42);

  std::ofstream bad(dir + "/bad.csv");
  bad << metrics_header(3) << "\n1,2,3\n";
  bad.close();
  CHECK_THROWS_AS(read_metrics(dir + "/bad.csv"), ConfigError);
}

TEST_CASE("cmd_train smoke: metrics rows, checkpoint, manifest") {
  const std::string dir = fresh_dir("train_smoke");
  const std::string config = write_small_config(dir);

  TrainArgs args;
  args.config_path = config;
  args.seed = 9;
  args.out_dir = dir + "/out";
  args.episodes = 2;
  std::ostringstream log;
  CHECK(cmd_train(args, log) == kExitOk);

  auto metrics = read_metrics(dir + "/out/metrics.csv");
  CHECK(metrics.rows.size() == 2);
  CHECK(fs::exists(dir + "/out/checkpoint.mrl"));
  CHECK(fs::exists(dir + "/out/manifest.json"));
}

TEST_CASE("cmd_train determinism: same seed, byte-identical outputs") {
  const std::string dir = fresh_dir("train_det");
  const std::string config = write_small_config(dir);

  auto run = [&](const std::string& out) {
    TrainArgs args;
    args.config_path = config;
    args.seed = 31;
    args.out_dir = out;
    args.episodes = 2;
    std::ostringstream log;
    REQUIRE(cmd_train(args, log) == kExitOk);
    return slurp(out + "/metrics.csv");
  };
  const std::string a = run(dir + "/a");
  const std::string b = run(dir + "/b");
  CHECK(a == b);
  CHECK(slurp(dir + "/a/checkpoint.mrl") == slurp(dir + "/b/checkpoint.mrl"));
}

TEST_CASE("cmd_train on a missing config exits nonzero without partial outputs") {
  const std::string dir = fresh_dir("train_missing");
  TrainArgs args;
  args.config_path = dir + "/absent.json";
  args.out_dir = dir + "/out";
  std::ostringstream log;
  CHECK(cmd_train(args, log) == kExitConfig);
  CHECK_FALSE(fs::exists(dir + "/out"));
}

TEST_CASE("trajectory log: fresh logs replay with zero divergence") {
  const std::string dir = fresh_dir("trajlog");
  const std::string config = write_small_config(dir);

  TrainArgs args;
  args.config_path = config;
  args.seed = 4;
  args.out_dir = dir + "/out";
  args.episodes = 2;
  args.trajlog_path = dir + "/run.traj.json";
  std::ostringstream log;
  REQUIRE(cmd_train(args, log) == kExitOk);

  ReplayArgs rep;
  rep.log_path = args.trajlog_path;
  rep.svg_path = dir + "/run.svg";
  CHECK(cmd_replay(rep, log) == kExitOk);
  CHECK(fs::exists(dir + "/run.svg"));
}

TEST_CASE("trajectory log: a flipped action is detected at or before its cycle") {
  const std::string dir = fresh_dir("trajflip");
  const std::string config = write_small_config(dir);

  TrainArgs args;
  args.config_path = config;
  args.seed = 4;
  args.out_dir = dir + "/out";
  args.episodes = 1;
  args.trajlog_path = dir + "/run.traj.json";
  std::ostringstream log;
  REQUIRE(cmd_train(args, log) == kExitOk);

  auto traj = read_trajlog(args.trajlog_path);
  REQUIRE(!traj.episodes.empty());
  REQUIRE(traj.episodes[0].actions.size() >= 4);
  const int flip_cycle = 3;
  auto& a = traj.episodes[0].actions[flip_cycle][0];
  a = (a + 1) % 5;
  write_trajlog(traj, dir + "/flipped.json");

  auto outcome = replay_check(read_trajlog(dir + "/flipped.json"));
  CHECK_FALSE(outcome.ok);
  CHECK(outcome.first_divergent_cycle <= flip_cycle + 1);

  ReplayArgs rep;
  rep.log_path = dir + "/flipped.json";
  CHECK(cmd_replay(rep, log) == kExitDivergence);
}

TEST_CASE("empty trajectory log replays cleanly and still renders") {
  const std::string dir = fresh_dir("trajempty");
  const std::string config = write_small_config(dir);
  TrajectoryLog log;
  log.config_json = slurp(config);
  write_trajlog(log, dir + "/empty.json");

  std::ostringstream out;
  ReplayArgs rep;
  rep.log_path = dir + "/empty.json";
  rep.svg_path = dir + "/empty.svg";
  CHECK(cmd_replay(rep, out) == kExitOk);
  CHECK(fs::exists(dir + "/empty.svg"));
}

TEST_CASE("plots from metrics") {
  const std::string dir = fresh_dir("plots");
  const std::string config = write_small_config(dir);
  TrainArgs args;
  args.config_path = config;
  args.seed = 2;
  args.out_dir = dir + "/out";
  args.episodes = 2;
  std::ostringstream log;
  REQUIRE(cmd_train(args, log) == kExitOk);

  PlotArgs plot;
  plot.metrics_path = dir + "/out/metrics.csv";
  plot.out_dir = dir + "/plots";
  CHECK(cmd_plot(plot, log) == kExitOk);
  CHECK(fs::exists(dir + "/plots/rewards.svg"));
  CHECK(fs::exists(dir + "/plots/success_rate.svg"));

  // header-only metrics: diagnostic, no files
  std::ofstream empty(dir + "/empty.csv");
  empty << metrics_header(3) << "\n";
  empty.close();
  PlotArgs bad;
  bad.metrics_path = dir + "/empty.csv";
  bad.out_dir = dir + "/plots2";
  CHECK(cmd_plot(bad, log) == kExitConfig);
  CHECK_FALSE(fs::exists(dir + "/plots2/rewards.svg"));
}

TEST_CASE("deploy backend with identity perturbation reproduces the sim backend") {
  auto sc = mrl_test::three_robots();
  sc.horizon = 8;

  // a tiny greedy policy over an untrained net is still deterministic
  AlgorithmConfig acfg;
  acfg.hidden = {16, 16};
  acfg.learn_start = 64;
  auto algo_sim = algo::make_algorithm(acfg, sc, 77);
  auto algo_dep = algo::make_algorithm(acfg, sc, 77);

  SimBackend sim(sc);
  manager::Manager sim_mgr(manager::RunMode::SimEval, sim, algo_sim.get());
  auto sim_result = sim_mgr.run_evaluation(3, 5);

  DeployBackend::Options opts;
  opts.transport = Transport::InProcess;
  opts.perturbation = DeployPerturbation::identity();
  opts.deploy_seed = 5;
  DeployBackend deploy(sc, opts);
  manager::Manager dep_mgr(manager::RunMode::Deploy, deploy, algo_dep.get());
  auto dep_result = dep_mgr.run_evaluation(3, 5);

  CHECK(sim_result.success_rate == dep_result.success_rate);
  REQUIRE(sim_result.records.size() == dep_result.records.size());
  for (size_t i = 0; i < sim_result.records.size(); ++i) {
    CHECK(sim_result.records[i].returns == dep_result.records[i].returns);
    CHECK(sim_result.records[i].steps == dep_result.records[i].steps);
    CHECK(sim_result.records[i].robot_success == dep_result.records[i].robot_success);
  }
}

TEST_CASE("deploy perturbations change the rollout but stay deterministic") {
  auto sc = mrl_test::three_robots();
  sc.horizon = 8;
  AlgorithmConfig acfg;
  acfg.hidden = {16, 16};
  acfg.learn_start = 64;

  DeployPerturbation pert;  // spec defaults: gain 1.1, noise x2, latency 0-25
  auto run = [&](uint64_t seed) {
    auto algorithm = algo::make_algorithm(acfg, sc, 77);
    DeployBackend::Options opts;
    opts.transport = Transport::InProcess;
    opts.perturbation = pert;
    opts.deploy_seed = seed;
    DeployBackend deploy(sc, opts);
    manager::Manager mgr(manager::RunMode::Deploy, deploy, algorithm.get());
    auto result = mgr.run_evaluation(2, seed);
    std::vector<double> flat;
    for (const auto& rec : result.records)
      flat.insert(flat.end(), rec.returns.begin(), rec.returns.end());
    return flat;
  };
  auto a = run(9);
  auto b = run(9);
  CHECK(a == b);  // deterministic per seed

  auto sim_algorithm = algo::make_algorithm(acfg, sc, 77);
  SimBackend sim(sc);
  manager::Manager sim_mgr(manager::RunMode::SimEval, sim, sim_algorithm.get());
  auto sim_result = sim_mgr.run_evaluation(2, 9);
  std::vector<double> sim_flat;
  for (const auto& rec : sim_result.records)
    sim_flat.insert(sim_flat.end(), rec.returns.begin(), rec.returns.end());
  CHECK(a != sim_flat);  // perturbation actually bites
}

TEST_CASE("deploy gather timeout names the silent robot and fails the episode") {
  auto sc = mrl_test::three_robots();
  sc.horizon = 8;
  AlgorithmConfig acfg;
  acfg.hidden = {16, 16};
  acfg.learn_start = 64;
  auto algorithm = algo::make_algorithm(acfg, sc, 1);

  DeployBackend::Options opts;
  opts.transport = Transport::InProcess;
  opts.perturbation = DeployPerturbation::identity();
  opts.deploy_seed = 3;
  opts.gather_timeout_ms = 100;
  DeployBackend deploy(sc, opts);
  manager::Manager mgr(manager::RunMode::Deploy, deploy, algorithm.get());

  // healthy first episode
  auto rec = mgr.run_episode(0, 5, 0.0, false);
  CHECK(rec.failure.empty());

  deploy.silence_endpoint(2);
  bool threw = false;
  try {
    deploy.reset(1, 6);
  } catch (const GatherTimeoutError& e) {
    threw = true;
    CHECK(std::find(e.missing().begin(), e.missing().end(), 2) != e.missing().end());
  }
  CHECK(threw);

  auto failed = mgr.run_episode(1, 6, 0.0, false);
  CHECK_FALSE(failed.success);
  CHECK_FALSE(failed.failure.empty());
}

TEST_CASE("deploy over sockets matches the in-process transport bit for bit") {
  auto sc = mrl_test::three_robots();
  sc.horizon = 6;
  AlgorithmConfig acfg;
  acfg.hidden = {16, 16};
  acfg.learn_start = 64;

  auto run = [&](Transport transport) {
    auto algorithm = algo::make_algorithm(acfg, sc, 21);
    DeployBackend::Options opts;
    opts.transport = transport;
    opts.perturbation.latency_lo_ms = 0.0;
    opts.perturbation.latency_hi_ms = 25.0;  // exercises the hold rule
    opts.deploy_seed = 13;
    opts.endpoint_binary = mrl_test::endpoint_bin();
    opts.gather_timeout_ms = 5000;  // generous: children share one core
    DeployBackend deploy(sc, opts);
    manager::Manager mgr(manager::RunMode::Deploy, deploy, algorithm.get());
    auto result = mgr.run_evaluation(2, 31);
    std::vector<double> flat;
    for (const auto& rec : result.records) {
      flat.insert(flat.end(), rec.returns.begin(), rec.returns.end());
      flat.push_back(rec.steps);
    }
    return flat;
  };
  CHECK(run(Transport::InProcess) == run(Transport::Socket));
}

TEST_CASE("run_eval honors the documented default episode counts") {
  const std::string dir = fresh_dir("eval_defaults");
  const std::string config = write_small_config(dir, /*horizon=*/2, /*robots=*/1);

  TrainArgs targs;
  targs.config_path = config;
  targs.seed = 1;
  targs.out_dir = dir + "/train";
  targs.episodes = 1;
  std::ostringstream log;
  REQUIRE(cmd_train(targs, log) == kExitOk);

  EvalArgs eargs;
  eargs.checkpoint_path = dir + "/train/checkpoint.mrl";
  eargs.config_path = config;
  eargs.backend = "sim";
  eargs.seed = 1;
  eargs.out_dir = dir + "/eval_sim";
  auto summary = run_eval(eargs, log);
  CHECK(summary.episodes == 200);

  eargs.backend = "deploy";
  eargs.transport = "inproc";
  eargs.out_dir = dir + "/eval_dep";
  summary = run_eval(eargs, log);
  CHECK(summary.episodes == 50);
}

TEST_CASE("eval rejects an incompatible checkpoint") {
  const std::string dir = fresh_dir("eval_mismatch");
  const std::string config3 = write_small_config(dir, 6, 3);

  TrainArgs targs;
  targs.config_path = config3;
  targs.seed = 1;
  targs.out_dir = dir + "/train";
  targs.episodes = 1;
  std::ostringstream log;
  REQUIRE(cmd_train(targs, log) == kExitOk);

  // same checkpoint against a 2-robot scenario
  const std::string dir2 = fresh_dir("eval_mismatch2");
  const std::string config2 = write_small_config(dir2, 6, 2);
  EvalArgs eargs;
  eargs.checkpoint_path = dir + "/train/checkpoint.mrl";
  eargs.config_path = config2;
  eargs.episodes = 1;
  CHECK(cmd_eval(eargs, log) == kExitRuntime);
}

TEST_CASE("fnv1a64 is stable") {
  CHECK(fnv1a64_hex("") == "cbf29ce484222325");
  CHECK(fnv1a64_hex("a") == "af63dc4c8601ec8c");
}
