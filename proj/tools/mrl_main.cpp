#include <iostream>

#include <CLI11.hpp>

#include "mrl/bench/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"MultiRoboLearn-style multi-robot DRL benchmark"};
  app.require_subcommand(1);

  mrl::bench::TrainArgs train_args;
  auto* train = app.add_subcommand("train", "train multi-DQN agents in simulation");
  train->add_option("--config,-c", train_args.config_path, "scenario/algorithm config")
      ->required();
  train->add_option("--seed,-s", train_args.seed, "run seed");
  train->add_option("--out,-o", train_args.out_dir, "output directory");
  int train_eps = -1;
  train->add_option("--episodes,-e", train_eps, "override training.episodes");
  train->add_option("--trajlog", train_args.trajlog_path, "write a trajectory log");

  mrl::bench::EvalArgs eval_args;
  auto* eval = app.add_subcommand("eval", "evaluate a checkpoint greedily");
  eval->add_option("--checkpoint", eval_args.checkpoint_path, "trained checkpoint")
      ->required();
  eval->add_option("--config,-c", eval_args.config_path, "scenario config")->required();
  eval->add_option("--backend", eval_args.backend, "sim | deploy");
  eval->add_option("--seed,-s", eval_args.seed, "run seed");
  int eval_eps = -1;
  eval->add_option("--episodes,-e", eval_eps, "episode count (default: sim 200, deploy 50)");
  eval->add_option("--out,-o", eval_args.out_dir, "output directory");
  eval->add_option("--transport", eval_args.transport, "deploy transport: socket | inproc");
  eval->add_option("--endpoint-bin", eval_args.endpoint_binary, "robot endpoint binary");
  eval->add_option("--trajlog", eval_args.trajlog_path, "write a trajectory log (sim)");

  mrl::bench::EvalArgs deploy_args;
  deploy_args.backend = "deploy";
  auto* deploy = app.add_subcommand("deploy", "alias for eval --backend deploy");
  deploy->add_option("--checkpoint", deploy_args.checkpoint_path, "trained checkpoint")
      ->required();
  deploy->add_option("--config,-c", deploy_args.config_path, "scenario config")->required();
  deploy->add_option("--seed,-s", deploy_args.seed, "run seed");
  int deploy_eps = -1;
  deploy->add_option("--episodes,-e", deploy_eps, "episode count (default 50)");
  deploy->add_option("--out,-o", deploy_args.out_dir, "output directory");
  deploy->add_option("--transport", deploy_args.transport, "socket | inproc");
  deploy->add_option("--endpoint-bin", deploy_args.endpoint_binary, "robot endpoint binary");

  mrl::bench::ReplayArgs replay_args;
  auto* replay = app.add_subcommand("replay", "re-simulate a trajectory log and verify it");
  replay->add_option("--log", replay_args.log_path, "trajectory log")->required();
  replay->add_option("--svg", replay_args.svg_path, "output SVG path");

  mrl::bench::PlotArgs plot_args;
  auto* plot = app.add_subcommand("plot", "emit SVG charts from a metrics file");
  plot->add_option("--metrics", plot_args.metrics_path, "metrics.csv")->required();
  plot->add_option("--out,-o", plot_args.out_dir, "output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : mrl::bench::kExitConfig;
  }

  if (train->parsed()) {
    if (train_eps >= 0) train_args.episodes = train_eps;
    return mrl::bench::cmd_train(train_args, std::cout);
  }
  if (eval->parsed()) {
    if (eval_eps >= 0) eval_args.episodes = eval_eps;
    return mrl::bench::cmd_eval(eval_args, std::cout);
  }
  if (deploy->parsed()) {
    if (deploy_eps >= 0) deploy_args.episodes = deploy_eps;
    return mrl::bench::cmd_eval(deploy_args, std::cout);
  }
  if (replay->parsed()) return mrl::bench::cmd_replay(replay_args, std::cout);
  if (plot->parsed()) return mrl::bench::cmd_plot(plot_args, std::cout);
  return mrl::bench::kExitConfig;
}
