#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "mrl/algo/checkpoint.hpp"
#include "mrl/algo/dqn.hpp"
#include "mrl/algo/sumtree.hpp"
#include "mrl/bench/commands.hpp"
#include "mrl/bench/trajlog.hpp"
#include "mrl/config.hpp"
#include "mrl/env/environment.hpp"
#include "mrl/errors.hpp"
#include "mrl/manager/convergence.hpp"
#include "mrl/sim/pose.hpp"
#include "mrl/sim/world.hpp"

namespace py = pybind11;
using namespace mrl;

namespace {

env::JointAction action_from_py(const py::object& actions, ActionMode mode) {
  if (mode == ActionMode::Discrete)
    return env::JointAction::from_discrete(actions.cast<std::vector<int>>());
  std::vector<sim::Twist> twists;
  for (auto item : actions.cast<py::list>()) {
    auto pair = item.cast<std::pair<double, double>>();
    twists.push_back({pair.first, pair.second});
  }
  return env::JointAction::from_continuous(std::move(twists));
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-robot DRL benchmark: simulator, comm stack and multi-DQN";

  py::register_exception<ConfigError>(m, "ConfigError");
  py::register_exception<EpisodeFinishedError>(m, "EpisodeFinishedError");

  py::class_<sim::Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init<double, double, double>(), py::arg("x"), py::arg("y"),
           py::arg("theta"))
      .def_readwrite("x", &sim::Pose::x)
      .def_readwrite("y", &sim::Pose::y)
      .def_readwrite("theta", &sim::Pose::theta)
      .def("__repr__", [](const sim::Pose& p) {
        std::ostringstream os;
        os << "Pose(" << p.x << ", " << p.y << ", " << p.theta << ")";
        return os.str();
      });

  m.def("step_kinematics", &sim::step_kinematics, py::arg("pose"), py::arg("v"),
        py::arg("omega"), py::arg("dt"));
  m.def("normalize_angle", &sim::normalize_angle, py::arg("angle"));
  m.def(
      "action_decode",
      [](int index) {
        auto t = env::action_decode(index);
        return std::make_pair(t.v, t.w);
      },
      py::arg("index"));

  m.def(
      "convergence_check",
      [](const std::vector<std::vector<bool>>& history, int window, double threshold) {
        std::vector<std::vector<char>> h;
        for (const auto& row : history) h.emplace_back(row.begin(), row.end());
        return manager::convergence_check(h, window, threshold);
      },
      py::arg("history"), py::arg("window") = 20, py::arg("threshold") = 0.8);

  m.def("dueling_combine", [](double value, const std::vector<double>& adv) {
    return algo::dueling_combine(value, adv);
  });
  m.def(
      "double_dqn_target",
      [](double reward, bool done, double gamma, const std::vector<double>& q_online,
         const std::vector<double>& q_target) {
        return algo::double_dqn_target(reward, done, gamma, q_online, q_target);
      },
      py::arg("reward"), py::arg("done"), py::arg("gamma"), py::arg("q_online_next"),
      py::arg("q_target_next"));

  py::class_<algo::SumTree>(m, "SumTree")
      .def(py::init<size_t>(), py::arg("capacity"))
      .def("update", &algo::SumTree::update, py::arg("leaf"), py::arg("priority"))
      .def("sample", &algo::SumTree::sample, py::arg("prefix"))
      .def("priority", &algo::SumTree::priority, py::arg("leaf"))
      .def_property_readonly("total", &algo::SumTree::total)
      .def_property_readonly("capacity", &algo::SumTree::capacity);

  // The joint MDP over the simulator, built from a config file.
  py::class_<env::Env>(m, "Environment")
      .def(py::init([](const std::string& config_path) {
             auto cfg = load_config(config_path);
             return std::make_unique<env::Env>(cfg.scenario);
           }),
           py::arg("config_path"))
      .def("reset",
           [](env::Env& e, uint64_t seed) { return e.reset(seed).per_robot; },
           py::arg("seed"))
      .def(
          "step",
          [](env::Env& e, const py::object& actions) {
            auto result = e.step(action_from_py(actions, e.scenario().action_mode));
            py::dict events;
            std::vector<bool> collided, in_goal;
            for (const auto& ev : result.events.per_robot) {
              collided.push_back(ev.collided);
              in_goal.push_back(ev.in_goal);
            }
            events["collided"] = collided;
            events["in_goal"] = in_goal;
            return py::make_tuple(result.obs.per_robot, result.rewards, result.done,
                                  result.success, events);
          },
          py::arg("actions"))
      .def("poses",
           [](const env::Env& e) {
             std::vector<std::tuple<double, double, double>> out;
             for (const auto& r : e.world().robots)
               out.emplace_back(r.pose.x, r.pose.y, r.pose.theta);
             return out;
           })
      .def_property_readonly("robot_count", &env::Env::robot_count)
      .def_property_readonly("obs_dim", &env::Env::obs_dim)
      .def_property_readonly("done", &env::Env::done)
      .def_property_readonly("success", &env::Env::success)
      .def_property_readonly("steps", &env::Env::steps)
      .def_property_readonly("horizon",
                             [](const env::Env& e) { return e.scenario().horizon; });

  m.def(
      "train",
      [](const std::string& config, uint64_t seed, const std::string& out_dir,
         py::object episodes, const std::string& trajlog) {
        bench::TrainArgs args;
        args.config_path = config;
        args.seed = seed;
        args.out_dir = out_dir;
        if (!episodes.is_none()) args.episodes = episodes.cast<int>();
        args.trajlog_path = trajlog;
        std::ostringstream log;
        const int code = bench::cmd_train(args, log);
        return py::make_tuple(code, log.str());
      },
      py::arg("config"), py::arg("seed") = 0, py::arg("out_dir") = "out",
      py::arg("episodes") = py::none(), py::arg("trajlog") = std::string());

  m.def(
      "evaluate",
      [](const std::string& checkpoint, const std::string& config,
         const std::string& backend, py::object episodes, uint64_t seed,
         const std::string& out_dir, const std::string& transport,
         const std::string& endpoint_binary) {
        bench::EvalArgs args;
        args.checkpoint_path = checkpoint;
        args.config_path = config;
        args.backend = backend;
        if (!episodes.is_none()) args.episodes = episodes.cast<int>();
        args.seed = seed;
        args.out_dir = out_dir;
        args.transport = transport;
        args.endpoint_binary = endpoint_binary;
        std::ostringstream log;
        auto summary = bench::run_eval(args, log);
        py::dict out;
        out["success_rate"] = summary.success_rate;
        out["successes"] = summary.successes;
        out["episodes"] = summary.episodes;
        return out;
      },
      py::arg("checkpoint"), py::arg("config"), py::arg("backend") = "sim",
      py::arg("episodes") = py::none(), py::arg("seed") = 0,
      py::arg("out_dir") = "out", py::arg("transport") = "socket",
      py::arg("endpoint_binary") = std::string());

  m.def(
      "replay",
      [](const std::string& log_path) {
        auto outcome = bench::replay_check(bench::read_trajlog(log_path));
        py::dict out;
        out["ok"] = outcome.ok;
        out["episodes_checked"] = outcome.episodes_checked;
        out["first_divergent_episode"] = outcome.first_divergent_episode;
        out["first_divergent_cycle"] = outcome.first_divergent_cycle;
        return out;
      },
      py::arg("log_path"));

  m.attr("__version__") = "0.1.0";
}
