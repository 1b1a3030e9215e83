#include <iostream>

#include <CLI11.hpp>

#include "mrl/comm/channel.hpp"
#include "mrl/comm/endpoint.hpp"

// One robot's onboard process: connects back to the manager and the plant,
// registers, then relays commands (with delivery-latency semantics) and
// states until SHUTDOWN.
int main(int argc, char** argv) {
  CLI::App app{"multirobolearn robot endpoint"};
  mrl::comm::RobotEndpoint::Options opt;
  int manager_port = 0, plant_port = 0;
  app.add_option("--robot-id", opt.robot_id)->required();
  app.add_option("--namespace", opt.ns)->required();
  app.add_option("--manager-port", manager_port)->required();
  app.add_option("--plant-port", plant_port)->required();
  app.add_option("--seed", opt.seed);
  app.add_option("--latency-lo", opt.latency_lo_ms);
  app.add_option("--latency-hi", opt.latency_hi_ms);
  app.add_option("--deadline-ms", opt.deadline_ms);
  app.add_flag("--stop-on-miss", opt.stop_on_miss);
  CLI11_PARSE(app, argc, argv);

  try {
    auto manager_ch = mrl::comm::tcp_connect("127.0.0.1", manager_port, 5000);
    auto plant_ch = mrl::comm::tcp_connect("127.0.0.1", plant_port, 5000);
    mrl::comm::RobotEndpoint endpoint(opt, *manager_ch, *plant_ch);
    endpoint.run();
  } catch (const std::exception& e) {
    std::cerr << "endpoint " << opt.robot_id << ": " << e.what() << "\n";
    return 2;
  }
  return 0;
}
