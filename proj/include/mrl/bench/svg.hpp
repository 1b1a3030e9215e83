#pragma once

#include <string>
#include <vector>

#include "mrl/config.hpp"
#include "mrl/sim/pose.hpp"

namespace mrl::bench {

struct Series {
  std::string label;
  std::vector<double> ys;
};

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::vector<Series>& series, const std::string& x_label,
                          const std::string& y_label);

// Reward-vs-episode (per robot) and trailing-success-rate-vs-episode charts.
// Returns the files written; empty metrics raise ConfigError and write nothing.
std::vector<std::string> emit_plots(const std::string& metrics_path,
                                    const std::string& out_dir);

// Top-down room view: walls, obstacles, goal disks and one polyline per robot.
void write_trajectory_svg(const std::string& path, const ScenarioConfig& scenario,
                          const std::vector<std::vector<sim::Pose>>& robot_paths);

}  // namespace mrl::bench
