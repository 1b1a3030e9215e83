#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "mrl/manager/manager.hpp"

namespace mrl::bench {

struct MetricsRow {
  int episode = 0;
  std::vector<double> returns;
  std::vector<char> robot_success;
  bool joint_success = false;
  int steps = 0;
  double epsilon = 0.0;
  double trail20 = 0.0;
};

MetricsRow row_from_record(const manager::EpisodeRecord& rec, double trail20);

// Header: episode,ret_r0,..,succ_r0,..,succ_joint,steps,epsilon,trail20.
// Floats use shortest round-trip formatting, so identical runs produce
// byte-identical files.
std::string metrics_header(int n_robots);
std::string format_metrics_row(const MetricsRow& row);

class MetricsWriter {
 public:
  MetricsWriter(const std::string& path, int n_robots);
  void append(const MetricsRow& row);
  const std::string& path() const { return path_; }

 private:
  std::string path_;
  std::ofstream out_;
};

struct MetricsFile {
  int n_robots = 0;
  std::vector<MetricsRow> rows;
};

// Throws ConfigError with diagnostics on malformed input.
MetricsFile read_metrics(const std::string& path);

std::string format_double(double v);  // shortest round-trip

}  // namespace mrl::bench
