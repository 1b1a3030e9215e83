#include "mrl/bench/metrics.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mrl/errors.hpp"

namespace mrl::bench {

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

MetricsRow row_from_record(const manager::EpisodeRecord& rec, double trail20) {
  MetricsRow row;
  row.episode = rec.episode;
  row.returns = rec.returns;
  row.robot_success = rec.robot_success;
  row.joint_success = rec.success;
  row.steps = rec.steps;
  row.epsilon = rec.epsilon;
  row.trail20 = trail20;
  return row;
}

std::string metrics_header(int n_robots) {
  std::string h = "episode";
  for (int i = 0; i < n_robots; ++i) h += ",ret_r" + std::to_string(i);
  for (int i = 0; i < n_robots; ++i) h += ",succ_r" + std::to_string(i);
  h += ",succ_joint,steps,epsilon,trail20";
  return h;
}

std::string format_metrics_row(const MetricsRow& row) {
  std::string line = std::to_string(row.episode);
  for (double r : row.returns) line += "," + format_double(r);
  for (char s : row.robot_success) line += s ? ",1" : ",0";
  line += row.joint_success ? ",1" : ",0";
  line += "," + std::to_string(row.steps);
  line += "," + format_double(row.epsilon);
  line += "," + format_double(row.trail20);
  return line;
}

MetricsWriter::MetricsWriter(const std::string& path, int n_robots)
    : path_(path), out_(path, std::ios::binary | std::ios::trunc) {
  if (!out_) throw Error("cannot write metrics file: " + path);
  out_ << metrics_header(n_robots) << "\n";
  out_.flush();
}

void MetricsWriter::append(const MetricsRow& row) {
  out_ << format_metrics_row(row) << "\n";
  out_.flush();
  if (!out_) throw Error("metrics write failed: " + path_);
}

namespace {
std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_num(const std::string& s, const std::string& what) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw ConfigError({what + ": bad number '" + s + "'"});
  return v;
}
}  // namespace

MetricsFile read_metrics(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"cannot open metrics file: " + path});
  std::string header;
  if (!std::getline(in, header)) throw ConfigError({"metrics file is empty: " + path});

  // Robot count from the header shape.
  const auto cols = split_csv(header);
  int n_robots = 0;
  for (const auto& c : cols)
    if (c.rfind("ret_r", 0) == 0) ++n_robots;
  if (n_robots == 0 || header != metrics_header(n_robots))
    throw ConfigError({"unrecognized metrics header: " + header});

  MetricsFile file;
  file.n_robots = n_robots;
  std::string line;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto f = split_csv(line);
    const size_t expected = 1 + 2 * n_robots + 4;
    if (f.size() != expected)
      throw ConfigError({"metrics line " + std::to_string(lineno) + ": expected " +
                         std::to_string(expected) + " fields, got " +
                         std::to_string(f.size())});
    MetricsRow row;
    const std::string at = "metrics line " + std::to_string(lineno);
    row.episode = static_cast<int>(parse_num(f[0], at));
    for (int i = 0; i < n_robots; ++i) row.returns.push_back(parse_num(f[1 + i], at));
    for (int i = 0; i < n_robots; ++i)
      row.robot_success.push_back(parse_num(f[1 + n_robots + i], at) != 0.0);
    row.joint_success = parse_num(f[1 + 2 * n_robots], at) != 0.0;
    row.steps = static_cast<int>(parse_num(f[2 + 2 * n_robots], at));
    row.epsilon = parse_num(f[3 + 2 * n_robots], at);
    row.trail20 = parse_num(f[4 + 2 * n_robots], at);
    file.rows.push_back(std::move(row));
  }
  return file;
}

}  // namespace mrl::bench
