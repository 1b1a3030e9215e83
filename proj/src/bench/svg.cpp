#include "mrl/bench/svg.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "mrl/bench/metrics.hpp"
#include "mrl/errors.hpp"

namespace mrl::bench {

namespace {

const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#d62728",
                          "#9467bd", "#8c564b", "#e377c2"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write " + path);
  out << content;
}

}  // namespace

void write_line_chart_svg(const std::string& path, const std::string& title,
                          const std::vector<Series>& series, const std::string& x_label,
                          const std::string& y_label) {
  const double W = 860, H = 520;
  const double ml = 70, mr = 30, mt = 50, mb = 60;
  const double pw = W - ml - mr, ph = H - mt - mb;

  size_t n = 0;
  double ymin = 0.0, ymax = 1.0;
  bool first = true;
  for (const auto& s : series) {
    n = std::max(n, s.ys.size());
    for (double y : s.ys) {
      if (first) {
        ymin = ymax = y;
        first = false;
      }
      ymin = std::min(ymin, y);
      ymax = std::max(ymax, y);
    }
  }
  if (n == 0) throw ConfigError({"nothing to plot"});
  if (ymax == ymin) {
    ymax += 1.0;
    ymin -= 1.0;
  }
  const double pad = 0.05 * (ymax - ymin);
  ymin -= pad;
  ymax += pad;

  auto px = [&](double i) { return ml + (n > 1 ? pw * i / (n - 1) : pw / 2); };
  auto py = [&](double y) { return mt + ph * (1.0 - (y - ymin) / (ymax - ymin)); };

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" +
         fmt(H) + "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<text x=\"" + fmt(W / 2) + "\" y=\"28\" text-anchor=\"middle\" font-size=\"18\" "
         "font-family=\"sans-serif\">" + title + "</text>\n";

  // axes
  svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt) + "\" x2=\"" + fmt(ml) +
         "\" y2=\"" + fmt(mt + ph) + "\" stroke=\"black\"/>\n";
  svg += "<line x1=\"" + fmt(ml) + "\" y1=\"" + fmt(mt + ph) + "\" x2=\"" + fmt(ml + pw) +
         "\" y2=\"" + fmt(mt + ph) + "\" stroke=\"black\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double yv = ymin + (ymax - ymin) * t / 4.0;
    const double yy = py(yv);
    svg += "<line x1=\"" + fmt(ml - 4) + "\" y1=\"" + fmt(yy) + "\" x2=\"" + fmt(ml) +
           "\" y2=\"" + fmt(yy) + "\" stroke=\"black\"/>\n";
    svg += "<text x=\"" + fmt(ml - 8) + "\" y=\"" + fmt(yy + 4) +
           "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\">" +
           fmt(yv) + "</text>\n";
    const double xv = n > 1 ? (n - 1) * t / 4.0 : 0;
    const double xx = px(xv);
    svg += "<text x=\"" + fmt(xx) + "\" y=\"" + fmt(mt + ph + 18) +
           "\" text-anchor=\"middle\" font-size=\"12\" font-family=\"sans-serif\">" +
           std::to_string(static_cast<long>(xv)) + "</text>\n";
  }
  svg += "<text x=\"" + fmt(ml + pw / 2) + "\" y=\"" + fmt(H - 14) +
         "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\">" +
         x_label + "</text>\n";
  svg += "<text x=\"18\" y=\"" + fmt(mt + ph / 2) +
         "\" text-anchor=\"middle\" font-size=\"14\" font-family=\"sans-serif\" "
         "transform=\"rotate(-90 18 " + fmt(mt + ph / 2) + ")\">" + y_label + "</text>\n";

  for (size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    if (s.ys.empty()) continue;
    std::string pts;
    for (size_t i = 0; i < s.ys.size(); ++i)
      pts += fmt(px(static_cast<double>(i))) + "," + fmt(py(s.ys[i])) + " ";
    const char* color = kPalette[si % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"1.5\"/>\n";
    svg += "<text x=\"" + fmt(ml + pw - 4) + "\" y=\"" + fmt(mt + 16 + 16 * si) +
           "\" text-anchor=\"end\" font-size=\"12\" font-family=\"sans-serif\" fill=\"" +
           color + "\">" + s.label + "</text>\n";
  }
  svg += "</svg>\n";
  write_file(path, svg);
}

std::vector<std::string> emit_plots(const std::string& metrics_path,
                                    const std::string& out_dir) {
  MetricsFile metrics = read_metrics(metrics_path);
  if (metrics.rows.empty()) throw ConfigError({"metrics file has no data rows"});

  std::vector<Series> rewards;
  for (int r = 0; r < metrics.n_robots; ++r) {
    Series s;
    s.label = "robot_" + std::to_string(r);
    for (const auto& row : metrics.rows) s.ys.push_back(row.returns[r]);
    rewards.push_back(std::move(s));
  }
  std::vector<Series> success(1);
  success[0].label = "trailing-20 joint success";
  for (const auto& row : metrics.rows) success[0].ys.push_back(row.trail20);

  const std::string rewards_path = out_dir + "/rewards.svg";
  const std::string success_path = out_dir + "/success_rate.svg";
  write_line_chart_svg(rewards_path, "Episode return per robot", rewards, "episode",
                       "return");
  write_line_chart_svg(success_path, "Trailing-20 joint success rate", success, "episode",
                       "success rate");
  return {rewards_path, success_path};
}

void write_trajectory_svg(const std::string& path, const ScenarioConfig& scenario,
                          const std::vector<std::vector<sim::Pose>>& robot_paths) {
  const double scale = 120.0;
  const double margin = 30.0;
  const double W = scenario.room_width * scale + 2 * margin;
  const double H = scenario.room_height * scale + 2 * margin;
  auto X = [&](double x) { return margin + x * scale; };
  auto Y = [&](double y) { return H - margin - y * scale; };  // y up

  std::string svg;
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt(W) + "\" height=\"" +
         fmt(H) + "\" viewBox=\"0 0 " + fmt(W) + " " + fmt(H) + "\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg += "<rect x=\"" + fmt(X(0)) + "\" y=\"" + fmt(Y(scenario.room_height)) + "\" width=\"" +
         fmt(scenario.room_width * scale) + "\" height=\"" +
         fmt(scenario.room_height * scale) +
         "\" fill=\"#fafafa\" stroke=\"black\" stroke-width=\"2\"/>\n";

  for (const auto& b : scenario.obstacles)
    svg += "<rect x=\"" + fmt(X(b.min_x)) + "\" y=\"" + fmt(Y(b.max_y)) + "\" width=\"" +
           fmt((b.max_x - b.min_x) * scale) + "\" height=\"" +
           fmt((b.max_y - b.min_y) * scale) + "\" fill=\"#ff9933\" stroke=\"#cc6600\"/>\n";

  for (size_t i = 0; i < scenario.goals.size(); ++i) {
    const auto& g = scenario.goals[i];
    const char* color = kPalette[i % (sizeof(kPalette) / sizeof(kPalette[0]))];
    svg += "<circle cx=\"" + fmt(X(g.cx)) + "\" cy=\"" + fmt(Y(g.cy)) + "\" r=\"" +
           fmt(g.radius * scale) + "\" fill=\"#dddddd\" stroke=\"" + color + "\"/>\n";
  }

  for (size_t r = 0; r < robot_paths.size(); ++r) {
    const char* color = kPalette[r % (sizeof(kPalette) / sizeof(kPalette[0]))];
    if (robot_paths[r].empty()) continue;
    std::string pts;
    for (const auto& p : robot_paths[r]) pts += fmt(X(p.x)) + "," + fmt(Y(p.y)) + " ";
    svg += "<polyline points=\"" + pts + "\" fill=\"none\" stroke=\"" + std::string(color) +
           "\" stroke-width=\"2\"/>\n";
    const auto& s = robot_paths[r].front();
    svg += "<circle cx=\"" + fmt(X(s.x)) + "\" cy=\"" + fmt(Y(s.y)) +
           "\" r=\"5\" fill=\"" + color + "\"/>\n";
  }
  svg += "</svg>\n";
  write_file(path, svg);
}

}  // namespace mrl::bench
