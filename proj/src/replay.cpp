#include "socnav/replay.hpp"

#include <algorithm>
#include <fstream>
#include <limits>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace socnav {

namespace {

struct Bounds {
  double x0 = std::numeric_limits<double>::infinity();
  double y0 = std::numeric_limits<double>::infinity();
  double x1 = -std::numeric_limits<double>::infinity();
  double y1 = -std::numeric_limits<double>::infinity();
  void add(const Vec2& p) {
    x0 = std::min(x0, p.x());
    y0 = std::min(y0, p.y());
    x1 = std::max(x1, p.x());
    y1 = std::max(y1, p.y());
  }
};

Bounds map_bounds(const WorldMap& map) {
  Bounds b;
  for (const auto& s : map.segments) {
    b.add(s.a);
    b.add(s.b);
  }
  for (const auto& n : map.nav_nodes) b.add(n.position);
  if (b.x0 > b.x1) b = Bounds{0.0, 0.0, 1.0, 1.0};
  b.x0 -= 1.0;
  b.y0 -= 1.0;
  b.x1 += 1.0;
  b.y1 += 1.0;
  return b;
}

}  // namespace

std::string render_frame_svg(const WorldMap& map, const std::string& log_line, const ReplayOptions& opt) {
  const auto step = nlohmann::json::parse(log_line);
  const Bounds b = map_bounds(map);
  const double k = opt.pixels_per_meter;
  // SVG y grows downwards; flip so the map reads with +y up.
  auto X = [&](double x) { return (x - b.x0) * k; };
  auto Y = [&](double y) { return (b.y1 - y) * k; };

  std::string svg = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{:.0f}\" height=\"{:.0f}\">\n"
      "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      (b.x1 - b.x0) * k, (b.y1 - b.y0) * k);
  for (const auto& s : map.segments) {
    svg += fmt::format(
        "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\" stroke-width=\"3\"/>\n",
        X(s.a.x()), Y(s.a.y()), X(s.b.x()), Y(s.b.y()));
  }
  for (const auto& h : step.at("humans")) {
    svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"#d95f02\"/>\n",
                       X(h.at(0).get<double>()), Y(h.at(1).get<double>()), opt.human_radius * k);
  }
  const auto& robot = step.at("robot");
  const double rx = robot.at(0).get<double>();
  const double ry = robot.at(1).get<double>();
  const double th = robot.at(2).get<double>();
  svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"{:.2f}\" fill=\"#1b9e77\"/>\n", X(rx), Y(ry),
                     opt.robot_radius * k);
  svg += fmt::format(
      "<line x1=\"{:.2f}\" y1=\"{:.2f}\" x2=\"{:.2f}\" y2=\"{:.2f}\" stroke=\"black\" stroke-width=\"2\"/>\n",
      X(rx), Y(ry), X(rx + opt.robot_radius * std::cos(th)), Y(ry + opt.robot_radius * std::sin(th)));
  svg += fmt::format("<text x=\"8\" y=\"18\" font-family=\"monospace\" font-size=\"14\">t={:.2f} a={} {}</text>\n",
                     step.at("t").get<double>(), step.at("action").get<int>(),
                     step.value("outcome", std::string{}));
  svg += "</svg>\n";
  return svg;
}

std::size_t render_log(const WorldMap& map, std::istream& log, const std::filesystem::path& out_dir,
                       const ReplayOptions& opt) {
  if (opt.every < 1) throw std::invalid_argument("replay: --every must be >= 1");
  std::vector<std::string> lines;
  for (std::string line; std::getline(log, line);) {
    if (!line.empty()) lines.push_back(std::move(line));
  }
  std::filesystem::create_directories(out_dir);
  std::size_t frames = 0;
  for (std::size_t i = 0; i < lines.size(); ++i) {
    if (i % static_cast<std::size_t>(opt.every) != 0 && i + 1 != lines.size()) continue;
    std::string svg;
    try {
      svg = render_frame_svg(map, lines[i], opt);
    } catch (const nlohmann::json::exception& e) {
      throw std::runtime_error(fmt::format("replay: log line {}: {}", i + 1, e.what()));
    }
    const auto path = out_dir / fmt::format("frame_{:05d}.svg", frames);
    std::ofstream out(path);
    out << svg;
    if (!out) throw std::runtime_error("replay: cannot write " + path.string());
    ++frames;
  }
  return frames;
}

}  // namespace socnav
