#include "socnav/world.hpp"

#include <cstring>
#include <fstream>
#include <queue>
#include <sstream>

#include "socnav/errors.hpp"

namespace socnav {

namespace {

using nlohmann::json;

std::uint64_t fnv1a(std::uint64_t h, const void* data, std::size_t n) {
  const auto* bytes = static_cast<const unsigned char*>(data);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= bytes[i];
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::uint64_t hash_pose(std::uint64_t h, const Pose2& pose) {
  const double values[3] = {pose.position.x(), pose.position.y(), pose.heading};
  return fnv1a(h, values, sizeof(values));
}

double number(const json& v, const char* what) {
  if (!v.is_number()) throw ConfigError(std::string("map: expected number in ") + what);
  return v.get<double>();
}

}  // namespace

bool WorldMap::blocked(const Vec2& p, const Vec2& q) const {
  const Segment path(p, q);
  for (const auto& wall : segments) {
    if (geom::segments_intersect(path, wall)) return true;
  }
  return false;
}

WorldMap map_from_json(const json& doc) {
  if (!doc.is_object()) throw ConfigError("map: document must be an object");
  if (doc.value("format_version", 0) != kFormatVersion) {
    throw ConfigError("map: unsupported format_version (expected 1)");
  }
  WorldMap map;
  map.name = doc.value("name", std::string("unnamed"));
  try {
    for (const auto& s : doc.at("segments")) {
      if (!s.is_array() || s.size() != 4) throw ConfigError("map: segment must be [x1,y1,x2,y2]");
      map.segments.emplace_back(number(s[0], "segments"), number(s[1], "segments"),
                                number(s[2], "segments"), number(s[3], "segments"));
    }
    for (const auto& n : doc.at("nav_nodes")) {
      if (!n.is_array() || (n.size() != 3 && n.size() != 2)) {
        throw ConfigError("map: nav node must be [x,y,theta]");
      }
      const double theta = n.size() == 3 ? number(n[2], "nav_nodes") : 0.0;
      map.nav_nodes.emplace_back(number(n[0], "nav_nodes"), number(n[1], "nav_nodes"), theta);
    }
    const int n_nodes = static_cast<int>(map.nav_nodes.size());
    for (const auto& e : doc.at("nav_edges")) {
      if (!e.is_array() || e.size() != 2 || !e[0].is_number_integer() || !e[1].is_number_integer()) {
        throw ConfigError("map: nav edge must be [i,j]");
      }
      NavEdge edge{e[0].get<int>(), e[1].get<int>(), 0.0};
      if (edge.from < 0 || edge.from >= n_nodes || edge.to < 0 || edge.to >= n_nodes) {
        throw ConfigError("map: nav edge index out of range");
      }
      edge.cost = (map.nav_nodes[edge.from].position - map.nav_nodes[edge.to].position).norm();
      map.nav_edges.push_back(edge);
    }
    if (doc.contains("legal_pose_indices")) {
      for (const auto& i : doc.at("legal_pose_indices")) {
        const int idx = i.get<int>();
        if (idx < 0 || idx >= n_nodes) throw ConfigError("map: legal pose index out of range");
        map.legal_pose_indices.push_back(idx);
      }
    } else {
      for (int i = 0; i < n_nodes; ++i) map.legal_pose_indices.push_back(i);
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("map: ") + e.what());
  }
  return map;
}

json map_to_json(const WorldMap& map) {
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["name"] = map.name;
  doc["segments"] = json::array();
  for (const auto& s : map.segments) doc["segments"].push_back({s.a.x(), s.a.y(), s.b.x(), s.b.y()});
  doc["nav_nodes"] = json::array();
  for (const auto& n : map.nav_nodes) {
    doc["nav_nodes"].push_back({n.position.x(), n.position.y(), n.heading});
  }
  doc["nav_edges"] = json::array();
  for (const auto& e : map.nav_edges) doc["nav_edges"].push_back({e.from, e.to});
  doc["legal_pose_indices"] = map.legal_pose_indices;
  return doc;
}

WorldMap load_map(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open map file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("map " + path.string() + ": " + e.what());
  }
  return map_from_json(doc);
}

std::vector<std::string> validate_map(const WorldMap& map) {
  std::vector<std::string> problems;
  const int n_nodes = static_cast<int>(map.nav_nodes.size());
  for (std::size_t i = 0; i < map.segments.size(); ++i) {
    if (map.segments[i].degenerate()) {
      problems.push_back("segment " + std::to_string(i) + " has coincident endpoints");
    }
  }
  for (std::size_t k = 0; k < map.nav_edges.size(); ++k) {
    const auto& e = map.nav_edges[k];
    const std::string name = "nav edge " + std::to_string(k) + " [" + std::to_string(e.from) + "," +
                             std::to_string(e.to) + "]";
    if (e.from < 0 || e.from >= n_nodes || e.to < 0 || e.to >= n_nodes) {
      problems.push_back(name + " references a missing node");
      continue;
    }
    if (!(e.cost > 0)) problems.push_back(name + " has non-positive cost");
    if (map.blocked(map.nav_nodes[e.from].position, map.nav_nodes[e.to].position)) {
      problems.push_back(name + " crosses a wall");
    }
  }
  if (map.legal_pose_indices.empty()) problems.push_back("no legal start/goal poses");

  // Connectivity over the legal poses.
  std::vector<std::vector<int>> adj(n_nodes);
  for (const auto& e : map.nav_edges) {
    if (e.from < 0 || e.from >= n_nodes || e.to < 0 || e.to >= n_nodes) continue;
    adj[e.from].push_back(e.to);
    adj[e.to].push_back(e.from);
  }
  if (!map.legal_pose_indices.empty()) {
    std::vector<char> seen(n_nodes, 0);
    std::queue<int> frontier;
    frontier.push(map.legal_pose_indices.front());
    seen[map.legal_pose_indices.front()] = 1;
    while (!frontier.empty()) {
      const int u = frontier.front();
      frontier.pop();
      for (int v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          frontier.push(v);
        }
      }
    }
    for (int idx : map.legal_pose_indices) {
      if (!seen[idx]) {
        problems.push_back("legal pose " + std::to_string(idx) + " is disconnected from pose " +
                           std::to_string(map.legal_pose_indices.front()));
      }
    }
  }
  return problems;
}

std::uint64_t scenario_hash(const Scenario& scenario) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  h = hash_pose(h, scenario.robot_start);
  h = hash_pose(h, scenario.robot_goal);
  for (const auto& human : scenario.humans) {
    h = hash_pose(h, human.start);
    h = hash_pose(h, human.goal);
  }
  return h;
}

Scenario generate_scenario(const ScenarioConfig& cfg, Rng& rng) {
  if (!cfg.map) throw ConfigError("scenario config has no map");
  if (cfg.h_min < 0 || cfg.h_min > cfg.h_max) throw ConfigError("require 0 <= h_min <= h_max");
  const auto& legal = cfg.map->legal_pose_indices;
  const auto& nodes = cfg.map->nav_nodes;
  if (static_cast<int>(legal.size()) < cfg.h_max + 2) {
    throw ConfigError("pose list has " + std::to_string(legal.size()) + " entries; need at least h_max + 2 = " +
                      std::to_string(cfg.h_max + 2));
  }

  Scenario scenario;
  scenario.map = cfg.map;
  const std::size_t start_slot = rng.index(legal.size());
  std::size_t goal_slot = rng.index(legal.size() - 1);
  if (goal_slot >= start_slot) ++goal_slot;
  scenario.robot_start = nodes[legal[start_slot]];
  scenario.robot_goal = nodes[legal[goal_slot]];

  const int n = static_cast<int>(rng.integer(cfg.h_min, cfg.h_max));
  std::vector<Vec2> occupied{scenario.robot_start.position};
  std::vector<int> free_slots;
  for (int k = 0; k < n; ++k) {
    free_slots.clear();
    for (std::size_t s = 0; s < legal.size(); ++s) {
      const Vec2& p = nodes[legal[s]].position;
      bool clear = true;
      for (const auto& o : occupied) {
        if ((p - o).norm() < cfg.spawn_clearance) {
          clear = false;
          break;
        }
      }
      if (clear) free_slots.push_back(static_cast<int>(s));
    }
    if (free_slots.empty()) {
      throw ConfigError("cannot place " + std::to_string(n) + " humans without overlapping spawns");
    }
    const int s = free_slots[rng.index(free_slots.size())];
    std::size_t g = rng.index(legal.size() - 1);
    if (g >= static_cast<std::size_t>(s)) ++g;
    scenario.humans.push_back({nodes[legal[s]], nodes[legal[g]]});
    occupied.push_back(nodes[legal[s]].position);
  }
  return scenario;
}

ScenarioSchedule::ScenarioSchedule(ScenarioConfig cfg) : cfg_(std::move(cfg)), root_(cfg_.seed) {}

std::optional<ScenarioSchedule::Item> ScenarioSchedule::next() {
  if (emitted_ >= cfg_.n_max_iters) return std::nullopt;
  const int repeat = std::max(cfg_.n_repeat, 1);
  const int scenario_index = emitted_ / repeat;
  const int repeat_index = emitted_ % repeat;
  if (repeat_index == 0) {
    Rng stream = root_.split(static_cast<std::uint64_t>(scenario_index));
    current_ = generate_scenario(cfg_, stream);
  }
  Item item{*current_, scenario_index, repeat_index, emitted_};
  ++emitted_;
  return item;
}

Scenario scheduled_scenario(const ScenarioConfig& cfg, int episode_index) {
  const int repeat = std::max(cfg.n_repeat, 1);
  Rng stream = Rng(cfg.seed).split(static_cast<std::uint64_t>(episode_index / repeat));
  return generate_scenario(cfg, stream);
}

const char* to_string(Terminal terminal) {
  switch (terminal) {
    case Terminal::Running: return "running";
    case Terminal::Success: return "success";
    case Terminal::Failure: return "failure";
  }
  return "running";
}

Terminal check_terminal(const Vec2& robot_position, const Vec2& goal, double t,
                        const ScenarioConfig& cfg) {
  if ((robot_position - goal).norm() < cfg.eps_success) return Terminal::Success;
  // The budget is spent once t reaches t_fail (tolerant of summed dt).
  if (t >= cfg.t_fail - 1e-9) return Terminal::Failure;
  return Terminal::Running;
}

}  // namespace socnav
