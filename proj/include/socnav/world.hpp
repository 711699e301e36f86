#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socnav/geom.hpp"
#include "socnav/rng.hpp"

namespace socnav {

using geom::Pose2;
using geom::Segment;
using geom::Vec2;

inline constexpr int kFormatVersion = 1;

struct NavEdge {
  int from = 0;
  int to = 0;
  double cost = 0.0;
};

/// Static walls plus the navigation graph. Immutable once loaded.
struct WorldMap {
  std::string name;
  std::vector<Segment> segments;
  std::vector<Pose2> nav_nodes;
  std::vector<NavEdge> nav_edges;
  std::vector<int> legal_pose_indices;

  /// True if the closed segment p-q touches any wall.
  bool blocked(const Vec2& p, const Vec2& q) const;
};

/// Parses the map document. Edge costs are Euclidean node distances.
WorldMap map_from_json(const nlohmann::json& doc);
nlohmann::json map_to_json(const WorldMap& map);
WorldMap load_map(const std::filesystem::path& path);

/// Returns one message per violated map invariant; empty when valid.
std::vector<std::string> validate_map(const WorldMap& map);

struct ScenarioConfig {
  std::shared_ptr<const WorldMap> map;
  int h_min = 3;
  int h_max = 5;
  int n_repeat = 1;
  int n_max_iters = 200;
  double eps_success = 0.5;
  double t_fail = 60.0;
  std::uint64_t seed = 1;
  /// Minimum spacing of spawn positions (two agent radii).
  double spawn_clearance = 0.6;
};

struct HumanSpec {
  Pose2 start;
  Pose2 goal;
};

struct Scenario {
  std::shared_ptr<const WorldMap> map;
  Pose2 robot_start;
  Pose2 robot_goal;
  std::vector<HumanSpec> humans;
};

/// Stable 64-bit fingerprint of a scenario's poses.
std::uint64_t scenario_hash(const Scenario& scenario);

/// Draws a scenario. Throws ConfigError when the pose list cannot host h_max
/// humans without overlapping spawns.
Scenario generate_scenario(const ScenarioConfig& cfg, Rng& rng);

/// Lazily yields scenarios, each repeated n_repeat times, n_max_iters in total.
/// Scenario k is drawn from the stream Rng(seed).split(k).
class ScenarioSchedule {
 public:
  struct Item {
    Scenario scenario;
    int scenario_index = 0;
    int repeat_index = 0;
    int episode_index = 0;
  };

  explicit ScenarioSchedule(ScenarioConfig cfg);

  std::optional<Item> next();
  int emitted() const { return emitted_; }
  int total() const { return cfg_.n_max_iters; }

 private:
  ScenarioConfig cfg_;
  Rng root_;
  int emitted_ = 0;
  std::optional<Scenario> current_;
};

/// Scenario drawn for a given episode index of a schedule, without iterating.
Scenario scheduled_scenario(const ScenarioConfig& cfg, int episode_index);

enum class Terminal { Running, Success, Failure };

const char* to_string(Terminal terminal);

/// Success when within eps_success of the goal; Failure once the time budget
/// t_fail is used up.
Terminal check_terminal(const Vec2& robot_position, const Vec2& goal, double t,
                        const ScenarioConfig& cfg);

}  // namespace socnav
