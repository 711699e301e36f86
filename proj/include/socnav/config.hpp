#pragma once

#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>

#include "socnav/env.hpp"
#include "socnav/nav.hpp"
#include "socnav/world.hpp"

namespace socnav {

/// r = w1 * d_g + w2 * force + w3 * blame (+ c on success).
struct RewardWeights {
  double w1 = 1.0;
  double w2 = -0.3;
  double w3 = -0.3;
  double c = 10.0;
  double gamma = 0.99;
};

/// Thresholds of the hand-written social reference policy.
struct RefParams {
  double engage_range = 2.5;
  double halt_range = 1.5;
  double cone = 0.7853981633974483;  // 45 deg half-angle
  double away_speed = 0.1;
};

/// Everything one simulation run needs. Loaded from the main config JSON.
struct SimConfig {
  ScenarioConfig scenario;
  EnvConfig env;
  NavParams nav;
  RewardWeights reward;
  RefParams ref;

  double dt_action() const { return nav.control_period; }
  int obs_dim() const { return observation_size(env.h_cap); }
};

/// Defaults for every block; scenario.map is left empty.
SimConfig default_config();

/// Parses a config document. A string "map" entry is resolved against base_dir;
/// an object entry is parsed in place. Throws ConfigError.
SimConfig config_from_json(const nlohmann::json& doc, const std::filesystem::path& base_dir);
SimConfig load_config(const std::filesystem::path& path);

/// Canonical serialization (map embedded by name only).
nlohmann::json config_to_json(const SimConfig& cfg);

/// Hex FNV-1a digest of the canonical serialization plus the map document.
std::string config_fingerprint(const SimConfig& cfg);

/// Throws ConfigError on violated parameter invariants.
void validate_config(const SimConfig& cfg);

}  // namespace socnav
