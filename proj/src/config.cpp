#include "socnav/config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>

#include "socnav/errors.hpp"

namespace socnav {

namespace {

using nlohmann::json;

constexpr double kDeg = std::numbers::pi / 180.0;

template <typename T>
void read(const json& block, const char* key, T& out) {
  if (!block.contains(key)) return;
  const json& v = block.at(key);
  if constexpr (std::is_floating_point_v<T>) {
    if (!v.is_number()) throw ConfigError(std::string("config: '") + key + "' must be a number");
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) throw ConfigError(std::string("config: '") + key + "' must be an integer");
  }
  out = v.get<T>();
}

const json& block(const json& doc, const char* key) {
  static const json empty = json::object();
  if (!doc.contains(key)) return empty;
  const json& b = doc.at(key);
  if (!b.is_object()) throw ConfigError(std::string("config: '") + key + "' must be an object");
  return b;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

SimConfig default_config() { return SimConfig{}; }

SimConfig config_from_json(const json& doc, const std::filesystem::path& base_dir) {
  if (!doc.is_object()) throw ConfigError("config: document must be an object");
  if (doc.value("format_version", 0) != kFormatVersion) {
    throw ConfigError("config: unsupported format_version (expected 1)");
  }
  SimConfig cfg = default_config();
  try {
    if (doc.contains("map")) {
      const json& m = doc.at("map");
      if (m.is_string()) {
        std::filesystem::path p = m.get<std::string>();
        if (p.is_relative()) p = base_dir / p;
        cfg.scenario.map = std::make_shared<const WorldMap>(load_map(p));
      } else if (m.is_object()) {
        cfg.scenario.map = std::make_shared<const WorldMap>(map_from_json(m));
      } else {
        throw ConfigError("config: 'map' must be a path or a map object");
      }
    }

    const json& sc = block(doc, "scenario");
    read(sc, "h_min", cfg.scenario.h_min);
    read(sc, "h_max", cfg.scenario.h_max);
    read(sc, "n_repeat", cfg.scenario.n_repeat);
    read(sc, "n_max_iters", cfg.scenario.n_max_iters);
    read(sc, "eps_success", cfg.scenario.eps_success);
    read(sc, "t_fail", cfg.scenario.t_fail);
    read(sc, "seed", cfg.scenario.seed);

    const json& sf = block(doc, "social_force");
    auto& social = cfg.env.social;
    read(sf, "tau", social.tau);
    read(sf, "v_desired", social.v_desired);
    read(sf, "A_agent", social.a_agent);
    read(sf, "B_agent", social.b_agent);
    read(sf, "A_wall", social.a_wall);
    read(sf, "B_wall", social.b_wall);
    read(sf, "A_robot", social.a_robot);
    read(sf, "B_robot", social.b_robot);
    read(sf, "A_evade", social.a_evade);
    read(sf, "B_evade", social.b_evade);
    read(sf, "agent_radius", social.agent_radius);
    read(sf, "v_h_max", social.v_max);
    read(sf, "waypoint_tolerance", social.waypoint_tolerance);

    const json& nv = block(doc, "navigation");
    auto& nav = cfg.nav;
    read(nv, "v_max", nav.limits.v_max);
    read(nv, "w_max", nav.limits.w_max);
    read(nv, "a_max", nav.limits.a_max);
    read(nv, "alpha_max", nav.limits.alpha_max);
    read(nv, "control_period", nav.control_period);
    read(nv, "follow_gap", nav.follow_gap);
    read(nv, "pass_offset", nav.pass_offset);
    read(nv, "pass_horizon", nav.pass_horizon);
    read(nv, "lead_range", nav.lead_range);
    read(nv, "connect_radius", nav.connect_radius);
    read(nv, "waypoint_tolerance", nav.waypoint_tolerance);
    if (nv.contains("lead_cone_deg")) {
      double deg = 0;
      read(nv, "lead_cone_deg", deg);
      nav.lead_cone = deg * kDeg;
    }
    const json& ro = block(nv, "rollout");
    read(ro, "linear_samples", nav.rollout.linear_samples);
    read(ro, "angular_samples", nav.rollout.angular_samples);
    read(ro, "horizon", nav.rollout.horizon);
    read(ro, "margin", nav.rollout.margin);
    read(ro, "w_prog", nav.rollout.w_prog);
    read(ro, "w_clear", nav.rollout.w_clear);
    read(ro, "clearance_cap", nav.rollout.clearance_cap);
    read(ro, "heading_lookahead", nav.rollout.heading_lookahead);

    const json& rb = block(doc, "robot");
    read(rb, "radius", nav.robot_radius);
    if (rb.contains("noise_std")) {
      const json& n = rb.at("noise_std");
      if (!n.is_array() || n.size() != 2 || !n[0].is_number() || !n[1].is_number()) {
        throw ConfigError("config: robot.noise_std must be [linear, angular]");
      }
      nav.limits.noise_linear = n[0].get<double>();
      nav.limits.noise_angular = n[1].get<double>();
    }

    const json& scan = block(doc, "scan");
    read(scan, "rays", cfg.env.scan.rays);
    read(scan, "fov_deg", cfg.env.scan.fov_deg);
    read(scan, "max_range", cfg.env.scan.max_range);
    read(scan, "endpoint_radius", cfg.env.scan.endpoint_radius);

    const json& ob = block(doc, "observation");
    read(ob, "h_cap", cfg.env.h_cap);

    const json& rw = block(doc, "reward");
    read(rw, "w1", cfg.reward.w1);
    read(rw, "w2", cfg.reward.w2);
    read(rw, "w3", cfg.reward.w3);
    read(rw, "c", cfg.reward.c);
    read(rw, "gamma", cfg.reward.gamma);

    const json& rf = block(doc, "ref");
    read(rf, "engage_range", cfg.ref.engage_range);
    read(rf, "halt_range", cfg.ref.halt_range);
    read(rf, "away_speed", cfg.ref.away_speed);
    if (rf.contains("cone_deg")) {
      double deg = 0;
      read(rf, "cone_deg", deg);
      cfg.ref.cone = deg * kDeg;
    }
  } catch (const json::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }

  cfg.env.limits = cfg.nav.limits;
  cfg.env.robot_radius = cfg.nav.robot_radius;
  cfg.scenario.spawn_clearance = 2.0 * cfg.env.social.agent_radius;
  validate_config(cfg);
  return cfg;
}

SimConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config " + path.string() + ": " + e.what());
  }
  return config_from_json(doc, path.parent_path());
}

json config_to_json(const SimConfig& cfg) {
  const auto& s = cfg.scenario;
  const auto& sf = cfg.env.social;
  const auto& nv = cfg.nav;
  json doc;
  doc["format_version"] = kFormatVersion;
  doc["map"] = s.map ? s.map->name : std::string();
  doc["scenario"] = {{"h_min", s.h_min},         {"h_max", s.h_max},   {"n_repeat", s.n_repeat},
                     {"n_max_iters", s.n_max_iters}, {"eps_success", s.eps_success},
                     {"t_fail", s.t_fail},       {"seed", s.seed}};
  doc["social_force"] = {{"tau", sf.tau},         {"v_desired", sf.v_desired}, {"A_agent", sf.a_agent},
                         {"B_agent", sf.b_agent}, {"A_wall", sf.a_wall},       {"B_wall", sf.b_wall},
                         {"A_robot", sf.a_robot}, {"B_robot", sf.b_robot},
                         {"A_evade", sf.a_evade}, {"B_evade", sf.b_evade},
                         {"agent_radius", sf.agent_radius}, {"v_h_max", sf.v_max},
                         {"waypoint_tolerance", sf.waypoint_tolerance}};
  doc["navigation"] = {{"v_max", nv.limits.v_max},
                       {"w_max", nv.limits.w_max},
                       {"a_max", nv.limits.a_max},
                       {"alpha_max", nv.limits.alpha_max},
                       {"control_period", nv.control_period},
                       {"follow_gap", nv.follow_gap},
                       {"pass_offset", nv.pass_offset},
                       {"pass_horizon", nv.pass_horizon},
                       {"lead_cone_deg", nv.lead_cone / kDeg},
                       {"lead_range", nv.lead_range},
                       {"connect_radius", nv.connect_radius},
                       {"waypoint_tolerance", nv.waypoint_tolerance},
                       {"rollout",
                        {{"linear_samples", nv.rollout.linear_samples},
                         {"angular_samples", nv.rollout.angular_samples},
                         {"horizon", nv.rollout.horizon},
                         {"margin", nv.rollout.margin},
                         {"w_prog", nv.rollout.w_prog},
                         {"w_clear", nv.rollout.w_clear},
                         {"clearance_cap", nv.rollout.clearance_cap},
                         {"heading_lookahead", nv.rollout.heading_lookahead}}}};
  doc["robot"] = {{"radius", nv.robot_radius},
                  {"noise_std", {nv.limits.noise_linear, nv.limits.noise_angular}}};
  doc["scan"] = {{"rays", cfg.env.scan.rays}, {"fov_deg", cfg.env.scan.fov_deg},
                 {"max_range", cfg.env.scan.max_range},
                 {"endpoint_radius", cfg.env.scan.endpoint_radius}};
  doc["observation"] = {{"h_cap", cfg.env.h_cap}};
  doc["reward"] = {{"w1", cfg.reward.w1}, {"w2", cfg.reward.w2}, {"w3", cfg.reward.w3},
                   {"c", cfg.reward.c},   {"gamma", cfg.reward.gamma}};
  doc["ref"] = {{"engage_range", cfg.ref.engage_range}, {"halt_range", cfg.ref.halt_range},
                {"cone_deg", cfg.ref.cone / kDeg}, {"away_speed", cfg.ref.away_speed}};
  return doc;
}

std::string config_fingerprint(const SimConfig& cfg) {
  std::string text = config_to_json(cfg).dump();
  if (cfg.scenario.map) text += map_to_json(*cfg.scenario.map).dump();
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(fnv1a(text)));
  return buf;
}

void validate_config(const SimConfig& cfg) {
  const auto& s = cfg.scenario;
  auto require = [](bool ok, const char* what) {
    if (!ok) throw ConfigError(std::string("config: ") + what);
  };
  require(s.h_min >= 0 && s.h_min <= s.h_max, "require 0 <= h_min <= h_max");
  require(s.h_max <= cfg.env.h_cap, "h_max exceeds observation capacity h_cap");
  require(s.n_repeat >= 1 && s.n_max_iters >= 1, "n_repeat and n_max_iters must be >= 1");
  require(s.eps_success > 0 && s.t_fail > 0, "eps_success and t_fail must be positive");
  const auto& sf = cfg.env.social;
  require(sf.tau > 0 && sf.v_desired > 0 && sf.a_agent > 0 && sf.b_agent > 0 && sf.a_wall > 0 && sf.b_wall > 0 &&
              sf.a_robot >= 0 && sf.b_robot > 0 && sf.a_evade >= 0 && sf.b_evade > 0 &&
              sf.agent_radius > 0 && sf.v_max > 0,
          "social_force parameters must be positive");
  const auto& lim = cfg.nav.limits;
  require(lim.v_max >= 0 && lim.w_max >= 0 && lim.a_max >= 0 && lim.alpha_max >= 0 && lim.noise_linear >= 0 &&
              lim.noise_angular >= 0,
          "motion limits must be nonnegative");
  const double ratio = cfg.nav.control_period / cfg.env.substep;
  require(cfg.nav.control_period > 0 && std::abs(ratio - std::round(ratio)) < 1e-9,
          "control_period must be a positive multiple of 0.05 s");
  require(cfg.nav.rollout.linear_samples >= 1 && cfg.nav.rollout.angular_samples >= 1,
          "rollout sample counts must be >= 1");
  require(cfg.env.scan.rays >= 1 && cfg.env.scan.max_range > 0 && cfg.env.scan.endpoint_radius >= 0,
          "scan needs rays >= 1, max_range > 0 and endpoint_radius >= 0");
  require(cfg.env.h_cap >= 0, "h_cap must be >= 0");
  require(cfg.reward.gamma > 0 && cfg.reward.gamma <= 1, "gamma must lie in (0, 1]");
}

}  // namespace socnav
