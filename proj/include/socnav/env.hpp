#pragma once

#include <span>
#include <vector>

#include <Eigen/Core>

#include "socnav/geom.hpp"
#include "socnav/humans.hpp"
#include "socnav/nav.hpp"
#include "socnav/rng.hpp"
#include "socnav/world.hpp"

namespace socnav {

struct SimState {
  Pose2 robot_pose;
  Twist robot_vel;
  Pose2 goal;
  std::vector<HumanState> humans;
  double t = 0.0;
  Rng rng;
};

struct ScanConfig {
  int rays = 360;
  double fov_deg = 360.0;
  double max_range = 10.0;
  /// Wall ends are scanned as small discs so rays grazing a free end still
  /// register it.
  double endpoint_radius = 0.05;
};

struct EnvConfig {
  MotionLimits limits;
  double robot_radius = 0.3;
  SocialForceParams social;
  ScanConfig scan;
  double substep = 0.05;
  int h_cap = 5;
};

struct ScanRay {
  double angle = 0.0;
  double range = 0.0;
};

struct CollisionCounts {
  int human = 0;
  int wall = 0;
};

/// Length of the observation vector for a given human capacity.
constexpr int observation_size(int h_cap) { return 6 + 4 * h_cap; }

/// [goal_x, goal_y, local_x, local_y, v, w, then per slot rel_px, rel_py, rel_vx, rel_vy],
/// everything in the robot frame.
using Observation = Eigen::VectorXd;

/// Advances one action period: the robot tracks cmd under acceleration limits
/// and integrates exact constant-twist arcs per substep; humans step with it.
/// dt_action must be a positive multiple of cfg.substep.
SimState step_env(const SimState& state, const VelocityCommand& cmd, double dt_action, const WorldMap& map,
                  const EnvConfig& cfg);

CollisionCounts detect_collisions(const SimState& state, const WorldMap& map, const EnvConfig& cfg);

/// Rays sweep the field of view counter-clockwise in the robot frame; ray
/// rays/2 points straight ahead when the view is a full circle.
std::vector<ScanRay> simulate_scan(const SimState& state, const WorldMap& map, const EnvConfig& cfg);

/// Robot-frame hit points of the rays that returned before max_range.
std::vector<Vec2> scan_points(std::span<const ScanRay> scan, double max_range);

/// Humans are occluded only by walls crossing the sight line between centers.
bool human_visible(const Vec2& robot, const Vec2& human, const WorldMap& map);

/// Indices of visible humans, nearest first (ties by index).
std::vector<std::size_t> visible_humans(const SimState& state, const WorldMap& map);

Observation observe(const SimState& state, const WorldMap& map, const Vec2& local_goal, int h_cap);

inline Terminal check_terminal(const SimState& state, const ScenarioConfig& cfg) {
  return check_terminal(state.robot_pose.position, state.goal.position, state.t, cfg);
}

}  // namespace socnav
