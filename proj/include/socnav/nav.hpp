#pragma once

#include <optional>
#include <span>
#include <vector>

#include "socnav/geom.hpp"
#include "socnav/humans.hpp"
#include "socnav/world.hpp"

namespace socnav {

/// Unicycle twist: forward speed and yaw rate.
struct Twist {
  double linear = 0.0;
  double angular = 0.0;

  bool operator==(const Twist&) const = default;
};

using VelocityCommand = Twist;

enum class DiscreteAction : int { Halt = 0, GoAlone = 1, Follow = 2, Pass = 3 };

inline constexpr int kNumActions = 4;

std::optional<DiscreteAction> action_from_index(long long value);
const char* to_string(DiscreteAction action);

struct MotionLimits {
  double v_max = 1.0;
  double w_max = 1.5;
  double a_max = 2.0;
  double alpha_max = 3.0;
  double noise_linear = 0.0;
  double noise_angular = 0.0;
};

struct RolloutParams {
  int linear_samples = 5;
  int angular_samples = 11;
  double horizon = 2.0;
  double margin = 0.1;
  double w_prog = 1.0;
  double w_clear = 0.25;
  /// Clearance beyond this adds nothing to an arc's score.
  double clearance_cap = 1.0;
  /// Progress is measured at a point this far ahead of the robot center, so
  /// turning toward a goal behind the robot scores above standing still.
  double heading_lookahead = 0.3;
};

struct NavParams {
  MotionLimits limits;
  double control_period = 0.2;
  double robot_radius = 0.3;
  RolloutParams rollout;
  double follow_gap = 1.0;
  double pass_offset = 0.75;
  double pass_horizon = 1.0;
  double lead_cone = 0.7853981633974483;  // 45 deg half-angle
  double lead_range = 5.0;
  double connect_radius = 2.0;
  double waypoint_tolerance = 0.5;
};

struct GlobalPlan {
  std::vector<Pose2> waypoints;
  int next_index = 0;
  double cost = 0.0;

  const Pose2& local_goal() const { return waypoints[next_index]; }
  /// Greedily skips waypoints that position is already within tol of.
  void advance(const Vec2& position, double tol);
};

/// Shortest path over the navigation graph, with start and goal attached to
/// every node within connect_radius whose connector is wall-free. Throws
/// NoPathError when the goal is unreachable.
GlobalPlan plan_global(const WorldMap& map, const Pose2& start, const Pose2& goal,
                       double connect_radius = 2.0);

/// Robot-frame pose after following a constant twist for t seconds from the origin.
Pose2 arc_pose(const Twist& twist, double t);

/// Exact distance from p to the path swept by a constant twist over [0, horizon].
double arc_point_distance(const Twist& twist, double horizon, const Vec2& p);

/// Command that brakes toward (0, 0) as hard as the limits allow in one period.
VelocityCommand brake_command(const Twist& current, const NavParams& params);

/// Trajectory rollout over a (v, w) grid inside the dynamic window. Scan points
/// and local_goal are in the robot frame. speed_cap further bounds linear speed.
VelocityCommand rollout_local(const Twist& current, std::span<const Vec2> scan_points,
                              const Vec2& local_goal, const NavParams& params,
                              std::optional<double> speed_cap = std::nullopt);

/// Nearest human inside the forward cone and lead range. Index into humans.
std::optional<std::size_t> select_lead_human(const Pose2& robot_pose, std::span<const HumanState> humans,
                                             const NavParams& params);

/// Maps a discrete sub-policy onto a velocity command. visible_humans and plan
/// are in world coordinates; scan_points in the robot frame.
VelocityCommand execute_action(DiscreteAction action, const Pose2& robot_pose, const Twist& robot_vel,
                               const GlobalPlan& plan, std::span<const HumanState> visible_humans,
                               std::span<const Vec2> scan_points, const NavParams& params);

}  // namespace socnav
