#pragma once

#include <span>
#include <vector>

#include "socnav/geom.hpp"

namespace socnav {

using geom::Pose2;
using geom::Segment;
using geom::Vec2;

struct SocialForceParams {
  double tau = 0.5;
  double v_desired = 1.0;
  double a_agent = 2.0;
  double b_agent = 0.35;
  double a_wall = 3.0;
  double b_wall = 0.2;
  /// Repulsion from the robot. Stronger and wider than between humans so that
  /// pedestrians keep clear of a stopped robot instead of settling at contact.
  double a_robot = 6.0;
  double b_robot = 0.5;
  /// Anticipatory keep-right evasion toward agents that are closing in.
  /// Radial repulsion alone cannot resolve a collinear head-on encounter.
  double a_evade = 2.0;
  double b_evade = 1.0;
  double agent_radius = 0.3;
  double v_max = 1.5;
  /// Distance at which a waypoint counts as reached.
  double waypoint_tolerance = 0.5;
};

enum class Direction { Outbound, Returning };

/// A pedestrian walking back and forth along its waypoint path.
struct HumanState {
  Vec2 position = Vec2::Zero();
  Vec2 velocity = Vec2::Zero();
  /// path.front() is the start, path.back() the goal.
  std::vector<Vec2> path;
  int current_waypoint = 0;
  Pose2 goal;
  Direction direction = Direction::Outbound;

  Vec2 target() const { return path.empty() ? position : path[current_waypoint]; }
};

/// Builds a human at the start of its path, heading for the first waypoint
/// that is not already under foot.
HumanState make_human(std::vector<Vec2> path, const Pose2& goal, const SocialForceParams& params);

/// Relaxation toward v_desired along the direction to target.
Vec2 goal_force(const Vec2& position, const Vec2& velocity, const Vec2& target,
                const SocialForceParams& params);

inline Vec2 goal_force(const HumanState& h, const Vec2& target, const SocialForceParams& params) {
  return goal_force(h.position, h.velocity, target, params);
}

/// Exponential repulsion from another disc, directed away from it.
Vec2 repulsion_force(const Vec2& position, const Vec2& other_position, double other_radius,
                     const SocialForceParams& params);
Vec2 repulsion_force(const Vec2& position, const Vec2& other_position, double other_radius, double strength,
                     double range, double own_radius);

inline Vec2 repulsion_force(const HumanState& h, const Vec2& other_position, double other_radius,
                            const SocialForceParams& params) {
  return repulsion_force(h.position, other_position, other_radius, params);
}

/// Sum of exponential repulsions from the closest point of each wall.
Vec2 wall_force(const Vec2& position, std::span<const Segment> walls, const SocialForceParams& params);

/// Sidestep to the right of the line of sight to an approaching agent:
/// a_evade * closing_speed * exp((r_ij - d) / b_evade). Zero when not closing.
Vec2 evasion_force(const Vec2& position, const Vec2& velocity, const Vec2& other_position,
                   const Vec2& other_velocity, double other_radius, const SocialForceParams& params);

struct RepellingDisc {
  Vec2 position = Vec2::Zero();
  double radius = 0.0;
  Vec2 velocity = Vec2::Zero();
};

/// Advances every human by dt. Forces are evaluated on the pre-step snapshot
/// (synchronous explicit Euler), so the result does not depend on ordering.
std::vector<HumanState> step_humans(std::span<const HumanState> humans, const RepellingDisc& robot,
                                    std::span<const Segment> walls, const SocialForceParams& params,
                                    double dt);

}  // namespace socnav
