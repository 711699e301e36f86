#include "socnav/humans.hpp"

#include <cmath>

namespace socnav {

namespace {

void advance_waypoint(HumanState& h) {
  const int last = static_cast<int>(h.path.size()) - 1;
  if (last <= 0) return;
  if (h.direction == Direction::Outbound) {
    if (h.current_waypoint < last) {
      ++h.current_waypoint;
    } else {
      h.direction = Direction::Returning;
      h.current_waypoint = last - 1;
    }
  } else {
    if (h.current_waypoint > 0) {
      --h.current_waypoint;
    } else {
      h.direction = Direction::Outbound;
      h.current_waypoint = 1;
    }
  }
}

}  // namespace

HumanState make_human(std::vector<Vec2> path, const Pose2& goal, const SocialForceParams& params) {
  HumanState h;
  h.position = path.empty() ? goal.position : path.front();
  h.path = std::move(path);
  h.goal = goal;
  h.current_waypoint = 0;
  // Skip waypoints already within reach so the first target is ahead.
  const int last = static_cast<int>(h.path.size()) - 1;
  while (h.current_waypoint < last &&
         (h.path[h.current_waypoint] - h.position).norm() < params.waypoint_tolerance) {
    ++h.current_waypoint;
  }
  return h;
}

Vec2 goal_force(const Vec2& position, const Vec2& velocity, const Vec2& target,
                const SocialForceParams& params) {
  const Vec2 to_target = target - position;
  const double d = to_target.norm();
  if (d < 1e-12) return -velocity / params.tau;
  return (params.v_desired * to_target / d - velocity) / params.tau;
}

Vec2 repulsion_force(const Vec2& position, const Vec2& other_position, double other_radius, double strength,
                     double range, double own_radius) {
  const Vec2 away = position - other_position;
  const double d = away.norm();
  if (d < 1e-12) return Vec2::Zero();
  return strength * std::exp((own_radius + other_radius - d) / range) * (away / d);
}

Vec2 repulsion_force(const Vec2& position, const Vec2& other_position, double other_radius,
                     const SocialForceParams& params) {
  return repulsion_force(position, other_position, other_radius, params.a_agent, params.b_agent,
                         params.agent_radius);
}

Vec2 evasion_force(const Vec2& position, const Vec2& velocity, const Vec2& other_position,
                   const Vec2& other_velocity, double other_radius, const SocialForceParams& params) {
  const Vec2 toward = other_position - position;
  const double d = toward.norm();
  if (d < 1e-12 || params.a_evade <= 0) return Vec2::Zero();
  const Vec2 n = toward / d;
  const double closing = (velocity - other_velocity).dot(n);
  if (closing <= 0) return Vec2::Zero();
  const Vec2 right(n.y(), -n.x());
  return params.a_evade * closing * std::exp((params.agent_radius + other_radius - d) / params.b_evade) * right;
}

Vec2 wall_force(const Vec2& position, std::span<const Segment> walls, const SocialForceParams& params) {
  Vec2 total = Vec2::Zero();
  for (const auto& wall : walls) {
    const Vec2 away = position - geom::closest_point_on_segment(position, wall);
    const double d = away.norm();
    if (d < 1e-12) continue;
    total += params.a_wall * std::exp((params.agent_radius - d) / params.b_wall) * (away / d);
  }
  return total;
}

std::vector<HumanState> step_humans(std::span<const HumanState> humans, const RepellingDisc& robot,
                                    std::span<const Segment> walls, const SocialForceParams& params,
                                    double dt) {
  std::vector<HumanState> next(humans.begin(), humans.end());
  for (std::size_t i = 0; i < humans.size(); ++i) {
    HumanState& h = next[i];
    if ((h.target() - h.position).norm() < params.waypoint_tolerance) advance_waypoint(h);

    Vec2 force = goal_force(h.position, h.velocity, h.target(), params);
    for (std::size_t j = 0; j < humans.size(); ++j) {
      if (j == i) continue;
      force += repulsion_force(humans[i].position, humans[j].position, params.agent_radius, params);
      force += evasion_force(humans[i].position, humans[i].velocity, humans[j].position, humans[j].velocity,
                             params.agent_radius, params);
    }
    force += repulsion_force(humans[i].position, robot.position, robot.radius, params.a_robot, params.b_robot,
                             params.agent_radius);
    force += evasion_force(humans[i].position, humans[i].velocity, robot.position, robot.velocity, robot.radius,
                           params);
    force += wall_force(humans[i].position, walls, params);

    Vec2 v = humans[i].velocity + force * dt;
    const double speed = v.norm();
    if (speed > params.v_max) v *= params.v_max / speed;
    h.velocity = v;
    h.position = humans[i].position + v * dt;
  }
  return next;
}

}  // namespace socnav
