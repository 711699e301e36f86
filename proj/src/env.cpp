#include "socnav/env.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace socnav {

namespace {

double approach(double value, double target, double max_delta) {
  if (target > value) return std::min(target, value + max_delta);
  return std::max(target, value - max_delta);
}

Pose2 integrate_arc(const Pose2& pose, double v, double w, double dt) {
  const double theta = pose.heading;
  Vec2 p = pose.position;
  if (std::abs(w) < 1e-9) {
    p += v * dt * Vec2(std::cos(theta), std::sin(theta));
  } else {
    const double r = v / w;
    p += Vec2(r * (std::sin(theta + w * dt) - std::sin(theta)), -r * (std::cos(theta + w * dt) - std::cos(theta)));
  }
  return Pose2(p, theta + w * dt);
}

}  // namespace

SimState step_env(const SimState& state, const VelocityCommand& cmd, double dt_action, const WorldMap& map,
                  const EnvConfig& cfg) {
  const double ratio = dt_action / cfg.substep;
  const int substeps = static_cast<int>(std::lround(ratio));
  if (substeps < 1 || std::abs(ratio - substeps) > 1e-9) {
    throw std::invalid_argument("dt_action must be a positive multiple of the substep");
  }
  const double dt = cfg.substep;
  const auto& lim = cfg.limits;
  const double target_v = std::clamp(cmd.linear, -lim.v_max, lim.v_max);
  const double target_w = std::clamp(cmd.angular, -lim.w_max, lim.w_max);

  SimState next = state;
  for (int k = 0; k < substeps; ++k) {
    const RepellingDisc robot{next.robot_pose.position, cfg.robot_radius,
                              next.robot_vel.linear * next.robot_pose.forward()};
    std::vector<HumanState> humans = step_humans(next.humans, robot, map.segments, cfg.social, dt);

    next.robot_vel.linear = approach(next.robot_vel.linear, target_v, lim.a_max * dt);
    next.robot_vel.angular = approach(next.robot_vel.angular, target_w, lim.alpha_max * dt);
    double v = next.robot_vel.linear;
    double w = next.robot_vel.angular;
    if (lim.noise_linear > 0) v += next.rng.normal(0.0, lim.noise_linear);
    if (lim.noise_angular > 0) w += next.rng.normal(0.0, lim.noise_angular);
    next.robot_pose = integrate_arc(next.robot_pose, v, w, dt);
    next.humans = std::move(humans);
  }
  next.t = state.t + dt_action;
  return next;
}

CollisionCounts detect_collisions(const SimState& state, const WorldMap& map, const EnvConfig& cfg) {
  CollisionCounts counts;
  const Vec2& p = state.robot_pose.position;
  for (const auto& h : state.humans) {
    if ((p - h.position).norm() < cfg.robot_radius + cfg.social.agent_radius) ++counts.human;
  }
  for (const auto& wall : map.segments) {
    if (geom::point_segment_distance(p, wall) < cfg.robot_radius) {
      counts.wall = 1;
      break;
    }
  }
  return counts;
}

std::vector<ScanRay> simulate_scan(const SimState& state, const WorldMap& map, const EnvConfig& cfg) {
  const ScanConfig& sc = cfg.scan;
  const int n = std::max(sc.rays, 1);
  const double fov = sc.fov_deg * std::numbers::pi / 180.0;
  const bool full_circle = sc.fov_deg >= 360.0 - 1e-9;
  const double step = n == 1 ? 0.0 : (full_circle ? fov / n : fov / (n - 1));
  const double first = n == 1 ? 0.0 : -fov / 2;
  const Vec2& origin = state.robot_pose.position;

  std::vector<ScanRay> scan(n);
  for (int i = 0; i < n; ++i) {
    // Full circle: angle(n/2) == 0 exactly; partial: endpoints at +-fov/2.
    const double angle = full_circle ? (i - n / 2) * step : first + i * step;
    const double world = state.robot_pose.heading + angle;
    const Vec2 dir(std::cos(world), std::sin(world));
    double range = sc.max_range;
    for (const auto& wall : map.segments) {
      if (auto t = geom::ray_segment_intersect(origin, dir, wall)) range = std::min(range, *t);
      if (sc.endpoint_radius > 0) {
        for (const Vec2& end : {wall.a, wall.b}) {
          if (auto t = geom::ray_circle_intersect(origin, dir, end, sc.endpoint_radius)) range = std::min(range, *t);
        }
      }
    }
    for (const auto& h : state.humans) {
      if (auto t = geom::ray_circle_intersect(origin, dir, h.position, cfg.social.agent_radius)) {
        range = std::min(range, *t);
      }
    }
    scan[i] = {angle, std::clamp(range, 0.0, sc.max_range)};
  }
  return scan;
}

std::vector<Vec2> scan_points(std::span<const ScanRay> scan, double max_range) {
  std::vector<Vec2> points;
  points.reserve(scan.size());
  for (const auto& ray : scan) {
    if (ray.range < max_range) points.emplace_back(ray.range * std::cos(ray.angle), ray.range * std::sin(ray.angle));
  }
  return points;
}

bool human_visible(const Vec2& robot, const Vec2& human, const WorldMap& map) {
  return !map.blocked(robot, human);
}

std::vector<std::size_t> visible_humans(const SimState& state, const WorldMap& map) {
  const Vec2& p = state.robot_pose.position;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < state.humans.size(); ++i) {
    if (human_visible(p, state.humans[i].position, map)) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return (state.humans[a].position - p).norm() < (state.humans[b].position - p).norm();
  });
  return idx;
}

Observation observe(const SimState& state, const WorldMap& map, const Vec2& local_goal, int h_cap) {
  Observation obs = Observation::Zero(observation_size(h_cap));
  const Pose2& pose = state.robot_pose;
  obs.segment<2>(0) = geom::transform_to_frame(state.goal.position, pose);
  obs.segment<2>(2) = geom::transform_to_frame(local_goal, pose);
  obs(4) = state.robot_vel.linear;
  obs(5) = state.robot_vel.angular;

  const Vec2 robot_velocity = state.robot_vel.linear * pose.forward();
  const auto visible = visible_humans(state, map);
  const int slots = std::min<int>(h_cap, static_cast<int>(visible.size()));
  for (int s = 0; s < slots; ++s) {
    const HumanState& h = state.humans[visible[s]];
    obs.segment<2>(6 + 4 * s) = geom::transform_to_frame(h.position, pose);
    obs.segment<2>(8 + 4 * s) = geom::rotate_to_frame<double>(h.velocity - robot_velocity, pose);
  }
  return obs;
}

}  // namespace socnav
