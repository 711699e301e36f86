#include "socnav/nav.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <queue>

#include "socnav/errors.hpp"

namespace socnav {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kProgressSamples = 20;

bool same_point(const Vec2& a, const Vec2& b) { return (a - b).norm() < 1e-9; }

// Symmetric sample grid so a window centered on zero contains zero exactly.
double grid_value(double lo, double hi, int n, int i) {
  if (n <= 1) return 0.5 * (lo + hi);
  const double center = 0.5 * (lo + hi);
  const double step = (hi - lo) / (n - 1);
  return center + (i - 0.5 * (n - 1)) * step;
}

double approach(double value, double target, double max_delta) {
  if (target > value) return std::min(target, value + max_delta);
  return std::max(target, value - max_delta);
}

}  // namespace

std::optional<DiscreteAction> action_from_index(long long value) {
  if (value < 0 || value >= kNumActions) return std::nullopt;
  return static_cast<DiscreteAction>(value);
}

const char* to_string(DiscreteAction action) {
  switch (action) {
    case DiscreteAction::Halt: return "halt";
    case DiscreteAction::GoAlone: return "go_alone";
    case DiscreteAction::Follow: return "follow";
    case DiscreteAction::Pass: return "pass";
  }
  return "halt";
}

void GlobalPlan::advance(const Vec2& position, double tol) {
  const int last = static_cast<int>(waypoints.size()) - 1;
  while (next_index < last && (waypoints[next_index].position - position).norm() < tol) ++next_index;
}

GlobalPlan plan_global(const WorldMap& map, const Pose2& start, const Pose2& goal, double connect_radius) {
  GlobalPlan plan;
  if (same_point(start.position, goal.position)) {
    plan.waypoints = {start, goal};
    plan.next_index = 1;
    return plan;
  }

  const int n = static_cast<int>(map.nav_nodes.size());
  const int src = n;
  const int dst = n + 1;
  struct Arc {
    int to;
    double cost;
  };
  std::vector<std::vector<Arc>> adj(n + 2);
  for (const auto& e : map.nav_edges) {
    adj[e.from].push_back({e.to, e.cost});
    adj[e.to].push_back({e.from, e.cost});
  }
  auto connect = [&](int terminal, const Vec2& p) {
    for (int i = 0; i < n; ++i) {
      const Vec2& q = map.nav_nodes[i].position;
      const double d = (q - p).norm();
      if (d <= connect_radius && !map.blocked(p, q)) {
        adj[terminal].push_back({i, d});
        adj[i].push_back({terminal, d});
      }
    }
  };
  connect(src, start.position);
  connect(dst, goal.position);
  const double direct = (goal.position - start.position).norm();
  if (direct <= connect_radius && !map.blocked(start.position, goal.position)) {
    adj[src].push_back({dst, direct});
  }

  std::vector<double> dist(n + 2, std::numeric_limits<double>::infinity());
  std::vector<int> parent(n + 2, -1);
  using Entry = std::pair<double, int>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> frontier;
  dist[src] = 0.0;
  frontier.push({0.0, src});
  while (!frontier.empty()) {
    const auto [d, u] = frontier.top();
    frontier.pop();
    if (d > dist[u]) continue;
    if (u == dst) break;
    for (const auto& arc : adj[u]) {
      const double nd = d + arc.cost;
      if (nd < dist[arc.to]) {
        dist[arc.to] = nd;
        parent[arc.to] = u;
        frontier.push({nd, arc.to});
      }
    }
  }
  if (!std::isfinite(dist[dst])) throw NoPathError("no path between start and goal");

  std::vector<int> chain;
  for (int v = parent[dst]; v != src; v = parent[v]) chain.push_back(v);
  std::reverse(chain.begin(), chain.end());

  plan.cost = dist[dst];
  plan.waypoints.push_back(start);
  for (int v : chain) {
    const Pose2& node = map.nav_nodes[v];
    if (same_point(node.position, plan.waypoints.back().position)) continue;
    plan.waypoints.push_back(node);
  }
  if (plan.waypoints.size() > 1 && same_point(plan.waypoints.back().position, goal.position)) {
    plan.waypoints.back() = goal;
  } else {
    plan.waypoints.push_back(goal);
  }
  plan.next_index = 1;
  return plan;
}

Pose2 arc_pose(const Twist& twist, double t) {
  const double theta = twist.angular * t;
  if (std::abs(twist.angular) < 1e-9) return Pose2(twist.linear * t, 0.0, theta);
  const double r = twist.linear / twist.angular;
  return Pose2(r * std::sin(theta), r * (1.0 - std::cos(theta)), theta);
}

namespace {

// Constant-twist arc from the origin, precomputed for repeated distance queries.
struct ArcShape {
  ArcShape(const Twist& twist, double horizon) : v(twist.linear), w(twist.angular) {
    if (std::abs(v) < 1e-12) return;
    end = arc_pose(twist, horizon).position;
    if (std::abs(w) < 1e-9) return;
    center = Vec2(0.0, v / w);
    radius = std::abs(v / w);
    sweep = std::abs(w) * horizon;
    sign = w > 0 ? 1.0 : -1.0;
  }

  double distance(const Vec2& p) const {
    if (std::abs(v) < 1e-12) return p.norm();
    if (std::abs(w) < 1e-9) return geom::point_segment_distance(p, Segment(Vec2::Zero(), end));
    const Vec2 q = p - center;
    if (sweep >= kTwoPi) return std::abs(q.norm() - radius);
    const Vec2 r0 = -center;
    // Angle from the start radius to q, measured in the rotation direction.
    double alpha = std::atan2(geom::cross<double>(r0, q), r0.dot(q)) * sign;
    if (alpha < 0) alpha += kTwoPi;
    if (alpha <= sweep) return std::abs(q.norm() - radius);
    return std::min(p.norm(), (p - end).norm());
  }

  double v, w;
  Vec2 end = Vec2::Zero();
  Vec2 center = Vec2::Zero();
  double radius = 0.0;
  double sweep = 0.0;
  double sign = 1.0;
};

}  // namespace

double arc_point_distance(const Twist& twist, double horizon, const Vec2& p) {
  return ArcShape(twist, horizon).distance(p);
}

VelocityCommand brake_command(const Twist& current, const NavParams& params) {
  const double dv = params.limits.a_max * params.control_period;
  const double dw = params.limits.alpha_max * params.control_period;
  return {approach(current.linear, 0.0, dv), approach(current.angular, 0.0, dw)};
}

VelocityCommand rollout_local(const Twist& current, std::span<const Vec2> scan_points,
                              const Vec2& local_goal, const NavParams& params,
                              std::optional<double> speed_cap) {
  const auto& lim = params.limits;
  const auto& ro = params.rollout;
  const double period = params.control_period;

  const double v_top = std::min(lim.v_max, speed_cap.value_or(lim.v_max));
  double v_hi = std::min(v_top, current.linear + lim.a_max * period);
  double v_lo = std::max(0.0, current.linear - lim.a_max * period);
  v_hi = std::max(v_hi, 0.0);
  v_lo = std::min(v_lo, v_hi);
  const double w_lo = std::max(-lim.w_max, current.angular - lim.alpha_max * period);
  const double w_hi = std::min(lim.w_max, current.angular + lim.alpha_max * period);

  const double keep_out = params.robot_radius + ro.margin;
  // Points beyond this radius cannot touch any arc nor change a capped clearance.
  const double relevant = std::max(std::abs(v_hi), std::abs(v_lo)) * ro.horizon + keep_out + ro.clearance_cap;
  std::vector<Vec2> nearby;
  nearby.reserve(scan_points.size());
  for (const auto& p : scan_points) {
    if (p.norm() <= relevant) nearby.push_back(p);
  }

  // Already inside the margin: still admit arcs that never get closer than now,
  // so the robot can turn or back off instead of freezing.
  double start_gap = std::numeric_limits<double>::infinity();
  for (const auto& p : nearby) start_gap = std::min(start_gap, p.norm());
  const bool crowded = start_gap < keep_out;

  const Vec2 nose0(ro.heading_lookahead, 0.0);
  const double d0 = (local_goal - nose0).norm();

  bool found = false;
  double best_score = 0.0;
  Twist best;
  for (int iv = 0; iv < ro.linear_samples; ++iv) {
    const double v = std::clamp(grid_value(v_lo, v_hi, ro.linear_samples, iv), v_lo, v_hi);
    for (int iw = 0; iw < ro.angular_samples; ++iw) {
      const double w = std::clamp(grid_value(w_lo, w_hi, ro.angular_samples, iw), w_lo, w_hi);
      const Twist cand{v, w};

      // Every arc point lies within half the arc length of the arc midpoint;
      // points farther than that plus the capped range cannot change the score.
      const ArcShape arc(cand, ro.horizon);
      const double half_len = 0.5 * std::abs(v) * ro.horizon;
      const Vec2 mid = arc_pose(cand, 0.5 * ro.horizon).position;
      const double ignore_beyond = half_len + keep_out + ro.clearance_cap;
      double gap = std::numeric_limits<double>::infinity();
      for (const auto& p : nearby) {
        if ((p - mid).squaredNorm() >= ignore_beyond * ignore_beyond) continue;
        gap = std::min(gap, arc.distance(p));
        if (gap < keep_out && !crowded) break;
      }
      const double clearance = gap - keep_out;
      if (clearance < 0 && !(crowded && gap >= params.robot_radius && gap >= start_gap - 1e-9)) continue;

      // Closest approach along the arc, so arcs that would carry past a near
      // goal are not penalised for the overshoot.
      double closest = d0;
      for (int k = 1; k <= kProgressSamples; ++k) {
        const Pose2 at = arc_pose(cand, ro.horizon * k / kProgressSamples);
        closest = std::min(closest, (local_goal - (at.position + ro.heading_lookahead * at.forward())).norm());
      }
      const double progress = d0 - closest;
      const double score = ro.w_prog * progress + ro.w_clear * std::min(clearance, ro.clearance_cap);

      bool take = !found || score > best_score + 1e-12;
      if (found && !take && std::abs(score - best_score) <= 1e-12) {
        take = std::abs(w) < std::abs(best.angular) - 1e-12;
      }
      if (take) {
        found = true;
        best_score = score;
        best = cand;
      }
    }
  }
  if (!found) return brake_command(current, params);
  return best;
}

std::optional<std::size_t> select_lead_human(const Pose2& robot_pose, std::span<const HumanState> humans,
                                             const NavParams& params) {
  std::optional<std::size_t> lead;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < humans.size(); ++i) {
    const Vec2 rel = geom::transform_to_frame(humans[i].position, robot_pose);
    const double d = rel.norm();
    if (d > params.lead_range || d < 1e-12) continue;
    const double bearing = std::atan2(rel.y(), rel.x());
    if (std::abs(bearing) > params.lead_cone) continue;
    if (d < best) {
      best = d;
      lead = i;
    }
  }
  return lead;
}

VelocityCommand execute_action(DiscreteAction action, const Pose2& robot_pose, const Twist& robot_vel,
                               const GlobalPlan& plan, std::span<const HumanState> visible_humans,
                               std::span<const Vec2> scan_points, const NavParams& params) {
  const Vec2 waypoint = geom::transform_to_frame(plan.local_goal().position, robot_pose);
  auto go_alone = [&] { return rollout_local(robot_vel, scan_points, waypoint, params); };

  switch (action) {
    case DiscreteAction::Halt:
      return brake_command(robot_vel, params);
    case DiscreteAction::GoAlone:
      return go_alone();
    case DiscreteAction::Follow: {
      const auto lead = select_lead_human(robot_pose, visible_humans, params);
      if (!lead) return go_alone();
      const HumanState& h = visible_humans[*lead];
      const Vec2 pos = geom::transform_to_frame(h.position, robot_pose);
      const Vec2 vel = geom::rotate_to_frame(h.velocity, robot_pose);
      const double speed = vel.norm();
      const Vec2 back = speed > 1e-3 ? Vec2(vel / speed) : Vec2(pos.normalized());
      const Vec2 target = pos - params.follow_gap * back;
      return rollout_local(robot_vel, scan_points, target, params, speed);
    }
    case DiscreteAction::Pass: {
      const auto lead = select_lead_human(robot_pose, visible_humans, params);
      if (!lead) return go_alone();
      const HumanState& h = visible_humans[*lead];
      const Vec2 predicted = geom::transform_to_frame(h.position, robot_pose) +
                             params.pass_horizon * geom::rotate_to_frame(h.velocity, robot_pose);
      const double d = predicted.norm();
      const Vec2 dir = d > 1e-9 ? Vec2(predicted / d) : Vec2(1.0, 0.0);
      const Vec2 left(-dir.y(), dir.x());
      const Vec2 target = predicted + params.pass_offset * left;
      return rollout_local(robot_vel, scan_points, target, params, params.limits.v_max);
    }
  }
  return brake_command(robot_vel, params);
}

}  // namespace socnav
