#include "socnav/episode.hpp"

#include <algorithm>
#include <cmath>

#include "socnav/errors.hpp"

namespace socnav {

double compute_force(const SimState& state) {
  double force = 0.0;
  for (const auto& h : state.humans) {
    force = std::max(force, std::exp(-(state.robot_pose.position - h.position).norm()));
  }
  return force;
}

double compute_blame(const SimState& state) {
  const Vec2& p = state.robot_pose.position;
  const Segment lookahead(p, p + state.robot_vel.linear * state.robot_pose.forward());
  double blame = 0.0;
  for (const auto& h : state.humans) {
    blame = std::max(blame, std::exp(-geom::point_segment_distance(h.position, lookahead)));
  }
  return blame;
}

double reward_from_metrics(const StepMetrics& m, Terminal terminal, const RewardWeights& w) {
  const double shaped = w.w1 * m.d_g + w.w2 * m.force + w.w3 * m.blame;
  return shaped + (terminal == Terminal::Success ? w.c : 0.0);
}

RewardResult compute_reward(const SimState& prev, const SimState& cur, Terminal terminal, const RewardWeights& w,
                            CollisionCounts collisions) {
  RewardResult out;
  StepMetrics& m = out.metrics;
  const Vec2& goal = cur.goal.position;
  m.d_g = (prev.robot_pose.position - goal).norm() - (cur.robot_pose.position - goal).norm();
  m.force = compute_force(cur);
  m.blame = compute_blame(cur);
  m.dist_step = (cur.robot_pose.position - prev.robot_pose.position).norm();
  m.human_collisions = collisions.human;
  m.wall_collisions = collisions.wall;
  out.reward = reward_from_metrics(m, terminal, w);
  return out;
}

double discounted_return(std::span<const double> rewards, double gamma) {
  double total = 0.0;
  for (std::size_t t = 0; t < rewards.size(); ++t) total += std::pow(gamma, static_cast<double>(t)) * rewards[t];
  return total;
}

nlohmann::json step_log_json(const StepRecord& step) {
  nlohmann::json line;
  line["t"] = step.t;
  line["action"] = step.action;
  line["reward"] = step.reward;
  line["d_g"] = step.metrics.d_g;
  line["force"] = step.metrics.force;
  line["blame"] = step.metrics.blame;
  line["dist_step"] = step.metrics.dist_step;
  line["human_collisions"] = step.metrics.human_collisions;
  line["wall_collisions"] = step.metrics.wall_collisions;
  line["outcome"] = to_string(step.terminal);
  line["robot"] = {step.robot.position.x(), step.robot.position.y(), step.robot.heading};
  line["humans"] = nlohmann::json::array();
  for (const auto& h : step.humans) line["humans"].push_back({h.x(), h.y()});
  line["obs"] = std::vector<double>(step.obs.data(), step.obs.data() + step.obs.size());
  return line;
}

SimState initial_state(const Scenario& scenario, const SimConfig& cfg, std::uint64_t seed) {
  SimState s;
  s.robot_pose = scenario.robot_start;
  s.goal = scenario.robot_goal;
  s.rng = Rng(seed);
  s.t = 0.0;
  for (const auto& spec : scenario.humans) {
    const GlobalPlan route = plan_global(*scenario.map, spec.start, spec.goal, cfg.nav.connect_radius);
    std::vector<Vec2> path;
    path.reserve(route.waypoints.size());
    for (const auto& wp : route.waypoints) path.push_back(wp.position);
    s.humans.push_back(make_human(std::move(path), spec.goal, cfg.env.social));
  }
  return s;
}

Episode::Episode(const SimConfig& cfg) : cfg_(cfg) {}

void Episode::refresh_perception() {
  const auto scan = simulate_scan(state_, *map_, cfg_.env);
  scan_points_ = socnav::scan_points(scan, cfg_.env.scan.max_range);
  visible_ = visible_humans(state_, *map_);
  obs_ = observe(state_, *map_, plan_.local_goal().position, cfg_.env.h_cap);
}

const Observation& Episode::reset(const Scenario& scenario, std::uint64_t seed) {
  if (!scenario.map) throw ConfigError("scenario has no map");
  map_ = scenario.map;
  state_ = initial_state(scenario, cfg_, seed);
  plan_ = plan_global(*map_, scenario.robot_start, scenario.robot_goal, cfg_.nav.connect_radius);
  plan_.advance(state_.robot_pose.position, cfg_.nav.waypoint_tolerance);
  terminal_ = Terminal::Running;
  discount_ = 1.0;
  record_ = EpisodeRecord{};
  record_.scenario_id = scenario_hash(scenario);
  record_.initial_distance_from_goal = (state_.robot_pose.position - state_.goal.position).norm();
  record_.final_distance_from_goal = record_.initial_distance_from_goal;
  refresh_perception();
  return obs_;
}

AgentView Episode::view() const {
  return AgentView{obs_, state_, *map_, plan_, visible_, record_.steps};
}

StepOutcome Episode::step(DiscreteAction action) {
  if (!map_) throw ProtocolError("step before reset");
  if (done()) throw ProtocolError("episode finished; reset required");

  std::vector<HumanState> seen;
  seen.reserve(visible_.size());
  for (std::size_t i : visible_) seen.push_back(state_.humans[i]);
  const VelocityCommand cmd =
      execute_action(action, state_.robot_pose, state_.robot_vel, plan_, seen, scan_points_, cfg_.nav);

  SimState next = step_env(state_, cmd, cfg_.dt_action(), *map_, cfg_.env);
  plan_.advance(next.robot_pose.position, cfg_.nav.waypoint_tolerance);
  const CollisionCounts hits = detect_collisions(next, *map_, cfg_.env);
  const Terminal terminal = check_terminal(next, cfg_.scenario);
  const RewardResult rr = compute_reward(state_, next, terminal, cfg_.reward, hits);

  state_ = std::move(next);
  terminal_ = terminal;
  refresh_perception();

  EpisodeRecord& rec = record_;
  rec.discounted_return += discount_ * rr.reward;
  discount_ *= cfg_.reward.gamma;
  ++rec.steps;
  rec.distance_traveled += rr.metrics.dist_step;
  rec.final_distance_from_goal = (state_.robot_pose.position - state_.goal.position).norm();
  rec.max_force = std::max(rec.max_force, rr.metrics.force);
  rec.max_blame = std::max(rec.max_blame, rr.metrics.blame);
  rec.human_collisions += hits.human;
  rec.wall_collisions += hits.wall;
  rec.outcome = terminal;
  if (terminal == Terminal::Success) rec.time_to_goal = state_.t;

  StepRecord log;
  log.t = state_.t;
  log.action = static_cast<int>(action);
  log.reward = rr.reward;
  log.metrics = rr.metrics;
  log.terminal = terminal;
  log.robot = state_.robot_pose;
  log.humans.reserve(state_.humans.size());
  for (const auto& h : state_.humans) log.humans.push_back(h.position);
  log.obs = obs_;
  rec.log.push_back(std::move(log));

  return StepOutcome{obs_, rr.reward, rr.metrics, terminal, done()};
}

EpisodeRecord run_episode(const Scenario& scenario, Agent& agent, const SimConfig& cfg, std::uint64_t seed,
                          std::ostream* log) {
  Episode episode(cfg);
  episode.reset(scenario, seed);
  agent.begin_episode(seed);
  while (!episode.done()) {
    const long long raw = agent.act(episode.view());
    const auto action = action_from_index(raw);
    if (!action) throw AgentProtocolError("agent returned out-of-range action " + std::to_string(raw));
    episode.step(*action);
    if (log) *log << step_log_json(episode.record().log.back()).dump() << '\n';
  }
  return episode.record();
}

}  // namespace socnav
