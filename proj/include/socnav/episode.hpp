#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "socnav/config.hpp"
#include "socnav/env.hpp"
#include "socnav/nav.hpp"
#include "socnav/world.hpp"

namespace socnav {

struct StepMetrics {
  double d_g = 0.0;
  double force = 0.0;
  double blame = 0.0;
  double dist_step = 0.0;
  int human_collisions = 0;
  int wall_collisions = 0;
};

/// max_i exp(-|p_r - p_h^i|); 0 with no humans.
double compute_force(const SimState& state);

/// max_i exp(-dist(segment(p_r, p_r + v_r * 1 s), p_h^i)); 0 with no humans.
double compute_blame(const SimState& state);

/// w1 * d_g + w2 * force + w3 * blame, plus c when terminal is Success.
double reward_from_metrics(const StepMetrics& m, Terminal terminal, const RewardWeights& w);

struct RewardResult {
  double reward = 0.0;
  StepMetrics metrics;
};

RewardResult compute_reward(const SimState& prev, const SimState& cur, Terminal terminal, const RewardWeights& w,
                            CollisionCounts collisions = {});

/// sum_t gamma^t r_t
double discounted_return(std::span<const double> rewards, double gamma);

struct StepRecord {
  double t = 0.0;
  int action = 0;
  double reward = 0.0;
  StepMetrics metrics;
  Terminal terminal = Terminal::Running;
  Pose2 robot;
  std::vector<Vec2> humans;
  Observation obs;
};

/// One JSONL line of the step log.
nlohmann::json step_log_json(const StepRecord& step);

struct EpisodeRecord {
  std::uint64_t scenario_id = 0;
  Terminal outcome = Terminal::Running;
  std::optional<double> time_to_goal;
  double distance_traveled = 0.0;
  double initial_distance_from_goal = 0.0;
  double final_distance_from_goal = 0.0;
  double max_force = 0.0;
  double max_blame = 0.0;
  int human_collisions = 0;
  int wall_collisions = 0;
  double discounted_return = 0.0;
  int steps = 0;
  std::vector<StepRecord> log;

  int total_collisions() const { return human_collisions + wall_collisions; }
  /// Goal reached in time and never touched anything.
  bool successful_trial() const { return outcome == Terminal::Success && total_collisions() == 0; }
};

/// What an agent sees when choosing an action. state and map are exposed for
/// engineered policies; learned agents should rely on obs only.
struct AgentView {
  const Observation& obs;
  const SimState& state;
  const WorldMap& map;
  const GlobalPlan& plan;
  std::span<const std::size_t> visible;
  int step = 0;
};

class Agent {
 public:
  virtual ~Agent() = default;
  /// Called before the first act() of every episode.
  virtual void begin_episode(std::uint64_t /*episode_seed*/) {}
  /// Any integer; values outside 0..3 raise AgentProtocolError.
  virtual long long act(const AgentView& view) = 0;
};

struct StepOutcome {
  Observation obs;
  double reward = 0.0;
  StepMetrics metrics;
  Terminal terminal = Terminal::Running;
  bool done = false;
};

/// Stateful episode: reset with a scenario, then step one action at a time.
class Episode {
 public:
  explicit Episode(const SimConfig& cfg);

  const Observation& reset(const Scenario& scenario, std::uint64_t seed);
  StepOutcome step(DiscreteAction action);

  bool done() const { return terminal_ != Terminal::Running; }
  const SimState& state() const { return state_; }
  const GlobalPlan& plan() const { return plan_; }
  const Observation& observation() const { return obs_; }
  std::span<const std::size_t> visible() const { return visible_; }
  const std::vector<Vec2>& scan_points() const { return scan_points_; }
  const EpisodeRecord& record() const { return record_; }
  AgentView view() const;

 private:
  void refresh_perception();

  const SimConfig& cfg_;
  std::shared_ptr<const WorldMap> map_;
  SimState state_;
  GlobalPlan plan_;
  Observation obs_;
  std::vector<std::size_t> visible_;
  std::vector<Vec2> scan_points_;
  Terminal terminal_ = Terminal::Running;
  double discount_ = 1.0;
  EpisodeRecord record_;
};

/// Builds the initial simulation state of a scenario (humans get their plans).
SimState initial_state(const Scenario& scenario, const SimConfig& cfg, std::uint64_t seed);

/// Runs observe -> act -> execute -> step -> reward -> terminal until done.
/// When log is given, each step is written as one JSON line.
EpisodeRecord run_episode(const Scenario& scenario, Agent& agent, const SimConfig& cfg, std::uint64_t seed,
                          std::ostream* log = nullptr);

}  // namespace socnav
