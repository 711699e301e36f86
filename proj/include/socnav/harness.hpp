#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "socnav/config.hpp"
#include "socnav/episode.hpp"

namespace socnav {

enum class BaselineKind { GoAlone, Ref, Random, AlwaysHalt };

const char* to_string(BaselineKind kind);
/// Accepts "goalone", "ref", "random", "halt" (case-insensitive).
BaselineKind parse_baseline(const std::string& name);

/// Hand-written social policy: GoAlone when nobody is close ahead, Follow a
/// lead walking away, Halt for one closing in head-on, Pass otherwise.
DiscreteAction ref_policy(const SimState& state, std::span<const std::size_t> visible, const RefParams& params);

std::unique_ptr<Agent> make_baseline(BaselineKind kind, const RefParams& ref);

/// Seed of the noise / policy stream for one episode of a run.
std::uint64_t episode_seed(std::uint64_t base_seed, int episode_index);

struct NamedAgent {
  std::string name;
  std::function<std::unique_ptr<Agent>()> make;
};

NamedAgent baseline_agent(BaselineKind kind, const RefParams& ref);

/// External policy run as a child process (`/bin/sh -c command`), one process
/// per episode. Each step it receives {"obs": [...], "step": k} on stdin and
/// answers with one line holding an integer or {"action": int}. A missing or
/// unparsable answer raises AgentProtocolError.
NamedAgent command_agent(std::string name, std::string command);

/// Mean with a two-sided 90% normal-approximation interval.
struct Interval {
  int n = 0;
  double mean = 0.0;
  double low = 0.0;
  double high = 0.0;
};

Interval interval90(std::span<const double> samples);

struct PolicyReport {
  std::string name;
  int n_episodes = 0;
  int n_success = 0;
  double success_rate = 0.0;
  /// Distance-only predicate, collisions ignored.
  double goal_reached_rate = 0.0;
  Interval max_force;
  Interval max_blame;
  Interval time_to_goal;
  Interval distance_traveled;
  Interval discounted_return;
  double mean_human_collisions = 0.0;
  double mean_wall_collisions = 0.0;
  std::string episode_set_hash;
};

struct BenchReport {
  int n_episodes = 0;
  std::string config_fingerprint;
  RewardWeights weights;
  std::vector<PolicyReport> policies;
};

nlohmann::json report_to_json(const BenchReport& report);

/// Runs every agent on the same scheduled episode list. threads <= 1 runs
/// serially; any thread count yields the same report.
BenchReport run_benchmark(std::span<const NamedAgent> agents, const SimConfig& cfg, int n_episodes,
                          int threads = 1);

/// Writes one {obs, action, reward, done} JSON line per step. Returns the
/// number of lines. On I/O failure the partial file is removed and
/// std::runtime_error is thrown.
std::size_t record_demonstrations(const NamedAgent& agent, const SimConfig& cfg, int n_episodes,
                                  const std::filesystem::path& out_path);

}  // namespace socnav
