#include "socnav/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <mutex>
#include <thread>

#include "socnav/errors.hpp"

namespace socnav {

namespace {

constexpr double kZ90 = 1.6448536269514722;

class FixedAgent final : public Agent {
 public:
  explicit FixedAgent(DiscreteAction a) : action_(a) {}
  long long act(const AgentView&) override { return static_cast<long long>(action_); }

 private:
  DiscreteAction action_;
};

class RandomAgent final : public Agent {
 public:
  void begin_episode(std::uint64_t seed) override { rng_ = Rng(seed).split(0x52414e44); }
  long long act(const AgentView&) override { return static_cast<long long>(rng_.index(kNumActions)); }

 private:
  Rng rng_;
};

class RefAgent final : public Agent {
 public:
  explicit RefAgent(RefParams p) : params_(p) {}
  long long act(const AgentView& view) override {
    return static_cast<long long>(ref_policy(view.state, view.visible, params_));
  }

 private:
  RefParams params_;
};

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

nlohmann::json interval_json(const Interval& i) {
  return {{"n", i.n}, {"mean", i.mean}, {"ci90_low", i.low}, {"ci90_high", i.high}};
}

struct EpisodeSummary {
  std::uint64_t scenario_id = 0;
  bool success = false;
  bool goal_reached = false;
  std::optional<double> time_to_goal;
  double max_force = 0.0;
  double max_blame = 0.0;
  double distance = 0.0;
  double discounted_return = 0.0;
  int human_collisions = 0;
  int wall_collisions = 0;
};

EpisodeSummary summarize(const EpisodeRecord& r) {
  return {r.scenario_id,     r.successful_trial(), r.outcome == Terminal::Success, r.time_to_goal,
          r.max_force,       r.max_blame,          r.distance_traveled,            r.discounted_return,
          r.human_collisions, r.wall_collisions};
}

}  // namespace

const char* to_string(BaselineKind kind) {
  switch (kind) {
    case BaselineKind::GoAlone: return "goalone";
    case BaselineKind::Ref: return "ref";
    case BaselineKind::Random: return "random";
    case BaselineKind::AlwaysHalt: return "halt";
  }
  return "goalone";
}

BaselineKind parse_baseline(const std::string& name) {
  std::string s;
  for (char c : name) s += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  if (s == "goalone" || s == "go_alone") return BaselineKind::GoAlone;
  if (s == "ref") return BaselineKind::Ref;
  if (s == "random") return BaselineKind::Random;
  if (s == "halt" || s == "alwayshalt") return BaselineKind::AlwaysHalt;
  throw ConfigError("unknown policy '" + name + "' (expected goalone, ref, random or halt)");
}

DiscreteAction ref_policy(const SimState& state, std::span<const std::size_t> visible, const RefParams& params) {
  const Pose2& pose = state.robot_pose;
  const HumanState* lead = nullptr;
  double lead_dist = params.engage_range;
  for (std::size_t i : visible) {
    const HumanState& h = state.humans[i];
    const Vec2 rel = geom::transform_to_frame(h.position, pose);
    const double d = rel.norm();
    if (d > lead_dist || d < 1e-12) continue;
    if (std::abs(std::atan2(rel.y(), rel.x())) > params.cone) continue;
    lead = &h;
    lead_dist = d;
  }
  if (!lead) return DiscreteAction::GoAlone;

  const Vec2 away = (lead->position - pose.position) / lead_dist;
  const double radial = lead->velocity.dot(away);
  if (radial > params.away_speed) return DiscreteAction::Follow;
  if (radial < -params.away_speed && lead_dist < params.halt_range) return DiscreteAction::Halt;
  return DiscreteAction::Pass;
}

std::unique_ptr<Agent> make_baseline(BaselineKind kind, const RefParams& ref) {
  switch (kind) {
    case BaselineKind::GoAlone: return std::make_unique<FixedAgent>(DiscreteAction::GoAlone);
    case BaselineKind::AlwaysHalt: return std::make_unique<FixedAgent>(DiscreteAction::Halt);
    case BaselineKind::Random: return std::make_unique<RandomAgent>();
    case BaselineKind::Ref: return std::make_unique<RefAgent>(ref);
  }
  return nullptr;
}

std::uint64_t episode_seed(std::uint64_t base_seed, int episode_index) {
  return splitmix64(base_seed ^ splitmix64(static_cast<std::uint64_t>(episode_index) + 0x5eedULL));
}

NamedAgent baseline_agent(BaselineKind kind, const RefParams& ref) {
  return {to_string(kind), [kind, ref] { return make_baseline(kind, ref); }};
}

Interval interval90(std::span<const double> samples) {
  Interval out;
  out.n = static_cast<int>(samples.size());
  if (samples.empty()) return out;
  double sum = 0.0;
  for (double x : samples) sum += x;
  out.mean = sum / out.n;
  double half = 0.0;
  if (out.n > 1) {
    double ss = 0.0;
    for (double x : samples) ss += (x - out.mean) * (x - out.mean);
    half = kZ90 * std::sqrt(ss / (out.n - 1)) / std::sqrt(static_cast<double>(out.n));
  }
  out.low = out.mean - half;
  out.high = out.mean + half;
  return out;
}

nlohmann::json report_to_json(const BenchReport& report) {
  nlohmann::json doc;
  doc["format_version"] = kFormatVersion;
  doc["n_episodes"] = report.n_episodes;
  doc["config_fingerprint"] = report.config_fingerprint;
  doc["reward_weights"] = {{"w1", report.weights.w1}, {"w2", report.weights.w2}, {"w3", report.weights.w3},
                           {"c", report.weights.c},   {"gamma", report.weights.gamma}};
  doc["policies"] = nlohmann::json::array();
  for (const auto& p : report.policies) {
    doc["policies"].push_back({{"name", p.name},
                               {"n_episodes", p.n_episodes},
                               {"n_success", p.n_success},
                               {"success_rate", p.success_rate},
                               {"goal_reached_rate", p.goal_reached_rate},
                               {"max_force", interval_json(p.max_force)},
                               {"max_blame", interval_json(p.max_blame)},
                               {"time_to_goal", interval_json(p.time_to_goal)},
                               {"distance_traveled", interval_json(p.distance_traveled)},
                               {"discounted_return", interval_json(p.discounted_return)},
                               {"mean_human_collisions", p.mean_human_collisions},
                               {"mean_wall_collisions", p.mean_wall_collisions},
                               {"episode_set_hash", p.episode_set_hash}});
  }
  return doc;
}

BenchReport run_benchmark(std::span<const NamedAgent> agents, const SimConfig& cfg, int n_episodes, int threads) {
  if (n_episodes < 0) throw ConfigError("episode count must be >= 0");
  std::vector<Scenario> scenarios;
  scenarios.reserve(n_episodes);
  for (int i = 0; i < n_episodes; ++i) scenarios.push_back(scheduled_scenario(cfg.scenario, i));

  const std::size_t n_tasks = agents.size() * static_cast<std::size_t>(n_episodes);
  std::vector<EpisodeSummary> results(n_tasks);
  std::atomic<std::size_t> next_task{0};
  std::mutex error_mutex;
  std::exception_ptr error;
  std::size_t error_task = n_tasks;

  auto worker = [&] {
    for (std::size_t task = next_task++; task < n_tasks; task = next_task++) {
      const std::size_t a = task / n_episodes;
      const int e = static_cast<int>(task % n_episodes);
      try {
        auto agent = agents[a].make();
        results[task] = summarize(run_episode(scenarios[e], *agent, cfg, episode_seed(cfg.scenario.seed, e)));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (task < error_task) {
          error_task = task;
          error = std::current_exception();
        }
      }
    }
  };
  const int n_threads = std::max(1, threads);
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) {
    const int e = static_cast<int>(error_task % n_episodes);
    try {
      std::rethrow_exception(error);
    } catch (const AgentProtocolError& ex) {
      throw AgentProtocolError("episode " + std::to_string(e) + ": " + ex.what());
    }
  }

  BenchReport report;
  report.n_episodes = n_episodes;
  report.config_fingerprint = config_fingerprint(cfg);
  report.weights = cfg.reward;
  for (std::size_t a = 0; a < agents.size(); ++a) {
    PolicyReport p;
    p.name = agents[a].name;
    p.n_episodes = n_episodes;
    std::vector<double> force, blame, ttg, dist, ret;
    std::uint64_t set_hash = 0xcbf29ce484222325ULL;
    int reached = 0;
    long humans = 0;
    long walls = 0;
    for (int e = 0; e < n_episodes; ++e) {
      const EpisodeSummary& s = results[a * n_episodes + e];
      set_hash = (set_hash ^ s.scenario_id) * 0x100000001b3ULL;
      if (s.success) {
        ++p.n_success;
        ttg.push_back(*s.time_to_goal);
      }
      if (s.goal_reached) ++reached;
      force.push_back(s.max_force);
      blame.push_back(s.max_blame);
      dist.push_back(s.distance);
      ret.push_back(s.discounted_return);
      humans += s.human_collisions;
      walls += s.wall_collisions;
    }
    if (n_episodes > 0) {
      p.success_rate = static_cast<double>(p.n_success) / n_episodes;
      p.goal_reached_rate = static_cast<double>(reached) / n_episodes;
      p.mean_human_collisions = static_cast<double>(humans) / n_episodes;
      p.mean_wall_collisions = static_cast<double>(walls) / n_episodes;
    }
    p.max_force = interval90(force);
    p.max_blame = interval90(blame);
    p.time_to_goal = interval90(ttg);
    p.distance_traveled = interval90(dist);
    p.discounted_return = interval90(ret);
    p.episode_set_hash = hex64(set_hash);
    report.policies.push_back(std::move(p));
  }
  return report;
}

std::size_t record_demonstrations(const NamedAgent& agent, const SimConfig& cfg, int n_episodes,
                                  const std::filesystem::path& out_path) {
  std::ofstream out(out_path, std::ios::trunc);
  auto fail = [&](const std::string& why) {
    out.close();
    std::error_code ec;
    std::filesystem::remove(out_path, ec);
    throw std::runtime_error("record_demonstrations: " + why);
  };
  if (!out) fail("cannot open " + out_path.string());

  std::size_t count = 0;
  for (int e = 0; e < n_episodes; ++e) {
    const Scenario scenario = scheduled_scenario(cfg.scenario, e);
    const std::uint64_t seed = episode_seed(cfg.scenario.seed, e);
    auto policy = agent.make();
    Episode episode(cfg);
    episode.reset(scenario, seed);
    policy->begin_episode(seed);
    while (!episode.done()) {
      const Observation obs = episode.observation();
      const long long raw = policy->act(episode.view());
      const auto action = action_from_index(raw);
      if (!action) {
        out.close();
        std::error_code ec;
        std::filesystem::remove(out_path, ec);
        throw AgentProtocolError("episode " + std::to_string(e) + ": agent returned out-of-range action " +
                                 std::to_string(raw));
      }
      const StepOutcome step = episode.step(*action);
      nlohmann::json line;
      line["obs"] = std::vector<double>(obs.data(), obs.data() + obs.size());
      line["action"] = static_cast<int>(*action);
      line["reward"] = step.reward;
      line["done"] = step.done;
      out << line.dump() << '\n';
      if (!out) fail("write failed on " + out_path.string());
      ++count;
    }
  }
  out.flush();
  if (!out) fail("write failed on " + out_path.string());
  return count;
}

}  // namespace socnav
