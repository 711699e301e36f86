// Acceptance checks for the simulator and harness. Prints one PASS/FAIL line
// per criterion and exits nonzero when any fails.
#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <limits>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

#include "socnav/config.hpp"
#include "socnav/env.hpp"
#include "socnav/episode.hpp"
#include "socnav/harness.hpp"
#include "socnav/nav.hpp"

using namespace socnav;
using nlohmann::json;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

SimConfig training_config() {
  return load_config(std::filesystem::path(SOCNAV_SOURCE_DIR) / "configs/training.json");
}

// Seeded Ref episode with five humans and no actuation noise, run twice.
Verdict determinism() {
  SimConfig cfg = training_config();
  cfg.scenario.h_min = cfg.scenario.h_max = 5;
  cfg.nav.limits.noise_linear = cfg.nav.limits.noise_angular = 0.0;
  cfg.env.limits = cfg.nav.limits;
  const Scenario scenario = scheduled_scenario(cfg.scenario, 0);
  const auto t0 = Clock::now();
  std::string logs[2];
  int steps = 0;
  for (auto& log : logs) {
    auto agent = make_baseline(BaselineKind::Ref, cfg.ref);
    std::ostringstream out;
    steps = run_episode(scenario, *agent, cfg, episode_seed(cfg.scenario.seed, 0), &out).steps;
    log = out.str();
  }
  const double dt = seconds_since(t0);
  const bool same = !logs[0].empty() && logs[0] == logs[1];
  return {same && dt < 5.0 && scenario.humans.size() == 5,
          fmt::format("{} steps, {} log bytes, identical={}, {:.2f} s", steps, logs[0].size(), same, dt)};
}

// Reference single-source shortest path: O(n^2) scan, sums in path order.
double oracle_shortest(const WorldMap& map, int from, int to) {
  const int n = static_cast<int>(map.nav_nodes.size());
  std::vector<std::vector<double>> w(n, std::vector<double>(n, std::numeric_limits<double>::infinity()));
  for (const auto& e : map.nav_edges) {
    w[e.from][e.to] = std::min(w[e.from][e.to], e.cost);
    w[e.to][e.from] = std::min(w[e.to][e.from], e.cost);
  }
  std::vector<double> dist(n, std::numeric_limits<double>::infinity());
  std::vector<bool> done(n, false);
  dist[from] = 0.0;
  for (int round = 0; round < n; ++round) {
    int u = -1;
    for (int i = 0; i < n; ++i) {
      if (!done[i] && (u < 0 || dist[i] < dist[u])) u = i;
    }
    if (u < 0 || !std::isfinite(dist[u])) break;
    done[u] = true;
    for (int v = 0; v < n; ++v) {
      if (std::isfinite(w[u][v]) && dist[u] + w[u][v] < dist[v]) dist[v] = dist[u] + w[u][v];
    }
  }
  return dist[to];
}

Verdict planner_oracle() {
  std::mt19937_64 gen(101);
  std::uniform_real_distribution<double> cost(0.1, 10.0);
  std::uniform_real_distribution<double> jitter(-0.5, 0.5);
  int graphs = 0;
  int pairs = 0;
  int mismatches = 0;
  for (int g = 0; g < 100; ++g) {
    const int n = std::uniform_int_distribution<int>(2, 12)(gen);
    WorldMap map;
    // Nodes sit at least 4 m apart, so start and goal attach only to their own node.
    for (int i = 0; i < n; ++i) map.nav_nodes.emplace_back(5.0 * (i % 4) + jitter(gen), 5.0 * (i / 4) + jitter(gen), 0.0);
    for (int i = 1; i < n; ++i) {
      const int parent = std::uniform_int_distribution<int>(0, i - 1)(gen);
      map.nav_edges.push_back({parent, i, cost(gen)});
    }
    const int extra = std::uniform_int_distribution<int>(0, n * 2)(gen);
    for (int k = 0; k < extra; ++k) {
      const int a = std::uniform_int_distribution<int>(0, n - 1)(gen);
      const int b = std::uniform_int_distribution<int>(0, n - 1)(gen);
      if (a != b) map.nav_edges.push_back({a, b, cost(gen)});
    }
    for (int i = 0; i < n; ++i) map.legal_pose_indices.push_back(i);
    ++graphs;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        ++pairs;
        const double got = plan_global(map, map.nav_nodes[i], map.nav_nodes[j], 2.0).cost;
        if (got != oracle_shortest(map, i, j)) ++mismatches;
      }
    }
  }
  return {mismatches == 0, fmt::format("{} graphs, {} node pairs, {} mismatches", graphs, pairs, mismatches)};
}

// A wall blocks the sight line when consecutive samples fall on strictly
// opposite sides of its supporting line at a crossing inside the wall.
bool sampled_blocked(const Vec2& a, const Vec2& b, const std::vector<Segment>& walls) {
  constexpr int kSamples = 1000;
  for (const auto& w : walls) {
    const Vec2 d = w.b - w.a;
    auto side = [&](const Vec2& p) { return d.x() * (p.y() - w.a.y()) - d.y() * (p.x() - w.a.x()); };
    Vec2 prev = a;
    double s_prev = side(prev);
    for (int k = 1; k < kSamples; ++k) {
      const Vec2 q = a + (b - a) * (static_cast<double>(k) / (kSamples - 1));
      const double s = side(q);
      if ((s_prev < 0 && s > 0) || (s_prev > 0 && s < 0) || (s == 0 && k < kSamples - 1)) {
        const double frac = s == 0 ? 1.0 : s_prev / (s_prev - s);
        const Vec2 hit = prev + (q - prev) * frac;
        const double u = (hit - w.a).dot(d) / d.squaredNorm();
        if (u >= 0.0 && u <= 1.0) return true;
      }
      prev = q;
      s_prev = s;
    }
  }
  return false;
}

Verdict occlusion_oracle() {
  std::mt19937_64 gen(202);
  std::uniform_real_distribution<double> coord(0.0, 10.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  int decisions = 0;
  int disagreements = 0;
  int hidden = 0;
  for (int c = 0; c < 1000; ++c) {
    WorldMap map;
    const int n_walls = std::uniform_int_distribution<int>(0, 6)(gen);
    for (int k = 0; k < n_walls; ++k) map.segments.emplace_back(coord(gen), coord(gen), coord(gen), coord(gen));
    SimState s;
    s.robot_pose = Pose2(coord(gen), coord(gen), angle(gen));
    s.robot_vel = Twist{0.5, 0.2};
    s.goal = Pose2(coord(gen), coord(gen), 0.0);
    const int n_humans = std::uniform_int_distribution<int>(1, 5)(gen);
    for (int i = 0; i < n_humans; ++i) {
      HumanState h;
      h.position = Vec2(coord(gen), coord(gen));
      h.velocity = Vec2(std::cos(angle(gen)), std::sin(angle(gen)));
      s.humans.push_back(h);
    }
    const Observation obs = observe(s, map, s.goal.position, n_humans);
    std::vector<Vec2> slots;
    for (int k = 0; k < n_humans; ++k) {
      const Vec2 rel = obs.segment<2>(6 + 4 * k);
      const Vec2 vel = obs.segment<2>(8 + 4 * k);
      if (!rel.isZero(0.0) || !vel.isZero(0.0)) slots.push_back(rel);
    }
    for (const auto& h : s.humans) {
      const bool expect = !sampled_blocked(s.robot_pose.position, h.position, map.segments);
      const Vec2 rel = geom::transform_to_frame(h.position, s.robot_pose);
      const bool got = std::any_of(slots.begin(), slots.end(), [&](const Vec2& v) { return (v - rel).norm() < 1e-9; });
      ++decisions;
      if (!expect) ++hidden;
      if (got != expect) ++disagreements;
    }
  }
  return {disagreements == 0,
          fmt::format("{} decisions ({} occluded), {} disagreements", decisions, hidden, disagreements)};
}

Verdict metric_identities() {
  std::mt19937_64 gen(303);
  std::uniform_real_distribution<double> coord(-5.0, 5.0);
  std::uniform_real_distribution<double> angle(-M_PI, M_PI);
  std::uniform_real_distribution<double> speed(0.0, 1.0);
  int violations = 0;
  int stopped = 0;
  for (int k = 0; k < 10000; ++k) {
    SimState s;
    s.robot_pose = Pose2(coord(gen), coord(gen), angle(gen));
    s.robot_vel = Twist{k % 4 == 0 ? 0.0 : speed(gen), angle(gen)};
    const int n = std::uniform_int_distribution<int>(0, 6)(gen);
    for (int i = 0; i < n; ++i) {
      HumanState h;
      h.position = s.robot_pose.position + Vec2(coord(gen), coord(gen)) * (i % 2 ? 0.1 : 1.0);
      s.humans.push_back(h);
    }
    const double f = compute_force(s);
    const double b = compute_blame(s);
    bool ok = f >= 0.0 && f <= 1.0 && b >= 0.0 && b <= 1.0 && b >= f - 1e-12;
    if (s.robot_vel.linear == 0.0) {
      ++stopped;
      ok = ok && std::abs(b - f) <= 1e-12;
    }
    if (!ok) ++violations;
  }
  return {violations == 0, fmt::format("10000 states ({} with v_r = 0), {} violations", stopped, violations)};
}

// Recomputes every logged reward from its logged terms and the weights.
Verdict reward_ledger() {
  SimConfig cfg = training_config();
  int episodes = 0;
  int steps = 0;
  int successes = 0;
  double worst_step = 0.0;
  double worst_return = 0.0;
  for (auto kind : {BaselineKind::Ref, BaselineKind::GoAlone, BaselineKind::Random, BaselineKind::AlwaysHalt}) {
    for (int e = 0; e < 5; ++e) {
      auto agent = make_baseline(kind, cfg.ref);
      std::ostringstream log;
      const EpisodeRecord rec =
          run_episode(scheduled_scenario(cfg.scenario, e), *agent, cfg, episode_seed(cfg.scenario.seed, e), &log);
      std::istringstream lines(log.str());
      double ret = 0.0;
      double discount = 1.0;
      for (std::string line; std::getline(lines, line);) {
        const json j = json::parse(line);
        const bool success = j.at("outcome") == "success";
        const double r = cfg.reward.w1 * j.at("d_g").get<double>() + cfg.reward.w2 * j.at("force").get<double>() +
                         cfg.reward.w3 * j.at("blame").get<double>() + (success ? cfg.reward.c : 0.0);
        worst_step = std::max(worst_step, std::abs(r - j.at("reward").get<double>()));
        ret += discount * j.at("reward").get<double>();
        discount *= cfg.reward.gamma;
        successes += success;
        ++steps;
      }
      worst_return = std::max(worst_return, std::abs(ret - rec.discounted_return));
      ++episodes;
    }
  }
  return {worst_step <= 1e-9 && worst_return <= 1e-9 && successes > 0,
          fmt::format("{} episodes, {} steps, {} successes, max step error {:.3g}, max return error {:.3g}", episodes,
                      steps, successes, worst_step, worst_return)};
}

bool arc_penetrates(const Twist& cmd, const std::vector<Vec2>& points, double radius, double horizon) {
  const int n = static_cast<int>(std::lround(horizon / 0.01));
  for (int k = 0; k <= n; ++k) {
    const Vec2 c = arc_pose(cmd, 0.01 * k).position;
    for (const auto& p : points) {
      if ((p - c).norm() < radius) return true;
    }
  }
  return false;
}

bool decelerates(const Twist& current, const Twist& cmd, const NavParams& nav) {
  const double dv = nav.limits.a_max * nav.control_period;
  const double dw = nav.limits.alpha_max * nav.control_period;
  const double v_expect = std::max(0.0, std::abs(current.linear) - dv);
  const double w_expect = std::max(0.0, std::abs(current.angular) - dw);
  return std::abs(cmd.linear) <= v_expect + 1e-12 && std::abs(cmd.angular) <= w_expect + 1e-12 &&
         cmd.linear * current.linear >= 0.0 && cmd.angular * current.angular >= 0.0;
}

Verdict rollout_safety() {
  const NavParams nav = training_config().nav;
  std::mt19937_64 gen(404);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_real_distribution<double> coord(-4.0, 4.0);
  int unsafe = 0;
  int braked = 0;
  int bad_brake = 0;
  for (int k = 0; k < 10000; ++k) {
    const Twist current{nav.limits.v_max * unit(gen), nav.limits.w_max * (2 * unit(gen) - 1)};
    std::vector<Vec2> points;
    // Wall-like point runs at scan spacing plus scattered points.
    const int runs = std::uniform_int_distribution<int>(0, 4)(gen);
    for (int r = 0; r < runs; ++r) {
      const Vec2 a(coord(gen), coord(gen));
      const Vec2 b(coord(gen), coord(gen));
      const int m = std::max(2, static_cast<int>((b - a).norm() / 0.05));
      for (int i = 0; i <= m; ++i) points.push_back(a + (b - a) * (static_cast<double>(i) / m));
    }
    const int scatter = std::uniform_int_distribution<int>(0, 30)(gen);
    for (int i = 0; i < scatter; ++i) points.emplace_back(coord(gen) * 0.5, coord(gen) * 0.5);
    // The robot starts collision-free.
    std::erase_if(points, [&](const Vec2& p) { return p.norm() < nav.robot_radius + 0.01; });
    const Vec2 goal(coord(gen), coord(gen));
    std::optional<double> cap;
    if (k % 5 == 0) cap = unit(gen);
    const Twist cmd = rollout_local(current, points, goal, nav, cap);
    if (!arc_penetrates(cmd, points, nav.robot_radius, nav.rollout.horizon)) continue;
    // Only the stop fallback may keep a penetrating arc, and it must slow down.
    if (cmd == brake_command(current, nav)) {
      ++braked;
      if (!decelerates(current, cmd, nav)) ++bad_brake;
    } else {
      ++unsafe;
    }
  }

  // Fully blocked: a tight ring of points leaves no admissible arc.
  int blocked_ok = 0;
  const int blocked_cases = 200;
  for (int k = 0; k < blocked_cases; ++k) {
    const Twist current{0.5 + 0.5 * unit(gen), nav.limits.w_max * (2 * unit(gen) - 1)};
    std::vector<Vec2> ring;
    const double radius = nav.robot_radius + nav.rollout.margin + 0.1 * unit(gen);
    for (int i = 0; i < 360; ++i) ring.emplace_back(radius * std::cos(i * M_PI / 180), radius * std::sin(i * M_PI / 180));
    const Twist cmd = rollout_local(current, ring, Vec2(coord(gen), coord(gen)), nav);
    if (decelerates(current, cmd, nav) && std::abs(cmd.linear) < std::abs(current.linear)) ++blocked_ok;
  }
  return {unsafe == 0 && bad_brake == 0 && blocked_ok == blocked_cases,
          fmt::format("10000 scenes: {} unsafe arcs, {} stop fallbacks ({} not decelerating); blocked rings {}/{} "
                      "decelerate",
                      unsafe, braked, bad_brake, blocked_ok, blocked_cases)};
}

Verdict social_force_sanity() {
  const SocialForceParams p = training_config().env.social;
  const double dt = 0.05;
  const RepellingDisc no_robot{Vec2(1e6, 1e6), 0.3, Vec2::Zero()};
  const auto t0 = Clock::now();

  std::vector<HumanState> solo{make_human({Vec2(0, 0), Vec2(10, 0)}, Pose2(10, 0, 0), p)};
  double arrival = -1.0;
  for (int k = 1; k <= static_cast<int>(15.0 / dt); ++k) {
    solo = step_humans(solo, no_robot, {}, p, dt);
    if ((solo[0].position - Vec2(10, 0)).norm() < 0.5) {
      arrival = k * dt;
      break;
    }
  }

  std::vector<HumanState> pair{make_human({Vec2(0, 0), Vec2(10, 0)}, Pose2(10, 0, 0), p),
                               make_human({Vec2(10, 0), Vec2(0, 0)}, Pose2(0, 0, M_PI), p)};
  int collisions = 0;
  double closest = std::numeric_limits<double>::infinity();
  for (int k = 0; k < static_cast<int>(30.0 / dt); ++k) {
    pair = step_humans(pair, no_robot, {}, p, dt);
    const double d = (pair[0].position - pair[1].position).norm();
    closest = std::min(closest, d);
    if (d < 2 * p.agent_radius) ++collisions;
  }
  const double elapsed = seconds_since(t0);
  return {arrival > 0 && arrival <= 15.0 && collisions == 0 && elapsed < 2.0,
          fmt::format("solo arrival {:.2f} s, head-on collisions {} (closest {:.3f} m), {:.3f} s", arrival, collisions,
                      closest, elapsed)};
}

Verdict benchmark_directionality() {
  const SimConfig cfg = training_config();
  const int threads = std::max(1u, std::thread::hardware_concurrency());
  const auto t0 = Clock::now();
  const std::vector<NamedAgent> agents{
      baseline_agent(BaselineKind::GoAlone, cfg.ref), baseline_agent(BaselineKind::Ref, cfg.ref),
      baseline_agent(BaselineKind::Random, cfg.ref), baseline_agent(BaselineKind::AlwaysHalt, cfg.ref)};
  const BenchReport r = run_benchmark(agents, cfg, 200, threads);
  SimConfig empty = cfg;
  empty.scenario.h_min = empty.scenario.h_max = 0;
  const std::vector<NamedAgent> solo{baseline_agent(BaselineKind::GoAlone, cfg.ref)};
  const BenchReport r0 = run_benchmark(solo, empty, 200, threads);
  const double elapsed = seconds_since(t0);

  const auto& go = r.policies[0];
  const auto& ref = r.policies[1];
  const auto& rnd = r.policies[2];
  const auto& halt = r.policies[3];
  const bool a = halt.success_rate == 0.0 && go.success_rate >= halt.success_rate && go.success_rate >= rnd.success_rate;
  const bool b = ref.max_force.mean <= go.max_force.mean;
  const bool c = r0.policies[0].success_rate >= 0.90;
  return {a && b && c && elapsed < 180.0,
          fmt::format("success goalone {:.3f} ref {:.3f} random {:.3f} halt {:.3f}; max_force ref {:.4f} <= goalone "
                      "{:.4f}; zero-human goalone {:.3f}; {:.1f} s",
                      go.success_rate, ref.success_rate, rnd.success_rate, halt.success_rate, ref.max_force.mean,
                      go.max_force.mean, r0.policies[0].success_rate, elapsed)};
}

std::string fuzz_line(std::mt19937_64& gen) {
  static const std::vector<std::string> fragments = {
      "{", "}", "[", "]", ":", ",", "\"", "cmd", "step", "reset", "spec", "action", "seed", "null", "true",
      "false", "1e999", "-0", "9999999999999999999999", "\\u0000", "\\ud800", "{\"cmd\":", "\"action\":",
      "\xff", "\xc3\x28", "\t", " ", "\r", "nan", "{}", "[]", "\"\"", "0.5", "-1", "3"};
  std::uniform_int_distribution<int> kind(0, 9);
  std::uniform_int_distribution<int> action(-3, 6);
  switch (kind(gen)) {
    case 0: {
      std::string s;
      const int n = std::uniform_int_distribution<int>(0, 200)(gen);
      for (int i = 0; i < n; ++i) {
        char c = static_cast<char>(std::uniform_int_distribution<int>(0, 255)(gen));
        s += c == '\n' ? ' ' : c;
      }
      return s;
    }
    case 1:
    case 2: {
      std::string s;
      const int n = std::uniform_int_distribution<int>(1, 12)(gen);
      for (int i = 0; i < n; ++i) s += fragments[std::uniform_int_distribution<std::size_t>(0, fragments.size() - 1)(gen)];
      return s;
    }
    case 3: return json{{"cmd", "step"}, {"action", action(gen)}}.dump();
    case 4: return json{{"cmd", "reset"}, {"seed", std::uniform_int_distribution<int>(-5, 5)(gen)}}.dump();
    case 5: return R"({"cmd":"spec"})";
    case 6: return json{{"cmd", "step"}, {"action", json::array({1})}}.dump();
    case 7: return std::string(std::uniform_int_distribution<int>(0, 3)(gen), '{');
    case 8: return R"({"cmd":"step","action":1.0000001})";
    default: return "";
  }
}

Verdict protocol_robustness() {
  const std::string config = (std::filesystem::path(SOCNAV_SOURCE_DIR) / "configs/training.json").string();
  std::mt19937_64 gen(505);
  constexpr int kLines = 10000;
  std::string input;
  for (int i = 0; i < kLines; ++i) input += fuzz_line(gen) + "\n";

  int to_child[2];
  int from_child[2];
  if (::pipe2(to_child, O_CLOEXEC) != 0 || ::pipe2(from_child, O_CLOEXEC) != 0) return {false, "pipe failed"};
  const pid_t pid = ::fork();
  if (pid < 0) return {false, "fork failed"};
  if (pid == 0) {
    ::dup2(to_child[0], STDIN_FILENO);
    ::dup2(from_child[1], STDOUT_FILENO);
    const int devnull = ::open("/dev/null", O_WRONLY);
    if (devnull >= 0) ::dup2(devnull, STDERR_FILENO);
    ::execl(SOCNAV_CLI, SOCNAV_CLI, "serve", "--stdio", "--config", config.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(to_child[0]);
  ::close(from_child[1]);
  ::signal(SIGPIPE, SIG_IGN);

  std::thread writer([&] {
    std::size_t sent = 0;
    while (sent < input.size()) {
      const ssize_t n = ::write(to_child[1], input.data() + sent, input.size() - sent);
      if (n <= 0) break;
      sent += static_cast<std::size_t>(n);
    }
    ::close(to_child[1]);
  });

  std::string output;
  char buf[65536];
  for (ssize_t n; (n = ::read(from_child[0], buf, sizeof(buf))) > 0;) output.append(buf, static_cast<std::size_t>(n));
  ::close(from_child[0]);
  writer.join();
  int status = 0;
  ::waitpid(pid, &status, 0);

  int responses = 0;
  int objects = 0;
  std::istringstream lines(output);
  for (std::string line; std::getline(lines, line);) {
    ++responses;
    const json j = json::parse(line, nullptr, false);
    if (j.is_object()) ++objects;
  }
  const bool exited = WIFEXITED(status);
  const int code = exited ? WEXITSTATUS(status) : -1;
  // Input ends without "close", so a clean server exits with 3.
  return {responses == kLines && objects == kLines && exited && code == 3,
          fmt::format("{} lines sent, {} responses, {} JSON objects, exit {}", kLines, responses, objects,
                      exited ? std::to_string(code) : std::string("by signal"))};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"determinism", determinism},
      {"planner-oracle", planner_oracle},
      {"occlusion-oracle", occlusion_oracle},
      {"metric-identities", metric_identities},
      {"reward-ledger", reward_ledger},
      {"rollout-safety", rollout_safety},
      {"social-force-sanity", social_force_sanity},
      {"benchmark-directionality", benchmark_directionality},
      {"protocol-robustness", protocol_robustness},
  };
  int failures = 0;
  for (const auto& [name, check] : criteria) {
    Verdict v;
    try {
      v = check();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    if (!v.pass) ++failures;
    std::printf("%s %s: %s\n", v.pass ? "PASS" : "FAIL", name.c_str(), v.detail.c_str());
    std::fflush(stdout);
  }
  return failures == 0 ? 0 : 1;
}
