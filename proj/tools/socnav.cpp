#include <cstdint>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "socnav/config.hpp"
#include "socnav/errors.hpp"
#include "socnav/harness.hpp"
#include "socnav/logging.hpp"
#include "socnav/replay.hpp"
#include "socnav/server.hpp"
#include "socnav/world.hpp"

namespace {

using namespace socnav;

constexpr int kExitConfig = 1;
constexpr int kExitUsage = 2;

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string item; std::getline(ss, item, ',');) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

SimConfig config_or_default(const std::string& path) {
  SimConfig cfg = path.empty() ? default_config() : load_config(path);
  if (!cfg.scenario.map) throw ConfigError("config has no map; pass --config");
  validate_config(cfg);
  return cfg;
}

int write_report(const nlohmann::json& report, const std::string& out) {
  if (out.empty() || out == "-") {
    std::cout << report.dump(2) << '\n';
    return 0;
  }
  std::ofstream file(out);
  file << report.dump(2) << '\n';
  if (!file) {
    spdlog::error("cannot write {}", out);
    return kExitConfig;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  init_logging();
  CLI::App app{"socnav: 2D social navigation simulator and benchmark"};
  app.require_subcommand(1);

  std::string config_path;
  std::string log_path;
  std::string host = "127.0.0.1";
  std::uint64_t seed = 0;
  bool has_seed = false;

  auto* serve = app.add_subcommand("serve", "Run the line-delimited JSON environment server");
  bool use_stdio = false;
  int port = 0;
  serve->add_option("--config", config_path, "Config JSON")->required();
  auto* stdio_flag = serve->add_flag("--stdio", use_stdio, "Serve on stdin/stdout");
  auto* port_opt = serve->add_option("--port", port, "Serve one TCP client on this port")->check(CLI::Range(1, 65535));
  stdio_flag->excludes(port_opt);
  serve->add_option("--host", host, "TCP bind address");
  serve->add_option("--seed", seed, "Scenario schedule seed")->each([&](const std::string&) { has_seed = true; });
  serve->add_option("--log", log_path, "Append the JSONL step log here");

  auto* bench = app.add_subcommand("bench", "Evaluate baseline policies on a shared episode list");
  std::string policies = "goalone,ref,random,halt";
  int episodes = 200;
  int threads = 1;
  std::string out_path;
  int h_min = -1;
  int h_max = -1;
  bench->add_option("--config", config_path, "Config JSON")->required();
  bench->add_option("--policies", policies, "Comma-separated: goalone, ref, random, halt");
  std::vector<std::string> externals;
  bench->add_option("--agent", externals, "External policy NAME=COMMAND speaking JSON lines (repeatable)");
  bench->add_option("--episodes", episodes, "Episodes per policy")->check(CLI::NonNegativeNumber);
  bench->add_option("--out", out_path, "Report JSON path (stdout when omitted)");
  bench->add_option("--seed", seed, "Scenario schedule seed")->each([&](const std::string&) { has_seed = true; });
  bench->add_option("--threads", threads, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--h-min", h_min, "Override minimum human count")->check(CLI::NonNegativeNumber);
  bench->add_option("--h-max", h_max, "Override maximum human count")->check(CLI::NonNegativeNumber);

  auto* record = app.add_subcommand("record", "Write {obs, action, reward, done} demonstrations as JSONL");
  std::string policy = "ref";
  record->add_option("--config", config_path, "Config JSON")->required();
  record->add_option("--policy", policy, "goalone, ref, random or halt");
  record->add_option("--episodes", episodes, "Episode count")->check(CLI::NonNegativeNumber);
  record->add_option("--out", out_path, "Output JSONL path")->required();
  record->add_option("--seed", seed, "Scenario schedule seed")->each([&](const std::string&) { has_seed = true; });

  auto* replay = app.add_subcommand("replay", "Render a JSONL step log to SVG frames");
  std::string map_path;
  ReplayOptions replay_opt;
  replay->add_option("--log", log_path, "JSONL step log")->required()->check(CLI::ExistingFile);
  replay->add_option("--map", map_path, "Map JSON")->required()->check(CLI::ExistingFile);
  replay->add_option("--out", out_path, "Output directory")->required();
  replay->add_option("--every", replay_opt.every, "Render every n-th step")->check(CLI::PositiveNumber);

  auto* validate = app.add_subcommand("validate-map", "Check map invariants");
  validate->add_option("map", map_path, "Map JSON")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*validate) {
      const WorldMap map = load_map(map_path);
      const auto problems = validate_map(map);
      for (const auto& p : problems) std::cerr << map_path << ": " << p << '\n';
      if (!problems.empty()) return kExitConfig;
      std::cout << map_path << ": ok (" << map.segments.size() << " walls, " << map.nav_nodes.size()
                << " nodes, " << map.nav_edges.size() << " edges)\n";
      return 0;
    }

    if (*replay) {
      const WorldMap map = load_map(map_path);
      std::ifstream in(log_path);
      const std::size_t frames = render_log(map, in, out_path, replay_opt);
      std::cout << "wrote " << frames << " frames to " << out_path << '\n';
      return 0;
    }

    SimConfig cfg = config_or_default(config_path);
    if (has_seed) cfg.scenario.seed = seed;

    if (*serve) {
      if (!use_stdio && port == 0) {
        std::cerr << "serve: one of --stdio or --port is required\n";
        return kExitUsage;
      }
      std::unique_ptr<std::ofstream> log;
      if (!log_path.empty()) {
        log = std::make_unique<std::ofstream>(log_path, std::ios::app);
        if (!*log) throw ConfigError("cannot open log file " + log_path);
      }
      Session session(cfg, log.get());
      if (use_stdio) {
        std::ios::sync_with_stdio(false);
        return serve_stream(session, std::cin, std::cout);
      }
      return serve_tcp(session, host, port);
    }

    if (*bench) {
      if (h_min >= 0) cfg.scenario.h_min = h_min;
      if (h_max >= 0) cfg.scenario.h_max = h_max;
      validate_config(cfg);
      std::vector<NamedAgent> agents;
      for (const auto& name : split_list(policies)) agents.push_back(baseline_agent(parse_baseline(name), cfg.ref));
      for (const auto& spec : externals) {
        const auto eq = spec.find('=');
        if (eq == 0 || eq == std::string::npos || eq + 1 == spec.size()) {
          throw ConfigError("--agent expects NAME=COMMAND, got '" + spec + "'");
        }
        agents.push_back(command_agent(spec.substr(0, eq), spec.substr(eq + 1)));
      }
      if (agents.empty()) throw ConfigError("no policies to evaluate");
      const BenchReport report = run_benchmark(agents, cfg, episodes, threads);
      return write_report(report_to_json(report), out_path);
    }

    if (*record) {
      const std::size_t n = record_demonstrations(baseline_agent(parse_baseline(policy), cfg.ref), cfg, episodes,
                                                  out_path);
      std::cout << "wrote " << n << " transitions to " << out_path << '\n';
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitConfig;
  }
  return kExitUsage;
}
