#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "socnav/config.hpp"
#include "socnav/episode.hpp"

namespace socnav {

/// One client session of the line-delimited JSON protocol.
///
/// Requests:  {"cmd": "spec" | "reset" | "step" | "close", "action"?: int, "seed"?: int}
/// Responses: one JSON object per request, on one line. Failures carry
/// {"error": "..."} and leave the session usable.
class Session {
 public:
  /// log, when given, receives the JSONL step log of every episode.
  explicit Session(SimConfig cfg, std::ostream* log = nullptr);
  Session(const Session&) = delete;
  Session& operator=(const Session&) = delete;

  /// Handles one request line and returns the response line (no newline).
  std::string handle_line(const std::string& line);
  nlohmann::json handle(const nlohmann::json& request);

  bool closed() const { return closed_; }
  const Episode& episode() const { return episode_; }
  const SimConfig& config() const { return cfg_; }

 private:
  nlohmann::json do_reset(const nlohmann::json& request);
  nlohmann::json do_step(const nlohmann::json& request);

  SimConfig cfg_;
  std::ostream* log_;
  std::uint64_t schedule_seed_;
  std::uint64_t pass_seed_ = 0;
  int epoch_ = 0;
  std::optional<ScenarioSchedule> schedule_;
  Episode episode_;
  bool active_ = false;
  bool closed_ = false;
};

/// JSON dump that never throws on invalid UTF-8.
std::string dump_line(const nlohmann::json& j);

/// Serves one session over a pair of streams. Returns 0 after "close", 3 when
/// the input ends first.
int serve_stream(Session& session, std::istream& in, std::ostream& out);

/// Accepts a single TCP client on host:port and serves it. Same exit codes,
/// plus 1 when the socket cannot be set up.
int serve_tcp(Session& session, const std::string& host, int port);

}  // namespace socnav
