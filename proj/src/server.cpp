#include "socnav/server.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <istream>
#include <ostream>

#include <spdlog/spdlog.h>

#include "socnav/errors.hpp"
#include "socnav/harness.hpp"

namespace socnav {

namespace {

using nlohmann::json;

json error_response(const std::string& message) { return {{"error", message}}; }

json metrics_json(const StepMetrics& m, double t) {
  return {{"d_g", m.d_g},
          {"force", m.force},
          {"blame", m.blame},
          {"dist_step", m.dist_step},
          {"human_collisions", m.human_collisions},
          {"wall_collisions", m.wall_collisions},
          {"t", t}};
}

std::vector<double> to_vector(const Observation& obs) { return {obs.data(), obs.data() + obs.size()}; }

// RAII file descriptor.
class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  ~Fd() {
    if (fd_ >= 0) ::close(fd_);
  }
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  int get() const { return fd_; }

 private:
  int fd_;
};

bool write_all(int fd, const std::string& data) {
  std::size_t sent = 0;
  while (sent < data.size()) {
    const ssize_t n = ::send(fd, data.data() + sent, data.size() - sent, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      return false;
    }
    sent += static_cast<std::size_t>(n);
  }
  return true;
}

}  // namespace

std::string dump_line(const json& j) { return j.dump(-1, ' ', false, json::error_handler_t::replace); }

Session::Session(SimConfig cfg, std::ostream* log)
    : cfg_(std::move(cfg)), log_(log), schedule_seed_(cfg_.scenario.seed), episode_(cfg_) {
  if (!cfg_.scenario.map) throw ConfigError("session config has no map");
}

std::string Session::handle_line(const std::string& line) {
  json request;
  try {
    request = json::parse(line);
  } catch (const json::exception& e) {
    // parse_error for bad syntax, out_of_range for numbers like 1e999.
    return dump_line(error_response(std::string("malformed JSON: ") + e.what()));
  }
  return dump_line(handle(request));
}

json Session::handle(const json& request) {
  try {
    if (!request.is_object()) return error_response("request must be a JSON object");
    const auto cmd_it = request.find("cmd");
    if (cmd_it == request.end() || !cmd_it->is_string()) return error_response("missing string field 'cmd'");
    const std::string cmd = cmd_it->get<std::string>();
    if (closed_) return error_response("session closed");
    if (cmd == "spec") {
      return {{"obs_dim", cfg_.obs_dim()}, {"n_actions", kNumActions}, {"dt", cfg_.dt_action()}};
    }
    if (cmd == "reset") return do_reset(request);
    if (cmd == "step") return do_step(request);
    if (cmd == "close") {
      closed_ = true;
      return {{"closed", true}};
    }
    return error_response("unknown cmd '" + cmd + "'");
  } catch (const std::exception& e) {
    spdlog::warn("request failed: {}", e.what());
    return error_response(e.what());
  }
}

json Session::do_reset(const json& request) {
  if (request.contains("seed")) {
    const json& s = request.at("seed");
    if (!s.is_number_integer()) return error_response("seed must be an integer");
    schedule_seed_ = s.is_number_unsigned() ? s.get<std::uint64_t>()
                                            : static_cast<std::uint64_t>(s.get<std::int64_t>());
    epoch_ = 0;
    schedule_.reset();
  }
  std::optional<ScenarioSchedule::Item> item;
  if (schedule_) item = schedule_->next();
  if (!item) {
    // Exhausted (or first use): start the next pass of the schedule.
    ScenarioConfig sc = cfg_.scenario;
    sc.seed = epoch_ == 0 ? schedule_seed_ : splitmix64(schedule_seed_ + static_cast<std::uint64_t>(epoch_));
    ++epoch_;
    pass_seed_ = sc.seed;
    schedule_.emplace(sc);
    item = schedule_->next();
  }
  const std::uint64_t seed = episode_seed(pass_seed_, item->episode_index);
  const Observation& obs = episode_.reset(item->scenario, seed);
  active_ = true;
  spdlog::debug("reset: episode {} scenario {} repeat {}", item->episode_index, item->scenario_index,
                item->repeat_index);
  return {{"obs", to_vector(obs)},
          {"reward", 0.0},
          {"done", false},
          {"metrics", json::object()},
          {"episode", item->episode_index}};
}

json Session::do_step(const json& request) {
  if (!active_) return error_response("step before reset");
  if (episode_.done()) return error_response("episode finished; reset required");
  const auto it = request.find("action");
  if (it == request.end()) return error_response("missing field 'action'");
  if (!it->is_number_integer()) return error_response("action must be an integer");
  const long long raw = it->is_number_unsigned() ? static_cast<long long>(std::min<std::uint64_t>(
                                                       it->get<std::uint64_t>(), 1ULL << 62))
                                                 : it->get<long long>();
  const auto action = action_from_index(raw);
  if (!action) return error_response("action out of range");

  const StepOutcome out = episode_.step(*action);
  if (log_) {
    *log_ << step_log_json(episode_.record().log.back()).dump() << '\n';
    log_->flush();
  }
  json response = {{"obs", to_vector(out.obs)},
                   {"reward", out.reward},
                   {"done", out.done},
                   {"metrics", metrics_json(out.metrics, episode_.state().t)}};
  if (out.done) response["outcome"] = to_string(out.terminal);
  return response;
}

int serve_stream(Session& session, std::istream& in, std::ostream& out) {
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    out << session.handle_line(line) << '\n';
    out.flush();
    if (session.closed()) return 0;
  }
  spdlog::error("input closed before 'close'");
  return 3;
}

int serve_tcp(Session& session, const std::string& host, int port) {
  Fd listener(::socket(AF_INET, SOCK_STREAM, 0));
  if (listener.get() < 0) {
    spdlog::error("socket: {}", std::strerror(errno));
    return 1;
  }
  const int yes = 1;
  ::setsockopt(listener.get(), SOL_SOCKET, SO_REUSEADDR, &yes, sizeof(yes));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
    spdlog::error("invalid host address '{}'", host);
    return 1;
  }
  if (::bind(listener.get(), reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0 ||
      ::listen(listener.get(), 1) < 0) {
    spdlog::error("bind/listen on {}:{}: {}", host, port, std::strerror(errno));
    return 1;
  }
  spdlog::info("listening on {}:{}", host, port);
  Fd client(::accept(listener.get(), nullptr, nullptr));
  if (client.get() < 0) {
    spdlog::error("accept: {}", std::strerror(errno));
    return 1;
  }

  std::string buffer;
  char chunk[4096];
  for (;;) {
    std::size_t pos;
    while ((pos = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, pos);
      buffer.erase(0, pos + 1);
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (!write_all(client.get(), session.handle_line(line) + "\n")) {
        spdlog::error("client write failed");
        return 3;
      }
      if (session.closed()) return 0;
    }
    const ssize_t n = ::recv(client.get(), chunk, sizeof(chunk), 0);
    if (n < 0 && errno == EINTR) continue;
    if (n <= 0) {
      spdlog::error("client disconnected before 'close'");
      return 3;
    }
    buffer.append(chunk, static_cast<std::size_t>(n));
  }
}

}  // namespace socnav
