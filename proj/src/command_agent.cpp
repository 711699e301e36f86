#include <fcntl.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstdio>
#include <cstring>

#include "socnav/errors.hpp"
#include "socnav/harness.hpp"

namespace socnav {

namespace {

class CommandAgent final : public Agent {
 public:
  explicit CommandAgent(const std::string& command) {
    int to_child[2];
    int from_child[2];
    // Close-on-exec keeps concurrent children from holding each other's pipes.
    if (::pipe2(to_child, O_CLOEXEC) != 0) throw AgentProtocolError(std::string("pipe: ") + std::strerror(errno));
    if (::pipe2(from_child, O_CLOEXEC) != 0) {
      ::close(to_child[0]);
      ::close(to_child[1]);
      throw AgentProtocolError(std::string("pipe: ") + std::strerror(errno));
    }
    pid_ = ::fork();
    if (pid_ < 0) {
      for (int fd : {to_child[0], to_child[1], from_child[0], from_child[1]}) ::close(fd);
      throw AgentProtocolError(std::string("fork: ") + std::strerror(errno));
    }
    if (pid_ == 0) {
      ::dup2(to_child[0], STDIN_FILENO);
      ::dup2(from_child[1], STDOUT_FILENO);
      ::close(to_child[0]);
      ::close(to_child[1]);
      ::close(from_child[0]);
      ::close(from_child[1]);
      ::execl("/bin/sh", "sh", "-c", command.c_str(), static_cast<char*>(nullptr));
      ::_exit(127);
    }
    ::close(to_child[0]);
    ::close(from_child[1]);
    in_ = ::fdopen(to_child[1], "w");
    out_ = ::fdopen(from_child[0], "r");
  }

  ~CommandAgent() override {
    if (in_) std::fclose(in_);
    if (out_) std::fclose(out_);
    if (pid_ > 0) {
      int status = 0;
      ::waitpid(pid_, &status, 0);
    }
  }

  CommandAgent(const CommandAgent&) = delete;
  CommandAgent& operator=(const CommandAgent&) = delete;

  long long act(const AgentView& view) override {
    nlohmann::json req;
    req["obs"] = std::vector<double>(view.obs.data(), view.obs.data() + view.obs.size());
    req["step"] = view.step;
    const std::string line = req.dump() + "\n";
    if (std::fwrite(line.data(), 1, line.size(), in_) != line.size() || std::fflush(in_) != 0) {
      throw AgentProtocolError("agent process closed its input");
    }
    std::string answer;
    for (int c; (c = std::fgetc(out_)) != EOF && c != '\n';) answer += static_cast<char>(c);
    if (answer.empty()) throw AgentProtocolError("agent process sent no action");
    nlohmann::json reply = nlohmann::json::parse(answer, nullptr, false);
    if (reply.is_object() && reply.contains("action")) reply = reply["action"];
    if (!reply.is_number_integer()) throw AgentProtocolError("agent process sent '" + answer + "'");
    return reply.is_number_unsigned() ? static_cast<long long>(std::min<std::uint64_t>(reply.get<std::uint64_t>(),
                                                                                      1ULL << 62))
                                      : reply.get<long long>();
  }

 private:
  pid_t pid_ = -1;
  std::FILE* in_ = nullptr;
  std::FILE* out_ = nullptr;
};

}  // namespace

NamedAgent command_agent(std::string name, std::string command) {
  // A child that exits early must not kill the harness on its next write.
  ::signal(SIGPIPE, SIG_IGN);
  return {std::move(name), [command = std::move(command)] { return std::make_unique<CommandAgent>(command); }};
}

}  // namespace socnav
