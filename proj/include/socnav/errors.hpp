#pragma once

#include <stdexcept>
#include <string>

namespace socnav {

/// Invalid or unloadable configuration / map.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Global planner found no route between the requested poses.
struct NoPathError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// An agent produced something other than a valid discrete action.
struct AgentProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Malformed or out-of-order request on the wire protocol.
struct ProtocolError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace socnav
