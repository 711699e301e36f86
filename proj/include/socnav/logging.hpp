#pragma once

namespace socnav {

/// Routes spdlog to stderr (stdout carries protocol traffic) at the level
/// named by SOCNAV_LOG_LEVEL: error, warn (default), info or debug.
void init_logging();

}  // namespace socnav
