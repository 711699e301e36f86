#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>

#include "socnav/world.hpp"

namespace socnav {

struct ReplayOptions {
  /// Render every n-th logged step (the last step is always rendered).
  int every = 1;
  double pixels_per_meter = 40.0;
  double robot_radius = 0.3;
  double human_radius = 0.3;
};

/// One SVG document for a single logged step line (JSON object as written by
/// the episode step log).
std::string render_frame_svg(const WorldMap& map, const std::string& log_line, const ReplayOptions& opt);

/// Renders a JSONL step log into frame_00000.svg, frame_00001.svg, ... under
/// out_dir. Returns the number of frames written. Throws std::runtime_error on
/// malformed lines, naming the line number.
std::size_t render_log(const WorldMap& map, std::istream& log, const std::filesystem::path& out_dir,
                       const ReplayOptions& opt);

}  // namespace socnav
