#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "socnav/config.hpp"
#include "socnav/world.hpp"

namespace socnav::testing {

inline std::filesystem::path source_path(const std::string& rel) {
  return std::filesystem::path(SOCNAV_SOURCE_DIR) / rel;
}

inline SimConfig training_config() { return load_config(source_path("configs/training.json")); }

/// Open square room [0,size]^2 with a 3x3 node grid, all legal.
inline std::shared_ptr<const WorldMap> box_map(double size = 10.0) {
  auto map = std::make_shared<WorldMap>();
  map->name = "box";
  map->segments = {Segment(0, 0, size, 0), Segment(size, 0, size, size), Segment(size, size, 0, size),
                   Segment(0, size, 0, 0)};
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      map->nav_nodes.emplace_back(size * (0.2 + 0.3 * i), size * (0.2 + 0.3 * j), 0.0);
      map->legal_pose_indices.push_back(3 * i + j);
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      const int k = 3 * i + j;
      const double s = 0.3 * size;
      if (i < 2) map->nav_edges.push_back({k, k + 3, s});
      if (j < 2) map->nav_edges.push_back({k, k + 1, s});
    }
  }
  return map;
}

/// Map with no walls and the given nodes, all legal and chained in order.
inline std::shared_ptr<const WorldMap> empty_map(std::vector<Pose2> nodes) {
  auto map = std::make_shared<WorldMap>();
  map->name = "empty";
  map->nav_nodes = std::move(nodes);
  for (int i = 0; i < static_cast<int>(map->nav_nodes.size()); ++i) {
    map->legal_pose_indices.push_back(i);
    if (i > 0) {
      map->nav_edges.push_back(
          {i - 1, i, (map->nav_nodes[i].position - map->nav_nodes[i - 1].position).norm()});
    }
  }
  return map;
}

}  // namespace socnav::testing
