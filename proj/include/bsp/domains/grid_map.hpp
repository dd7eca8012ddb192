#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "bsp/types.hpp"

namespace bsp {

// 8 discrete headings, 45 degrees apart. Grid y grows downward.
inline constexpr int kHeadings = 8;
inline constexpr int kHeadingDx[kHeadings] = {1, 1, 0, -1, -1, -1, 0, 1};
inline constexpr int kHeadingDy[kHeadings] = {0, 1, 1, 1, 0, -1, -1, -1};

struct Landmark {
  int x = 0;
  int y = 0;
};

/// Occupancy grid parsed from the ASCII map format: one row per line,
/// `#` occupied, `.` free, `~` slip region, `!` hazard, `L` landmark,
/// `G` goal-region cell, `S` start/hypothesis cell. The border must be
/// fully occupied (closed world).
struct GridMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> occupied_cells;
  std::vector<std::uint8_t> slip_flags;
  std::vector<std::uint8_t> hazard_flags;
  std::vector<Landmark> landmarks;
  std::vector<std::pair<int, int>> goal_cells;
  std::vector<std::pair<int, int>> start_cells;

  bool in_bounds(int x, int y) const { return x >= 0 && x < width && y >= 0 && y < height; }
  int cell_index(int x, int y) const { return y * width + x; }
  bool occupied(int x, int y) const {
    return !in_bounds(x, y) || occupied_cells[static_cast<std::size_t>(cell_index(x, y))] != 0;
  }
  bool slip(int x, int y) const {
    return in_bounds(x, y) && slip_flags[static_cast<std::size_t>(cell_index(x, y))] != 0;
  }
  bool hazard(int x, int y) const {
    return in_bounds(x, y) && hazard_flags[static_cast<std::size_t>(cell_index(x, y))] != 0;
  }
  bool goal_cell(int x, int y) const;

  static GridMap parse(const std::string& text);
  static GridMap load_file(const std::string& path);
};

struct Pose {
  int x = 0;
  int y = 0;
  int theta = 0;  // one of the 8 discrete headings
};

inline StateId encode_pose(const GridMap& map, const Pose& p) {
  return (static_cast<StateId>(p.y) * map.width + p.x) * kHeadings + p.theta;
}

inline Pose decode_pose(const GridMap& map, StateId s) {
  Pose p;
  p.theta = static_cast<int>(s % kHeadings);
  const auto cell = s / kHeadings;
  p.x = static_cast<int>(cell % map.width);
  p.y = static_cast<int>(cell / map.width);
  return p;
}

/// A primitive moves forward a fixed number of cells along the heading
/// and/or turns in place. The displacement sequence is collision-checked
/// cell by cell.
struct MotionPrimitive {
  int id = 0;
  std::string name;
  int forward_steps = 0;
  int turn = 0;  // -1 left, +1 right, 0 none
  double cost = 1.0;
};

/// The default primitive set: forward-1, turn-left, turn-right, forward-2.
std::vector<MotionPrimitive> default_primitives();

/// Resulting pose if the primitive is collision-free from p, else nullopt.
std::optional<Pose> apply_primitive(const GridMap& map, const Pose& p, const MotionPrimitive& prim);

/// Cells traversed by the primitive, excluding the start cell.
std::vector<std::pair<int, int>> primitive_path(const Pose& p, const MotionPrimitive& prim);

struct LidarSpec {
  int ray_count = 8;     // evenly spaced, heading-relative; must divide 8
  int max_range = 10;    // cells; readings clamp here
  int quantization = 1;  // cells per bin
};

/// Distance (in cells) to the first occupied cell along each ray, clamped
/// to max range, unquantized. Rays are heading-relative.
std::vector<int> raycast_ranges(const GridMap& map, const Pose& p, const LidarSpec& spec);

/// Quantize and pack the per-ray readings into a single observation id.
ObservationId encode_ranges(const std::vector<int>& ranges, const LidarSpec& spec);

ObservationId raycast_observation(const GridMap& map, const Pose& p, const LidarSpec& spec);

/// Sidecar configuration next to a map file (`<map>.cfg`), flat key = value
/// lines. Missing file or keys fall back to defaults.
struct MapConfig {
  LidarSpec lidar;
  int start_theta = 0;
  std::vector<int> hypothesis_thetas{0};
  double landmark_radius = 2.5;
  double alpha = 0.1;
  std::vector<MotionPrimitive> primitives = default_primitives();

  static MapConfig load_for(const std::string& map_path);
  static MapConfig parse(const std::string& text);
};

}  // namespace bsp
