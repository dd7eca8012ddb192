#include "bsp/domains/grid_map.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace bsp {

bool GridMap::goal_cell(int x, int y) const {
  return std::find(goal_cells.begin(), goal_cells.end(), std::make_pair(x, y)) != goal_cells.end();
}

GridMap GridMap::parse(const std::string& text) {
  GridMap map;
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.size() < 3) throw FixtureError("map must have at least 3 rows");
  map.height = static_cast<int>(rows.size());
  map.width = static_cast<int>(rows.front().size());
  if (map.width < 3) throw FixtureError("map must have at least 3 columns");

  map.occupied_cells.assign(static_cast<std::size_t>(map.width * map.height), 0);
  map.slip_flags.assign(map.occupied_cells.size(), 0);
  map.hazard_flags.assign(map.occupied_cells.size(), 0);

  for (int y = 0; y < map.height; ++y) {
    if (static_cast<int>(rows[static_cast<std::size_t>(y)].size()) != map.width) {
      throw FixtureError("map rows have unequal widths");
    }
    for (int x = 0; x < map.width; ++x) {
      const char c = rows[static_cast<std::size_t>(y)][static_cast<std::size_t>(x)];
      const auto idx = static_cast<std::size_t>(map.cell_index(x, y));
      switch (c) {
        case '#': map.occupied_cells[idx] = 1; break;
        case '.': break;
        case '~': map.slip_flags[idx] = 1; break;
        case '!': map.hazard_flags[idx] = 1; break;
        case 'L': map.landmarks.push_back({x, y}); break;
        case 'G': map.goal_cells.emplace_back(x, y); break;
        case 'S': map.start_cells.emplace_back(x, y); break;
        default: throw FixtureError(std::string("unknown map character '") + c + "'");
      }
    }
  }

  for (int x = 0; x < map.width; ++x) {
    if (!map.occupied(x, 0) || !map.occupied(x, map.height - 1)) {
      throw FixtureError("map border must be fully occupied");
    }
  }
  for (int y = 0; y < map.height; ++y) {
    if (!map.occupied(0, y) || !map.occupied(map.width - 1, y)) {
      throw FixtureError("map border must be fully occupied");
    }
  }
  return map;
}

GridMap GridMap::load_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FixtureError("cannot open map file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

std::vector<MotionPrimitive> default_primitives() {
  return {
      {0, "fwd1", 1, 0, 1.0},
      {1, "turnl", 0, -1, 0.5},
      {2, "turnr", 0, 1, 0.5},
      {3, "fwd2", 2, 0, 2.0},
  };
}

std::vector<std::pair<int, int>> primitive_path(const Pose& p, const MotionPrimitive& prim) {
  std::vector<std::pair<int, int>> cells;
  int x = p.x;
  int y = p.y;
  for (int step = 0; step < prim.forward_steps; ++step) {
    x += kHeadingDx[p.theta];
    y += kHeadingDy[p.theta];
    cells.emplace_back(x, y);
  }
  return cells;
}

std::optional<Pose> apply_primitive(const GridMap& map, const Pose& p,
                                    const MotionPrimitive& prim) {
  Pose out = p;
  for (const auto& [x, y] : primitive_path(p, prim)) {
    if (map.occupied(x, y)) return std::nullopt;
    out.x = x;
    out.y = y;
  }
  out.theta = ((p.theta + prim.turn) % kHeadings + kHeadings) % kHeadings;
  return out;
}

std::vector<int> raycast_ranges(const GridMap& map, const Pose& p, const LidarSpec& spec) {
  std::vector<int> ranges(static_cast<std::size_t>(spec.ray_count));
  const int step = kHeadings / spec.ray_count;
  for (int r = 0; r < spec.ray_count; ++r) {
    const int dir = (p.theta + r * step) % kHeadings;
    int x = p.x;
    int y = p.y;
    int d = 0;
    for (;;) {
      ++d;
      x += kHeadingDx[dir];
      y += kHeadingDy[dir];
      if (d >= spec.max_range || map.occupied(x, y)) break;
    }
    ranges[static_cast<std::size_t>(r)] = std::min(d, spec.max_range);
  }
  return ranges;
}

ObservationId encode_ranges(const std::vector<int>& ranges, const LidarSpec& spec) {
  const int max_bin = (spec.max_range + spec.quantization - 1) / spec.quantization;
  ObservationId id = 0;
  for (int d : ranges) {
    const int bin = (d + spec.quantization - 1) / spec.quantization;
    id = id * (max_bin + 1) + bin;
  }
  return id;
}

ObservationId raycast_observation(const GridMap& map, const Pose& p, const LidarSpec& spec) {
  return encode_ranges(raycast_ranges(map, p, spec), spec);
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

std::vector<int> parse_int_list(const std::string& s) {
  std::vector<int> out;
  std::istringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(std::stoi(item));
  }
  return out;
}

}  // namespace

MapConfig MapConfig::parse(const std::string& text) {
  MapConfig cfg;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FixtureError("bad sidecar line: " + line);
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "lidar_rays") {
      cfg.lidar.ray_count = std::stoi(value);
      if (cfg.lidar.ray_count < 1 || kHeadings % cfg.lidar.ray_count != 0) {
        throw FixtureError("lidar_rays must evenly divide 8");
      }
    } else if (key == "lidar_max_range") {
      cfg.lidar.max_range = std::stoi(value);
    } else if (key == "lidar_quantization") {
      cfg.lidar.quantization = std::stoi(value);
      if (cfg.lidar.quantization < 1) throw FixtureError("lidar_quantization must be >= 1");
    } else if (key == "start_theta") {
      cfg.start_theta = std::stoi(value);
    } else if (key == "hypothesis_thetas") {
      cfg.hypothesis_thetas = parse_int_list(value);
      if (cfg.hypothesis_thetas.empty()) throw FixtureError("hypothesis_thetas is empty");
    } else if (key == "landmark_radius") {
      cfg.landmark_radius = std::stod(value);
    } else if (key == "alpha") {
      cfg.alpha = std::stod(value);
    } else if (key == "primitives") {
      // name:cost pairs restricted to the default primitive shapes
      cfg.primitives.clear();
      std::istringstream plist(value);
      std::string item;
      int id = 0;
      while (std::getline(plist, item, ',')) {
        item = trim(item);
        const auto colon = item.find(':');
        const std::string name = colon == std::string::npos ? item : item.substr(0, colon);
        const double cost = colon == std::string::npos ? 1.0 : std::stod(item.substr(colon + 1));
        MotionPrimitive prim;
        bool known = false;
        for (const auto& base : default_primitives()) {
          if (base.name == name) {
            prim = base;
            known = true;
            break;
          }
        }
        if (!known) throw FixtureError("unknown primitive: " + name);
        prim.id = id++;
        prim.cost = cost;
        cfg.primitives.push_back(prim);
      }
      if (cfg.primitives.empty()) throw FixtureError("empty primitive list");
    } else {
      throw FixtureError("unknown sidecar key: " + key);
    }
  }
  return cfg;
}

MapConfig MapConfig::load_for(const std::string& map_path) {
  std::ifstream in(map_path + ".cfg");
  if (!in) return MapConfig{};
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

}  // namespace bsp
