#include "bsp/domains/indoor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <queue>

namespace bsp {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

GridNavModel::GridNavModel(GridMap map, std::vector<MotionPrimitive> primitives, LidarSpec lidar,
                           NavMode mode, NavHeuristic heuristic, double alpha)
    : map_(std::move(map)),
      primitives_(std::move(primitives)),
      lidar_(lidar),
      mode_(mode),
      heuristic_(heuristic),
      alpha_(alpha) {}

bool GridNavModel::is_goal_state(StateId s) const {
  if (mode_ != NavMode::goal_directed) return false;
  const Pose p = decode_pose(map_, s);
  return map_.goal_cell(p.x, p.y);
}

double GridNavModel::cost(const Observable&, StateId s, ActionId a) const {
  if (is_goal_state(s)) return 0.0;
  return primitives_[static_cast<std::size_t>(a)].cost;
}

bool GridNavModel::state_action_applicable(const Observable&, StateId s, ActionId a) const {
  if (is_goal_state(s)) return true;
  const Pose p = decode_pose(map_, s);
  return apply_primitive(map_, p, primitives_[static_cast<std::size_t>(a)]).has_value();
}

double GridNavModel::state_heuristic(StateId s) const {
  if (mode_ != NavMode::goal_directed) {
    throw UnsupportedDomainError("state heuristic undefined for information gathering");
  }
  if (heuristic_ == NavHeuristic::dist_optimistic) return dist_to_goal(s);
  const Pose p = decode_pose(map_, s);
  double best = kInf;
  for (const auto& [gx, gy] : map_.goal_cells) {
    const double dx = gx - p.x;
    const double dy = gy - p.y;
    best = std::min(best, std::sqrt(dx * dx + dy * dy));
  }
  return best;
}

void GridNavModel::outcomes(const Pose& from, const MotionPrimitive& prim,
                            std::vector<std::pair<Pose, double>>& out) const {
  out.clear();
  const auto intended = apply_primitive(map_, from, prim);
  if (!intended) throw DomainModelError("primitive applied from a state it is invalid in");
  out.emplace_back(*intended, 1.0);
}

void GridNavModel::build_dist_table() {
  if (mode_ != NavMode::goal_directed) return;
  const auto n = static_cast<std::size_t>(state_space_size());
  dist_table_.assign(n, kInf);

  // Reverse edges of the optimistic determinization: every positive
  // probability outcome of an applicable primitive is a traversable edge.
  std::vector<std::vector<std::pair<StateId, double>>> reverse_adj(n);
  std::vector<std::pair<Pose, double>> outs;
  for (int y = 0; y < map_.height; ++y) {
    for (int x = 0; x < map_.width; ++x) {
      if (map_.occupied(x, y) || map_.goal_cell(x, y)) continue;
      for (int theta = 0; theta < kHeadings; ++theta) {
        const Pose p{x, y, theta};
        const StateId s = encode_pose(map_, p);
        for (const auto& prim : primitives_) {
          if (!apply_primitive(map_, p, prim)) continue;
          outcomes(p, prim, outs);
          for (const auto& [next, prob] : outs) {
            reverse_adj[static_cast<std::size_t>(encode_pose(map_, next))].emplace_back(s,
                                                                                        prim.cost);
          }
        }
      }
    }
  }

  using Item = std::pair<double, StateId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  for (const auto& [gx, gy] : map_.goal_cells) {
    for (int theta = 0; theta < kHeadings; ++theta) {
      const StateId g = encode_pose(map_, Pose{gx, gy, theta});
      dist_table_[static_cast<std::size_t>(g)] = 0.0;
      heap.emplace(0.0, g);
    }
  }
  while (!heap.empty()) {
    const auto [d, s] = heap.top();
    heap.pop();
    if (d > dist_table_[static_cast<std::size_t>(s)]) continue;
    for (const auto& [prev, c] : reverse_adj[static_cast<std::size_t>(s)]) {
      const double nd = d + c;
      if (nd < dist_table_[static_cast<std::size_t>(prev)]) {
        dist_table_[static_cast<std::size_t>(prev)] = nd;
        heap.emplace(nd, prev);
      }
    }
  }

  // Every free-cell state must be able to reach G.
  for (int y = 0; y < map_.height; ++y) {
    for (int x = 0; x < map_.width; ++x) {
      if (map_.occupied(x, y)) continue;
      for (int theta = 0; theta < kHeadings; ++theta) {
        if (dist_table_[static_cast<std::size_t>(encode_pose(map_, Pose{x, y, theta}))] == kInf) {
          throw FixtureError("goal region unreachable from free cell (" + std::to_string(x) + "," +
                             std::to_string(y) + ")");
        }
      }
    }
  }
}

// ---- stochastic slip variant ----

IndoorStochasticModel::IndoorStochasticModel(GridMap map, const MapConfig& cfg,
                                             NavHeuristic heuristic)
    : GridNavModel(std::move(map), cfg.primitives, cfg.lidar, NavMode::goal_directed, heuristic,
                   cfg.alpha) {
  if (map_.start_cells.size() != 1) {
    throw FixtureError("stochastic indoor fixture needs exactly one start cell");
  }
  if (map_.goal_cells.empty()) throw FixtureError("stochastic indoor fixture needs a goal region");
  start_ = Pose{map_.start_cells.front().first, map_.start_cells.front().second,
                ((cfg.start_theta % kHeadings) + kHeadings) % kHeadings};
  build_dist_table();
}

BeliefState IndoorStochasticModel::initial_belief() const {
  return canonicalize({{encode_pose(map_, start_), 1.0}});
}

void IndoorStochasticModel::outcomes(const Pose& from, const MotionPrimitive& prim,
                                     std::vector<std::pair<Pose, double>>& out) const {
  out.clear();
  const auto intended = apply_primitive(map_, from, prim);
  if (!intended) throw DomainModelError("primitive applied from a state it is invalid in");
  if (prim.forward_steps == 0 || !map_.slip(from.x, from.y)) {
    out.emplace_back(*intended, 1.0);
    return;
  }
  // Slip perturbs the final displacement laterally; outcomes blocked by
  // occupancy collapse into the intended cell.
  double intended_mass = 0.5;
  for (int side : {-2, 2}) {
    const int dir = ((intended->theta + side) % kHeadings + kHeadings) % kHeadings;
    const int lx = intended->x + kHeadingDx[dir];
    const int ly = intended->y + kHeadingDy[dir];
    if (map_.occupied(lx, ly)) {
      intended_mass += 0.25;
    } else {
      out.emplace_back(Pose{lx, ly, intended->theta}, 0.25);
    }
  }
  out.emplace_back(*intended, intended_mass);
}

void IndoorStochasticModel::enumerate_transitions(const Observable&, StateId s, ActionId a,
                                                  std::vector<WeightedState>& out) const {
  out.clear();
  if (is_goal_state(s)) {
    out.emplace_back(s, 1.0);
    return;
  }
  std::vector<std::pair<Pose, double>> outs;
  outcomes(decode_pose(map_, s), primitives_[static_cast<std::size_t>(a)], outs);
  std::map<StateId, double> merged;
  for (const auto& [pose, prob] : outs) merged[encode_pose(map_, pose)] += prob;
  out.assign(merged.begin(), merged.end());
}

void IndoorStochasticModel::enumerate_observations(const Observable&, StateId s, ActionId,
                                                   std::vector<WeightedObservation>& out) const {
  out.clear();
  if (is_goal_state(s)) {
    out.emplace_back(kGoalObservation, 1.0);
    return;
  }
  out.emplace_back(raycast_observation(map_, decode_pose(map_, s), lidar_), 1.0);
}

// ---- start-uncertainty variant ----

IndoorStartUncertaintyModel::IndoorStartUncertaintyModel(GridMap map, const MapConfig& cfg,
                                                         NavMode mode, NavHeuristic heuristic)
    : GridNavModel(std::move(map), cfg.primitives, cfg.lidar, mode, heuristic, cfg.alpha) {
  if (map_.start_cells.empty()) throw FixtureError("start-uncertainty fixture needs S cells");
  if (mode == NavMode::goal_directed && map_.goal_cells.empty()) {
    throw FixtureError("goal-directed fixture needs a goal region");
  }
  for (const auto& [x, y] : map_.start_cells) {
    for (int theta : cfg.hypothesis_thetas) {
      hypotheses_.push_back(Pose{x, y, ((theta % kHeadings) + kHeadings) % kHeadings});
    }
  }
  build_dist_table();
}

BeliefState IndoorStartUncertaintyModel::initial_belief() const {
  std::vector<std::pair<StateId, double>> raw;
  raw.reserve(hypotheses_.size());
  for (const Pose& h : hypotheses_) raw.emplace_back(encode_pose(map_, h), 1.0);
  return canonicalize(std::move(raw));
}

bool IndoorStartUncertaintyModel::is_goal_state(StateId s) const {
  if (mode_ != NavMode::goal_directed) return false;
  return GridNavModel::is_goal_state(s);
}

bool IndoorStartUncertaintyModel::is_goal_belief(const BeliefState& b) const {
  if (mode_ == NavMode::info_gathering) return b.support_size() <= 1;
  return GoalPomdpModel::is_goal_belief(b);
}

double IndoorStartUncertaintyModel::belief_heuristic(const BeliefState& b) const {
  if (mode_ == NavMode::info_gathering) {
    return alpha_ * static_cast<double>(b.support_size());
  }
  return GoalPomdpModel::belief_heuristic(b);
}

void IndoorStartUncertaintyModel::enumerate_transitions(const Observable&, StateId s, ActionId a,
                                                        std::vector<WeightedState>& out) const {
  out.clear();
  if (is_goal_state(s)) {
    out.emplace_back(s, 1.0);
    return;
  }
  const auto next =
      apply_primitive(map_, decode_pose(map_, s), primitives_[static_cast<std::size_t>(a)]);
  if (!next) throw DomainModelError("primitive applied from a state it is invalid in");
  out.emplace_back(encode_pose(map_, *next), 1.0);
}

void IndoorStartUncertaintyModel::enumerate_observations(
    const Observable&, StateId s, ActionId, std::vector<WeightedObservation>& out) const {
  out.clear();
  if (is_goal_state(s)) {
    out.emplace_back(kGoalObservation, 1.0);
    return;
  }
  out.emplace_back(raycast_observation(map_, decode_pose(map_, s), lidar_), 1.0);
}

std::unique_ptr<GoalPomdpModel> indoor_stochastic_model(const std::string& map_path,
                                                        NavHeuristic heuristic) {
  return std::make_unique<IndoorStochasticModel>(GridMap::load_file(map_path),
                                                 MapConfig::load_for(map_path), heuristic);
}

std::unique_ptr<GoalPomdpModel> indoor_start_uncertainty_model(const std::string& map_path,
                                                               NavMode mode,
                                                               NavHeuristic heuristic) {
  return std::make_unique<IndoorStartUncertaintyModel>(GridMap::load_file(map_path),
                                                       MapConfig::load_for(map_path), mode,
                                                       heuristic);
}

}  // namespace bsp
