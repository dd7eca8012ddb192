#include "bsp/domains/outdoor.hpp"

#include <cmath>

namespace bsp {

OutdoorModel::OutdoorModel(GridMap map, const MapConfig& cfg, NavMode mode, NavHeuristic heuristic)
    : GridNavModel(std::move(map), cfg.primitives, cfg.lidar, mode, heuristic, cfg.alpha),
      landmark_radius_(cfg.landmark_radius) {
  if (map_.start_cells.empty()) throw FixtureError("outdoor fixture needs S cells");
  if (mode == NavMode::goal_directed && map_.goal_cells.empty()) {
    throw FixtureError("goal-directed fixture needs a goal region");
  }
  if (map_.landmarks.size() > 62) throw FixtureError("too many landmarks to encode");
  for (const auto& [x, y] : map_.start_cells) {
    for (int theta : cfg.hypothesis_thetas) {
      hypotheses_.push_back(Pose{x, y, ((theta % kHeadings) + kHeadings) % kHeadings});
    }
  }
  build_dist_table();
}

BeliefState OutdoorModel::initial_belief() const {
  std::vector<std::pair<StateId, double>> raw;
  raw.reserve(hypotheses_.size());
  for (const Pose& h : hypotheses_) raw.emplace_back(encode_pose(map_, h), 1.0);
  return canonicalize(std::move(raw));
}

bool OutdoorModel::is_goal_state(StateId s) const {
  if (mode_ != NavMode::goal_directed) return false;
  return GridNavModel::is_goal_state(s);
}

bool OutdoorModel::is_goal_belief(const BeliefState& b) const {
  if (mode_ == NavMode::info_gathering) return b.support_size() <= 1;
  return GoalPomdpModel::is_goal_belief(b);
}

double OutdoorModel::belief_heuristic(const BeliefState& b) const {
  if (mode_ == NavMode::info_gathering) {
    return alpha_ * static_cast<double>(b.support_size());
  }
  return GoalPomdpModel::belief_heuristic(b);
}

ObservationId OutdoorModel::landmark_observation(const Pose& p) const {
  ObservationId bits = 0;
  for (std::size_t i = 0; i < map_.landmarks.size(); ++i) {
    const double dx = map_.landmarks[i].x - p.x;
    const double dy = map_.landmarks[i].y - p.y;
    if (std::sqrt(dx * dx + dy * dy) <= landmark_radius_) {
      bits |= ObservationId{1} << i;
    }
  }
  return bits;
}

void OutdoorModel::enumerate_transitions(const Observable&, StateId s, ActionId a,
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

void OutdoorModel::enumerate_observations(const Observable&, StateId s, ActionId,
                                          std::vector<WeightedObservation>& out) const {
  out.clear();
  if (is_goal_state(s)) {
    out.emplace_back(kGoalObservation, 1.0);
    return;
  }
  out.emplace_back(landmark_observation(decode_pose(map_, s)), 1.0);
}

bool OutdoorModel::state_action_valid(StateId s, ActionId a) const {
  if (is_goal_state(s)) return true;
  const Pose p = decode_pose(map_, s);
  for (const auto& [x, y] : primitive_path(p, primitives_[static_cast<std::size_t>(a)])) {
    if (map_.hazard(x, y)) return false;
  }
  return true;
}

std::unique_ptr<GoalPomdpModel> outdoor_model(const std::string& map_path, NavMode mode,
                                              NavHeuristic heuristic) {
  return std::make_unique<OutdoorModel>(GridMap::load_file(map_path),
                                        MapConfig::load_for(map_path), mode, heuristic);
}

}  // namespace bsp
