#pragma once

#include <memory>

#include "bsp/domains/indoor.hpp"

namespace bsp {

/// Outdoor landmark navigation: deterministic transitions, cheap landmark
/// observations (set of landmarks within sensing radius of the true pose),
/// and a separate expensive validity oracle. An action is invalid from a
/// state when its displacement sequence crosses a hazard cell; it is
/// invalid from a belief when it is invalid from any support pose.
class OutdoorModel final : public GridNavModel {
 public:
  OutdoorModel(GridMap map, const MapConfig& cfg, NavMode mode,
               NavHeuristic heuristic = NavHeuristic::dist_optimistic);

  BeliefState initial_belief() const override;
  bool is_goal_state(StateId s) const override;
  bool is_goal_belief(const BeliefState& b) const override;
  double belief_heuristic(const BeliefState& b) const override;
  void enumerate_transitions(const Observable&, StateId s, ActionId a,
                             std::vector<WeightedState>& out) const override;
  void enumerate_observations(const Observable&, StateId s, ActionId a,
                              std::vector<WeightedObservation>& out) const override;

  bool has_validity_oracle() const override { return true; }
  bool state_action_valid(StateId s, ActionId a) const override;

  ObservationId landmark_observation(const Pose& p) const;

 private:
  std::vector<Pose> hypotheses_;
  double landmark_radius_;
};

std::unique_ptr<GoalPomdpModel> outdoor_model(const std::string& map_path, NavMode mode,
                                              NavHeuristic heuristic = NavHeuristic::dist_optimistic);

}  // namespace bsp
