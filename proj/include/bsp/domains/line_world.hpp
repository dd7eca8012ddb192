#pragma once

#include <memory>

#include "bsp/model.hpp"

namespace bsp {

/// Canonical test oracle: states {0..4}, goal {4}, actions Left/Right with
/// unit cost, deterministic clamped motion, goal-indicator observation,
/// b0 uniform over {0,1,2}. V*(b0) = 3.
class LineWorldModel final : public GoalPomdpModel {
 public:
  static constexpr ActionId kLeft = 0;
  static constexpr ActionId kRight = 1;
  static constexpr ObservationId kNotGoal = 0;

  int action_count() const override { return 2; }
  std::int64_t state_space_size() const override { return 5; }
  BeliefState initial_belief() const override;

  bool is_goal_state(StateId s) const override { return s == 4; }

  void enumerate_transitions(const Observable&, StateId s, ActionId a,
                             std::vector<WeightedState>& out) const override;
  void enumerate_observations(const Observable&, StateId s, ActionId a,
                              std::vector<WeightedObservation>& out) const override;
  double cost(const Observable&, StateId s, ActionId) const override;

  double state_heuristic(StateId s) const override { return is_goal_state(s) ? 0.0 : 4.0 - static_cast<double>(s); }
};

std::unique_ptr<GoalPomdpModel> line_world();

}  // namespace bsp
