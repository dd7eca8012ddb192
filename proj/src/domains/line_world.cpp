#include "bsp/domains/line_world.hpp"

#include <algorithm>

namespace bsp {

BeliefState LineWorldModel::initial_belief() const {
  return canonicalize({{0, 1.0}, {1, 1.0}, {2, 1.0}});
}

void LineWorldModel::enumerate_transitions(const Observable&, StateId s, ActionId a,
                                           std::vector<WeightedState>& out) const {
  out.clear();
  if (is_goal_state(s)) {
    out.emplace_back(s, 1.0);
    return;
  }
  const StateId next = a == kLeft ? std::max<StateId>(0, s - 1) : std::min<StateId>(4, s + 1);
  out.emplace_back(next, 1.0);
}

void LineWorldModel::enumerate_observations(const Observable&, StateId s, ActionId,
                                            std::vector<WeightedObservation>& out) const {
  out.clear();
  out.emplace_back(is_goal_state(s) ? kGoalObservation : kNotGoal, 1.0);
}

double LineWorldModel::cost(const Observable&, StateId s, ActionId) const {
  return is_goal_state(s) ? 0.0 : 1.0;
}

std::unique_ptr<GoalPomdpModel> line_world() { return std::make_unique<LineWorldModel>(); }

}  // namespace bsp
