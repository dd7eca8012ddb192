#include "bsp/model.hpp"

#include <chrono>
#include <cmath>
#include <thread>

namespace bsp {

bool GoalPomdpModel::is_goal_belief(const BeliefState& b) const {
  for (const auto& [s, p] : b.particles) {
    if (!is_goal_state(s)) return false;
  }
  return true;
}

std::vector<ActionId> GoalPomdpModel::applicable_actions(const BeliefState& b) const {
  std::vector<ActionId> out;
  for (ActionId a = 0; a < action_count(); ++a) {
    bool ok = true;
    for (const auto& [s, p] : b.particles) {
      if (is_goal_state(s)) continue;  // goal states are absorbing under any action
      if (!state_action_applicable(b.observable, s, a)) {
        ok = false;
        break;
      }
    }
    if (ok) out.push_back(a);
  }
  return out;
}

bool GoalPomdpModel::state_action_applicable(const Observable&, StateId, ActionId) const {
  return true;
}

Observable GoalPomdpModel::next_observable(const Observable& ctx, ActionId, ObservationId) const {
  return ctx;
}

double GoalPomdpModel::state_heuristic(StateId) const {
  throw UnsupportedDomainError("state_heuristic not defined for this domain");
}

double GoalPomdpModel::belief_heuristic(const BeliefState& b) const {
  double h = 0.0;
  for (const auto& [s, p] : b.particles) h += p * state_heuristic(s);
  return h;
}

bool GoalPomdpModel::state_action_valid(StateId, ActionId) const { return true; }

void ModelView::delay() const {
  if (delay_us_ > 0) {
    std::this_thread::sleep_for(std::chrono::microseconds(delay_us_));
  }
}

void ModelView::transitions(const Observable& ctx, StateId s, ActionId a,
                            std::vector<WeightedState>& out) {
  ++ledger_.transition_queries;
  delay();
  out.clear();
  model_.enumerate_transitions(ctx, s, a, out);
  if (out.empty()) {
    throw DomainModelError("model reports no successors for state " + std::to_string(s));
  }
}

void ModelView::observations(const Observable& ctx, StateId s, ActionId a,
                             std::vector<WeightedObservation>& out) {
  ++ledger_.observation_queries;
  delay();
  out.clear();
  model_.enumerate_observations(ctx, s, a, out);
  double total = 0.0;
  for (const auto& [z, p] : out) total += p;
  if (out.empty() || std::abs(total - 1.0) > kProbTolerance) {
    throw DomainModelError("observation row for state " + std::to_string(s) +
                           " does not sum to 1");
  }
}

bool ModelView::validity(StateId s, ActionId a) {
  ++ledger_.validity_queries;
  delay();
  return model_.state_action_valid(s, a);
}

}  // namespace bsp
