#include "bsp/transition.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bsp {

BeliefState belief_after_action(const BeliefState& b, ActionId a, ModelView& view) {
  std::map<StateId, double> mass;
  std::vector<WeightedState> row;
  for (const auto& [s, p] : b.particles) {
    view.transitions(b.observable, s, a, row);
    for (const auto& [s2, t] : row) mass[s2] += p * t;
  }
  std::vector<std::pair<StateId, double>> raw(mass.begin(), mass.end());
  return canonicalize(std::move(raw), b.observable);
}

std::vector<WeightedObservation> observation_distribution(const BeliefState& b_a, ActionId a,
                                                          ModelView& view) {
  std::map<ObservationId, double> prob;
  std::vector<WeightedObservation> row;
  for (const auto& [s, p] : b_a.particles) {
    view.observations(b_a.observable, s, a, row);
    for (const auto& [z, o] : row) {
      if (o > 0.0) prob[z] += p * o;
    }
  }
  return {prob.begin(), prob.end()};
}

BeliefState belief_after_observation(const BeliefState& b_a, ActionId a, ObservationId z,
                                     ModelView& view) {
  std::vector<std::pair<StateId, double>> raw;
  std::vector<WeightedObservation> row;
  double total = 0.0;
  for (const auto& [s, p] : b_a.particles) {
    view.observations(b_a.observable, s, a, row);
    for (const auto& [zi, o] : row) {
      if (zi == z && o > 0.0) {
        raw.emplace_back(s, p * o);
        total += p * o;
      }
    }
  }
  if (!(total > 0.0)) {
    throw ZeroProbabilityObservationError("belief_after_observation: b_a(z) = 0");
  }
  return canonicalize(std::move(raw), view.model().next_observable(b_a.observable, a, z));
}

BeliefTransition compute_belief_transition(const BeliefState& b, ActionId a, ModelView& view) {
  if (view.model().is_goal_belief(b)) {
    throw PreconditionError("compute_belief_transition: input is a goal belief");
  }

  BeliefTransition tr;
  tr.action = a;
  tr.expected_cost = expected_cost(b, a, view.model());

  const BeliefState b_a = belief_after_action(b, a, view);

  // One observation-row fetch per particle of b_a; rows are reused for both
  // the branch probabilities (Eq. 2 step) and the posteriors (Eq. 3 step).
  std::map<ObservationId, std::vector<std::pair<StateId, double>>> branch_mass;
  std::vector<WeightedObservation> row;
  for (const auto& [s, p] : b_a.particles) {
    view.observations(b_a.observable, s, a, row);
    for (const auto& [z, o] : row) {
      if (o > 0.0) branch_mass[z].emplace_back(s, p * o);
    }
  }

  double kept = 0.0;
  for (auto& [z, mass] : branch_mass) {
    double pz = 0.0;
    for (const auto& [s, m] : mass) pz += m;
    if (pz < kPruneThreshold) continue;  // Eq. 3 is undefined at zero probability
    ObservationBranch branch;
    branch.observation = z;
    branch.probability = pz;
    branch.successor = canonicalize(std::move(mass), view.model().next_observable(b.observable, a, z));
    branch.successor_key = make_key(branch.successor);
    branch.successor_is_goal = view.model().is_goal_belief(branch.successor);
    tr.branches.push_back(std::move(branch));
    kept += pz;
  }
  if (tr.branches.empty()) {
    throw DomainModelError("compute_belief_transition: all observation branches vanished");
  }
  for (auto& br : tr.branches) br.probability /= kept;
  return tr;
}

double expected_cost(const BeliefState& b, ActionId a, const GoalPomdpModel& model) {
  double c = 0.0;
  for (const auto& [s, p] : b.particles) c += p * model.cost(b.observable, s, a);
  return c;
}

}  // namespace bsp
