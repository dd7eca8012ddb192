#pragma once

#include <vector>

#include "bsp/model.hpp"

namespace bsp {

struct ObservationBranch {
  ObservationId observation;
  double probability;  // b_a(z)
  BeliefState successor;
  BeliefKey successor_key;
  bool successor_is_goal = false;
};

/// Full branch set for one (belief, action) pair: the expensive operation
/// the lazy planners defer. Branches are sorted by observation id and their
/// probabilities sum to 1.
struct BeliefTransition {
  ActionId action = 0;
  double expected_cost = 0.0;  // sum_s c(s,a) b(s)
  std::vector<ObservationBranch> branches;
};

/// Prior belief after executing a from b (no observation yet):
/// b_a(s) = sum_s' T(s', a, s) b(s'). Counts one transition query per
/// support particle of b.
BeliefState belief_after_action(const BeliefState& b, ActionId a, ModelView& view);

/// Observation distribution from the post-action belief:
/// b_a(z) = sum_s b_a(s) O(s, a, z). Zero-probability observations omitted.
/// Counts one observation query per support particle of b_a.
std::vector<WeightedObservation> observation_distribution(const BeliefState& b_a, ActionId a,
                                                          ModelView& view);

/// Posterior belief b_a^z(s) = O(s, a, z) b_a(s) / b_a(z). Throws
/// ZeroProbabilityObservationError when b_a(z) = 0.
BeliefState belief_after_observation(const BeliefState& b_a, ActionId a, ObservationId z,
                                     ModelView& view);

/// Compose the full belief transition for (b, a) in a single pass: one
/// transition query per particle of b, one observation query per particle
/// of b_a. Branches below the prune threshold are dropped and the rest
/// renormalized. Does not touch any cache or the belief_transitions_computed
/// counter; cached computation lives in BeliefMdp. Precondition: b is not a
/// goal belief.
BeliefTransition compute_belief_transition(const BeliefState& b, ActionId a, ModelView& view);

/// Expected immediate cost of a from b. Cost lookups are cheap and not
/// counted in the ledger.
double expected_cost(const BeliefState& b, ActionId a, const GoalPomdpModel& model);

}  // namespace bsp
