#pragma once

#include <unordered_map>
#include <vector>

#include "bsp/belief_mdp.hpp"

namespace bsp {

/// Exhaustively enumerated reachable belief MDP plus synchronous value
/// iteration over it. This is the independent reference the solvers are
/// checked against: it shares only the Bayesian belief-update primitives
/// with them, never the QTable/search machinery.
struct EnumeratedBeliefMdp {
  struct Branch {
    double probability = 0.0;
    std::int64_t successor = -1;  // -1: goal belief
  };
  struct ActionEntry {
    ActionId action = 0;
    double expected_cost = 0.0;
    std::vector<Branch> branches;
  };

  std::vector<BeliefState> beliefs;  // non-goal reachable beliefs; index 0 = b0
  std::vector<std::vector<ActionEntry>> actions;  // per belief
  std::unordered_map<BeliefKey, std::int64_t, BeliefKeyHash> index;

  std::size_t size() const { return beliefs.size(); }
};

/// BFS over all (belief, applicable action) pairs from b0. Throws
/// FixtureError when more than max_beliefs distinct non-goal beliefs are
/// reachable (the fixture is not enumerable at desk scale).
EnumeratedBeliefMdp enumerate_belief_mdp(const GoalPomdpModel& model,
                                         std::int64_t max_beliefs = 20000);

struct OracleSolution {
  std::vector<double> values;                  // V* per enumerated belief
  std::vector<std::vector<double>> q_values;   // Q* per belief, parallel to actions
  double value_b0 = 0.0;
};

/// Synchronous value iteration to a 1e-13 residual.
OracleSolution value_iterate(const EnumeratedBeliefMdp& mdp);

}  // namespace bsp
