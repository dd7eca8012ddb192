#pragma once

#include <functional>
#include <map>
#include <memory>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "bsp/transition.hpp"

namespace bsp {

/// Heuristic hooks used by solvers and estimators. belief is required and
/// must return 0 on goal beliefs; state may be empty for domains without a
/// per-state cost-to-go (it is required by the Q^MDP and decomposed
/// estimators).
struct Heuristics {
  std::function<double(const BeliefState&)> belief;
  std::function<double(StateId)> state;
};

/// Binds the model's own heuristic hooks, forcing heur = 0 on goal beliefs.
Heuristics default_heuristics(const GoalPomdpModel& model);

struct BeliefMdpOptions {
  std::int64_t query_delay_us = 0;
  // Validate every action at evaluation time against the validity oracle
  // (the non-full-horizon baseline on validity-oracle domains).
  bool eager_validation = false;
};

/// Per-solve view of a domain as a belief MDP. Owns the query ledger, the
/// belief-transition cache keyed by (BeliefKey, ActionId), the action
/// blacklist used by full-horizon laziness, and the memoized validity
/// verdicts. Single-owner: never shared across solves.
class BeliefMdp {
 public:
  BeliefMdp(const GoalPomdpModel& model, Heuristics heuristics, BeliefMdpOptions options = {});

  const GoalPomdpModel& model() const { return model_; }
  ModelView& view() { return view_; }
  QueryLedger& ledger() { return ledger_; }
  const Heuristics& heuristics() const { return heuristics_; }
  const BeliefMdpOptions& options() const { return options_; }

  bool is_goal(const BeliefState& b) const { return model_.is_goal_belief(b); }
  double belief_heur(const BeliefState& b) const { return heuristics_.belief(b); }

  /// Applicable actions minus the blacklist for this belief.
  std::vector<ActionId> applicable(const BeliefState& b, const BeliefKey& key) const;

  /// Cached belief transition. The first call for a distinct (key, action)
  /// computes the branch set and increments belief_transitions_computed
  /// once; repeated calls are free.
  const BeliefTransition& transition(const BeliefState& b, const BeliefKey& key, ActionId a);

  const BeliefTransition* cached_transition(const BeliefKey& key, ActionId a) const;
  void drop_cached_transition(const BeliefKey& key, ActionId a);
  std::size_t cache_size() const;
  void clear_transition_cache();

  /// Memoized validity check: AND over support particles of the per-state
  /// validity oracle. Each fresh check counts one validity query per
  /// support particle.
  bool validate(const BeliefState& b, const BeliefKey& key, ActionId a);

  void blacklist(const BeliefKey& key, ActionId a);
  bool is_blacklisted(const BeliefKey& key, ActionId a) const;

 private:
  const GoalPomdpModel& model_;
  Heuristics heuristics_;
  BeliefMdpOptions options_;
  QueryLedger ledger_;
  ModelView view_;

  struct ActionSlot {
    std::vector<std::unique_ptr<BeliefTransition>> by_action;
  };
  std::unordered_map<BeliefKey, ActionSlot, BeliefKeyHash> cache_;
  std::unordered_map<BeliefKey, std::unordered_set<ActionId>, BeliefKeyHash> blacklist_;
  std::unordered_map<BeliefKey, std::map<ActionId, bool>, BeliefKeyHash> validity_memo_;
};

}  // namespace bsp
