#pragma once

#include <cstdint>
#include <vector>

#include "bsp/belief.hpp"
#include "bsp/types.hpp"

namespace bsp {

/// Counters for the expensive model queries a solve performs. Monotonically
/// non-decreasing during a solve; laziness savings are measured purely as
/// counter ratios, independent of wall clock.
struct QueryLedger {
  std::uint64_t transition_queries = 0;
  std::uint64_t observation_queries = 0;
  std::uint64_t validity_queries = 0;
  std::uint64_t belief_transitions_computed = 0;
};

using WeightedState = std::pair<StateId, double>;
using WeightedObservation = std::pair<ObservationId, double>;

/// Domain contract for a Goal-POMDP. Implementations are immutable after
/// construction and safe to share across concurrent solves; all per-solve
/// mutable state (ledgers, caches) lives outside the model.
///
/// The Observable argument is the fully observable component of the belief
/// the query originates from (e.g. the robot cell in the contact domain);
/// domains without one ignore it.
class GoalPomdpModel {
 public:
  virtual ~GoalPomdpModel() = default;

  virtual int action_count() const = 0;
  virtual std::int64_t state_space_size() const = 0;
  virtual BeliefState initial_belief() const = 0;

  virtual bool is_goal_state(StateId s) const = 0;

  /// Default: every support particle is a goal state. Information-gathering
  /// domains override this with a support-size test.
  virtual bool is_goal_belief(const BeliefState& b) const;

  /// Actions executable from every support particle of b. Inapplicable
  /// actions are excluded from the action set rather than penalized.
  virtual std::vector<ActionId> applicable_actions(const BeliefState& b) const;

  virtual bool state_action_applicable(const Observable& ctx, StateId s, ActionId a) const;

  /// Enumerate T(s, a, .) as (successor, probability) pairs.
  virtual void enumerate_transitions(const Observable& ctx, StateId s, ActionId a,
                                     std::vector<WeightedState>& out) const = 0;

  /// Enumerate O(s_next, a, .) as (observation, probability) pairs.
  virtual void enumerate_observations(const Observable& ctx, StateId s_next, ActionId a,
                                      std::vector<WeightedObservation>& out) const = 0;

  /// Successor observable component after executing a and observing z.
  virtual Observable next_observable(const Observable& ctx, ActionId a, ObservationId z) const;

  virtual double cost(const Observable& ctx, StateId s, ActionId a) const = 0;

  /// Per-state cost-to-go heuristic. Domains without one (pure
  /// information-gathering) throw UnsupportedDomainError.
  virtual double state_heuristic(StateId s) const;

  /// Belief heuristic. Default: expectation of state_heuristic under b.
  virtual double belief_heuristic(const BeliefState& b) const;

  // Expensive action-validity oracle, separate from the (cheap) transition
  // and observation models. Used by full-horizon lazy planning.
  virtual bool has_validity_oracle() const { return false; }
  virtual bool state_action_valid(StateId s, ActionId a) const;
};

/// Instrumented access point to a model: every expensive query is counted
/// in the ledger and optionally slowed by an artificial per-query delay to
/// emulate expensive models in wall-clock experiments.
class ModelView {
 public:
  ModelView(const GoalPomdpModel& model, QueryLedger& ledger, std::int64_t query_delay_us = 0)
      : model_(model), ledger_(ledger), delay_us_(query_delay_us) {}

  const GoalPomdpModel& model() const { return model_; }
  QueryLedger& ledger() { return ledger_; }

  void transitions(const Observable& ctx, StateId s, ActionId a, std::vector<WeightedState>& out);
  void observations(const Observable& ctx, StateId s, ActionId a,
                    std::vector<WeightedObservation>& out);
  bool validity(StateId s, ActionId a);

 private:
  void delay() const;

  const GoalPomdpModel& model_;
  QueryLedger& ledger_;
  std::int64_t delay_us_;
};

}  // namespace bsp
