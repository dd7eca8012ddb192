#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bsp/estimators.hpp"
#include "bsp/qtable.hpp"

namespace bsp {

enum class SolverKind { rtdp_bel, lazy_rtdp_bel, lao_star, lazy_lao_star };

SolverKind solver_kind_from_string(const std::string& name);
std::string to_string(SolverKind kind);
bool solver_is_lazy(SolverKind kind);

struct SolverConfig {
  double residual_tolerance = 1e-9;  // eps_res
  double heuristic_inflation = 1.0;  // eps_inflate >= 1; applied at initialization only
  std::uint64_t seed = 0;
  std::int64_t max_trials = 200000;
  std::int64_t max_expansions = 2000000;
  double timeout_seconds = 300.0;
  int convergence_window = 10;   // RTDP-Bel checks convergence every W trials
  std::int64_t trial_step_cap = 0;  // 0 derives 10 * |S|
  std::int64_t query_delay_us = 0;
  bool eager_validation = false;
  bool check_monotone_backups = false;
  bool record_evaluation_log = false;
  // Full-horizon laziness.
  std::int64_t fh_max_outer = 100;
  bool fh_cold_restart = false;  // discard values/transitions between outer iterations
};

struct EvaluationLogEntry {
  BeliefKey key;
  ActionId action = 0;
  std::vector<ActionId> actions;       // record's action set at evaluation time
  std::vector<double> q_at_selection;  // parallel Q snapshot
};

struct SolverResult {
  double value_b0 = 0.0;
  bool converged = false;
  PolicyGraph policy;
  QueryLedger ledger;
  std::int64_t trials = 0;
  std::int64_t expansions = 0;
  double wall_time_seconds = 0.0;
  std::int64_t monotone_violations = 0;
  std::int64_t fh_outer_iterations = 0;
  std::int64_t fh_invalid_actions_found = 0;
  std::vector<EvaluationLogEntry> evaluation_log;
};

SolverResult rtdp_bel(const GoalPomdpModel& model, const Heuristics& h, const SolverConfig& cfg);
SolverResult lazy_rtdp_bel(const GoalPomdpModel& model, const Heuristics& h, QEstimator& estimator,
                           const SolverConfig& cfg);
SolverResult lao_star(const GoalPomdpModel& model, const Heuristics& h, const SolverConfig& cfg);
SolverResult lazy_lao_star(const GoalPomdpModel& model, const Heuristics& h, QEstimator& estimator,
                           const SolverConfig& cfg);

SolverResult solve(SolverKind kind, const GoalPomdpModel& model, const Heuristics& h,
                   QEstimator* estimator, const SolverConfig& cfg);

/// Full-horizon lazy planning: solve assuming every non-blacklisted action
/// is valid, validate only the (belief, action) pairs in the returned
/// policy, blacklist failures, re-solve warm-started, until every policy
/// action validates. The estimator may be null for vanilla inner solvers.
SolverResult fh_lazy(SolverKind inner, const GoalPomdpModel& model, const Heuristics& h,
                     QEstimator* estimator, const SolverConfig& cfg);

enum class ImproveOutcome { converged, best_action_unevaluated, policy_changed };

/// Repeated Bellman backups restricted to evaluated actions' cached
/// transitions, argmin re-selected over all entries (estimator-valued
/// unevaluated ones included). When lazy_aware, returns the moment a backup
/// makes an unevaluated action the argmin.
ImproveOutcome improve_values(const std::vector<BeliefKey>& order, QTable& qtable, BeliefMdp& mdp,
                              bool lazy_aware, const SolverConfig& cfg,
                              std::int64_t* monotone_violations = nullptr);

/// Greedy argmin closure from b0. Every node's action must be evaluated and
/// every reachable non-goal successor initialized; otherwise throws
/// PolicyExtractionError.
PolicyGraph extract_policy(QTable& qtable, const BeliefState& b0, BeliefMdp& mdp);

enum class EvalMode { exact, monte_carlo };

/// Expected cost of a closed policy from its root. Exact mode solves the
/// linear cost-to-go system on the policy graph and throws
/// PolicyDivergenceError when some node cannot reach termination.
/// Monte-Carlo mode averages seeded rollouts through the model.
double evaluate_policy(const PolicyGraph& policy, const GoalPomdpModel& model, EvalMode mode,
                       std::int64_t mc_rollouts = 10000, std::uint64_t seed = 0);

}  // namespace bsp
