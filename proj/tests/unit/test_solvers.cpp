#include <doctest.h>

#include <cmath>
#include <set>

#include "bsp/domains/contact.hpp"
#include "bsp/domains/indoor.hpp"
#include "bsp/domains/line_world.hpp"
#include "bsp/oracle.hpp"
#include "bsp/solvers.hpp"

using namespace bsp;

namespace {

const std::string kFixtures = BSP_FIXTURE_DIR;

QEstimator qmdp_estimator(const Heuristics& h, std::uint64_t seed) {
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::qmdp;
  cfg.seed = seed;
  return QEstimator(cfg, h);
}

// Forced chain: states 0 -> 1 -> 2(goal), a single unit-cost action.
class CorridorModel final : public GoalPomdpModel {
 public:
  int action_count() const override { return 1; }
  std::int64_t state_space_size() const override { return 3; }
  BeliefState initial_belief() const override { return canonicalize({{0, 1.0}}); }
  bool is_goal_state(StateId s) const override { return s == 2; }
  void enumerate_transitions(const Observable&, StateId s, ActionId,
                             std::vector<WeightedState>& out) const override {
    out.clear();
    out.emplace_back(is_goal_state(s) ? s : s + 1, 1.0);
  }
  void enumerate_observations(const Observable&, StateId s, ActionId,
                              std::vector<WeightedObservation>& out) const override {
    out.clear();
    out.emplace_back(is_goal_state(s) ? kGoalObservation : 0, 1.0);
  }
  double cost(const Observable&, StateId s, ActionId) const override {
    return is_goal_state(s) ? 0.0 : 1.0;
  }
  double state_heuristic(StateId s) const override {
    return is_goal_state(s) ? 0.0 : static_cast<double>(2 - s);
  }
};

}  // namespace

TEST_SUITE_BEGIN("solvers");

TEST_CASE("all four planners reach the line-world optimum") {
  const auto model = line_world();
  const Heuristics h = default_heuristics(*model);
  SolverConfig cfg;
  cfg.seed = 11;
  cfg.check_monotone_backups = true;

  const auto check = [&](const SolverResult& res) {
    REQUIRE(res.converged);
    CHECK(res.value_b0 == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(res.monotone_violations == 0);
    // Greedy policy: a chain of Right actions.
    for (const auto& key : res.policy.order) {
      CHECK(res.policy.nodes.at(key).action == LineWorldModel::kRight);
    }
    CHECK(evaluate_policy(res.policy, *model, EvalMode::exact) == doctest::Approx(3.0));
  };

  check(rtdp_bel(*model, h, cfg));
  check(lao_star(*model, h, cfg));
  {
    QEstimator est = qmdp_estimator(h, 11);
    check(lazy_rtdp_bel(*model, h, est, cfg));
  }
  {
    QEstimator est = qmdp_estimator(h, 11);
    check(lazy_lao_star(*model, h, est, cfg));
  }
}

TEST_CASE("monte-carlo policy evaluation concentrates on the oracle value") {
  const auto model = line_world();
  const Heuristics h = default_heuristics(*model);
  SolverConfig cfg;
  cfg.seed = 1;
  const auto res = lao_star(*model, h, cfg);
  REQUIRE(res.converged);
  const double mc = evaluate_policy(res.policy, *model, EvalMode::monte_carlo, 100000, 1234);
  CHECK(std::abs(mc - 3.0) <= 0.05);
}

TEST_CASE("a goal initial belief solves trivially") {
  ContactWorld w;
  w.field_width = 4;
  w.field_height = 2;
  w.robot_x = 0;
  w.robot_y = 0;
  w.hypothesis_cells = {{2, 1}};
  w.sweeps = {{1, 0, 3}};
  ContactToyModel model(std::move(w));
  const Heuristics h = default_heuristics(model);
  SolverConfig cfg;
  for (SolverKind kind : {SolverKind::rtdp_bel, SolverKind::lao_star}) {
    const auto res = solve(kind, model, h, nullptr, cfg);
    CHECK(res.converged);
    CHECK(res.value_b0 == 0.0);
    CHECK(res.policy.root_is_goal);
    CHECK(res.policy.empty());
    CHECK(res.expansions == 0);
    CHECK(evaluate_policy(res.policy, model, EvalMode::exact) == 0.0);
  }
}

TEST_CASE("forced two-step corridor has value two") {
  CorridorModel model;
  const Heuristics h = default_heuristics(model);
  SolverConfig cfg;
  cfg.seed = 5;
  const auto res = rtdp_bel(model, h, cfg);
  REQUIRE(res.converged);
  CHECK(res.value_b0 == doctest::Approx(2.0));
  const auto lao = lao_star(model, h, cfg);
  REQUIRE(lao.converged);
  CHECK(lao.value_b0 == doctest::Approx(2.0));
  // Deterministic corridor: expansions equal the path length, policy linear.
  CHECK(lao.expansions == 2);
  CHECK(lao.policy.order.size() == 2);
}

TEST_CASE("single-action domains defer nothing") {
  CorridorModel model;
  const Heuristics h = default_heuristics(model);
  SolverConfig cfg;
  cfg.seed = 5;
  const auto vanilla = rtdp_bel(model, h, cfg);
  QEstimator est = qmdp_estimator(h, 5);
  const auto lazy = lazy_rtdp_bel(model, h, est, cfg);
  REQUIRE(vanilla.converged);
  REQUIRE(lazy.converged);
  CHECK(lazy.value_b0 == doctest::Approx(vanilla.value_b0));
  CHECK(lazy.ledger.transition_queries == vanilla.ledger.transition_queries);
  CHECK(lazy.ledger.observation_queries == vanilla.ledger.observation_queries);
  CHECK(lazy.ledger.belief_transitions_computed == vanilla.ledger.belief_transitions_computed);
  CHECK(lazy.trials == vanilla.trials);
}

TEST_CASE("improve_values backs up a single evaluated action to convergence") {
  const auto model = line_world();
  const Heuristics h = default_heuristics(*model);
  BeliefMdp mdp(*model, h);
  QTable qtable;
  const BeliefState b = canonicalize({{3, 1.0}});
  const BeliefKey key = make_key(b);
  BeliefRecord& rec = qtable.ensure(key, b, {LineWorldModel::kRight});
  rec.value = h.belief(b);
  mdp.transition(b, key, LineWorldModel::kRight);
  rec.entries[0].evaluated = true;
  rec.initialized = true;
  SolverConfig cfg;
  const auto out = improve_values({key}, qtable, mdp, false, cfg);
  CHECK(out == ImproveOutcome::converged);
  // All successors are goal beliefs: V equals the expected cost.
  CHECK(qtable.find(key)->value == doctest::Approx(1.0));
}

TEST_CASE("improve_values returns immediately on an unevaluated argmin") {
  const auto model = line_world();
  const Heuristics h = default_heuristics(*model);
  BeliefMdp mdp(*model, h);
  QTable qtable;
  const BeliefState b = canonicalize({{2, 1.0}, {3, 1.0}});
  const BeliefKey key = make_key(b);
  BeliefRecord& rec = qtable.ensure(key, b, {LineWorldModel::kLeft, LineWorldModel::kRight});
  rec.initialized = true;
  rec.value = h.belief(b);
  mdp.transition(b, key, LineWorldModel::kLeft);
  rec.entries[0].evaluated = true;
  rec.entries[0].q = 5.0;
  rec.entries[1].q = 0.25;  // strictly smallest, never evaluated
  rec.entries[1].source = QSource::estimator;
  SolverConfig cfg;
  CHECK(improve_values({key}, qtable, mdp, true, cfg) ==
        ImproveOutcome::best_action_unevaluated);
}

TEST_CASE("improve_values converges a two-node chain seeded high") {
  CorridorModel model;
  const Heuristics h = default_heuristics(model);
  BeliefMdp mdp(model, h);
  QTable qtable;
  const BeliefState b0 = canonicalize({{0, 1.0}});
  const BeliefState b1 = canonicalize({{1, 1.0}});
  const BeliefKey k0 = make_key(b0);
  const BeliefKey k1 = make_key(b1);
  for (const auto& [b, k] : {std::pair{b0, k0}, std::pair{b1, k1}}) {
    BeliefRecord& rec = qtable.ensure(k, b, {0});
    mdp.transition(b, k, 0);
    rec.entries[0].evaluated = true;
    rec.initialized = true;
    rec.value = 100.0;  // seeded far above the true cost
  }
  SolverConfig cfg;
  const auto out = improve_values({k0, k1}, qtable, mdp, false, cfg);
  CHECK(out == ImproveOutcome::converged);
  CHECK(qtable.find(k0)->value == doctest::Approx(2.0));
  CHECK(qtable.find(k1)->value == doctest::Approx(1.0));
}

TEST_CASE("extract_policy flags open policies") {
  const auto model = line_world();
  const Heuristics h = default_heuristics(*model);
  BeliefMdp mdp(*model, h);
  QTable qtable;
  const BeliefState b0 = model->initial_belief();
  CHECK_THROWS_AS(extract_policy(qtable, b0, mdp), PolicyExtractionError);

  // A record whose best action is unevaluated is open too.
  const BeliefKey key = make_key(b0);
  BeliefRecord& rec = qtable.ensure(key, b0, {LineWorldModel::kLeft, LineWorldModel::kRight});
  rec.initialized = true;
  rec.entries[1].q = 0.5;
  CHECK_THROWS_AS(extract_policy(qtable, b0, mdp), PolicyExtractionError);
}

TEST_CASE("a policy that never terminates fails exact evaluation") {
  const auto model = line_world();
  const Heuristics h = default_heuristics(*model);
  BeliefMdp mdp(*model, h);

  // Build the Left-only closure by hand: {0,1,2} -> {0,1} -> {0} -> {0}.
  PolicyGraph policy;
  BeliefState b = model->initial_belief();
  policy.root = make_key(b);
  for (;;) {
    const BeliefKey key = make_key(b);
    if (policy.nodes.count(key)) break;
    const BeliefTransition& tr = mdp.transition(b, key, LineWorldModel::kLeft);
    PolicyNode node;
    node.belief = b;
    node.action = LineWorldModel::kLeft;
    node.action_cost = tr.expected_cost;
    REQUIRE(tr.branches.size() == 1);
    node.edges.push_back(PolicyEdge{tr.branches[0].observation, 1.0,
                                    tr.branches[0].successor_key, false});
    policy.nodes.emplace(key, node);
    policy.order.push_back(key);
    b = tr.branches[0].successor;
  }
  CHECK_THROWS_AS(evaluate_policy(policy, *model, EvalMode::exact), PolicyDivergenceError);
}

TEST_CASE("lazy solvers evaluate only argmin actions") {
  const auto model = indoor_stochastic_model(kFixtures + "/indoor10_slip.map");
  const Heuristics h = default_heuristics(*model);
  SolverConfig cfg;
  cfg.seed = 7;
  cfg.record_evaluation_log = true;
  for (SolverKind kind : {SolverKind::lazy_rtdp_bel, SolverKind::lazy_lao_star}) {
    QEstimator est = qmdp_estimator(h, 7);
    const auto res = solve(kind, *model, h, &est, cfg);
    REQUIRE(res.converged);
    CHECK_FALSE(res.evaluation_log.empty());
    for (const auto& entry : res.evaluation_log) {
      // The evaluated action attained the minimum of the Q snapshot taken
      // at the moment of selection.
      double min_q = entry.q_at_selection.front();
      double q_of_action = std::numeric_limits<double>::quiet_NaN();
      for (std::size_t i = 0; i < entry.actions.size(); ++i) {
        min_q = std::min(min_q, entry.q_at_selection[i]);
        if (entry.actions[i] == entry.action) q_of_action = entry.q_at_selection[i];
      }
      CHECK(q_of_action <= min_q);
    }
  }
}

TEST_CASE("lazy planners never compute more transitions than vanilla") {
  const auto model = indoor_stochastic_model(kFixtures + "/indoor10_slip.map");
  const Heuristics h = default_heuristics(*model);
  SolverConfig cfg;
  cfg.seed = 3;
  const auto vanilla_rtdp = rtdp_bel(*model, h, cfg);
  QEstimator e1 = qmdp_estimator(h, 3);
  const auto lazy_rtdp = lazy_rtdp_bel(*model, h, e1, cfg);
  REQUIRE(vanilla_rtdp.converged);
  REQUIRE(lazy_rtdp.converged);
  // Strict saving on this fixture: several actions are never the argmin.
  CHECK(lazy_rtdp.ledger.belief_transitions_computed <
        vanilla_rtdp.ledger.belief_transitions_computed);

  const auto vanilla_lao = lao_star(*model, h, cfg);
  QEstimator e2 = qmdp_estimator(h, 3);
  const auto lazy_lao = lazy_lao_star(*model, h, e2, cfg);
  REQUIRE(vanilla_lao.converged);
  REQUIRE(lazy_lao.converged);
  CHECK(lazy_lao.ledger.belief_transitions_computed <
        vanilla_lao.ledger.belief_transitions_computed);
}

TEST_CASE("an exact estimator keeps lazy LAO* at or below vanilla evaluations") {
  const auto model = indoor_stochastic_model(kFixtures + "/indoor5_slip.map");
  const Heuristics h = default_heuristics(*model);
  SolverConfig cfg;
  cfg.seed = 2;
  const auto vanilla = lao_star(*model, h, cfg);
  EstimatorConfig ec;
  ec.kind = EstimatorKind::exact;
  ec.seed = 2;
  QEstimator est(ec, h);
  const auto lazy = lazy_lao_star(*model, h, est, cfg);
  REQUIRE(vanilla.converged);
  REQUIRE(lazy.converged);
  CHECK(lazy.value_b0 == doctest::Approx(vanilla.value_b0).epsilon(1e-9));
  CHECK(lazy.ledger.belief_transitions_computed <=
        vanilla.ledger.belief_transitions_computed);
}

TEST_CASE("identical seeds reproduce identical results") {
  const auto model = indoor_stochastic_model(kFixtures + "/indoor10_slip.map");
  const Heuristics h = default_heuristics(*model);
  SolverConfig cfg;
  cfg.seed = 13;
  const auto a = rtdp_bel(*model, h, cfg);
  const auto b = rtdp_bel(*model, h, cfg);
  CHECK(a.converged == b.converged);
  CHECK(a.value_b0 == b.value_b0);
  CHECK(a.trials == b.trials);
  CHECK(a.ledger.transition_queries == b.ledger.transition_queries);
  CHECK(a.ledger.observation_queries == b.ledger.observation_queries);
  CHECK(a.ledger.belief_transitions_computed == b.ledger.belief_transitions_computed);
  REQUIRE(a.policy.order.size() == b.policy.order.size());
  for (std::size_t i = 0; i < a.policy.order.size(); ++i) {
    CHECK(a.policy.order[i] == b.policy.order[i]);
    CHECK(a.policy.nodes.at(a.policy.order[i]).action ==
          b.policy.nodes.at(b.policy.order[i]).action);
  }
}

TEST_CASE("inflated heuristics still converge on the line world") {
  const auto model = line_world();
  const Heuristics h = default_heuristics(*model);
  SolverConfig cfg;
  cfg.seed = 1;
  cfg.heuristic_inflation = 2.0;
  const auto res = rtdp_bel(*model, h, cfg);
  REQUIRE(res.converged);
  CHECK(res.value_b0 >= 3.0 - 1e-9);
  CHECK(res.value_b0 <= 6.0 + 1e-9);
}

TEST_SUITE_END();
