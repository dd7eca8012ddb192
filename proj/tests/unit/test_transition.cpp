#include <doctest.h>

#include "bsp/belief_mdp.hpp"
#include "bsp/domains/line_world.hpp"
#include "bsp/transition.hpp"
#include "test_support.hpp"

using namespace bsp;

TEST_SUITE_BEGIN("transition");

namespace {

struct ViewFixture {
  LineWorldModel model;
  QueryLedger ledger;
  ModelView view{model, ledger};
};

}  // namespace

TEST_CASE("deterministic shift moves a uniform belief") {
  ViewFixture f;
  const BeliefState b = canonicalize({{0, 1.0}, {1, 1.0}, {2, 1.0}});
  const BeliefState b_a = belief_after_action(b, LineWorldModel::kRight, f.view);
  REQUIRE(b_a.support_size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(b_a.particles[i].first == static_cast<StateId>(i + 1));
    CHECK(b_a.particles[i].second == doctest::Approx(1.0 / 3));
  }
  CHECK(f.ledger.transition_queries == 3);  // one per support particle
}

TEST_CASE("goal beliefs are absorbing under any action") {
  ViewFixture f;
  const BeliefState goal = canonicalize({{4, 1.0}});
  for (ActionId a : {LineWorldModel::kLeft, LineWorldModel::kRight}) {
    const BeliefState next = belief_after_action(goal, a, f.view);
    REQUIRE(next.support_size() == 1);
    CHECK(next.particles[0].first == 4);
    CHECK(expected_cost(goal, a, f.model) == 0.0);
  }
}

TEST_CASE("slip-style stochastic row spreads mass") {
  // Single-cell belief through a 0.5/0.25/0.25 row, mirroring the slip cells.
  class SlipModel final : public testing::RandomDiscreteModel {
   public:
    SlipModel() : RandomDiscreteModel(1, 8, 1, 2) {}
    void enumerate_transitions(const Observable&, StateId s, ActionId,
                               std::vector<WeightedState>& out) const override {
      out = {{s + 1, 0.5}, {s, 0.25}, {s + 2, 0.25}};
    }
  };
  SlipModel model;
  QueryLedger ledger;
  ModelView view(model, ledger);
  const BeliefState b = canonicalize({{3, 1.0}});
  const BeliefState b_a = belief_after_action(b, 0, view);
  REQUIRE(b_a.support_size() == 3);
  CHECK(b_a.probability_of(3) == doctest::Approx(0.25));
  CHECK(b_a.probability_of(4) == doctest::Approx(0.5));
  CHECK(b_a.probability_of(5) == doctest::Approx(0.25));
}

TEST_CASE("observation distribution splits goal and non-goal mass") {
  ViewFixture f;
  const BeliefState b_a = canonicalize({{3, 0.5}, {4, 0.5}});
  const auto dist = observation_distribution(b_a, LineWorldModel::kRight, f.view);
  REQUIRE(dist.size() == 2);
  CHECK(dist[0].first == kGoalObservation);
  CHECK(dist[0].second == doctest::Approx(0.5));
  CHECK(dist[1].first == LineWorldModel::kNotGoal);
  CHECK(dist[1].second == doctest::Approx(0.5));
  CHECK(f.ledger.observation_queries == 2);
}

TEST_CASE("shared deterministic observation keeps one branch") {
  ViewFixture f;
  const BeliefState b_a = canonicalize({{1, 0.5}, {2, 0.5}});
  const auto dist = observation_distribution(b_a, LineWorldModel::kRight, f.view);
  REQUIRE(dist.size() == 1);
  CHECK(dist[0].second == doctest::Approx(1.0));
  const BeliefState post = belief_after_observation(b_a, LineWorldModel::kRight,
                                                    LineWorldModel::kNotGoal, f.view);
  CHECK(beliefs_close(post, b_a, 1e-12));  // uninformative observation
}

TEST_CASE("distinct deterministic observations split four ways") {
  // Four states, each with its own deterministic observation.
  class FourObsModel final : public testing::RandomDiscreteModel {
   public:
    FourObsModel() : RandomDiscreteModel(1, 6, 1, 4) {}
    void enumerate_observations(const Observable&, StateId s, ActionId,
                                std::vector<WeightedObservation>& out) const override {
      out = {{static_cast<ObservationId>(s), 1.0}};
    }
  };
  FourObsModel model;
  QueryLedger ledger;
  ModelView view(model, ledger);
  const BeliefState b_a = canonicalize({{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}});
  const auto dist = observation_distribution(b_a, 0, view);
  REQUIRE(dist.size() == 4);
  for (const auto& [z, p] : dist) CHECK(p == doctest::Approx(0.25));
}

TEST_CASE("conditioning removes the complementary mass") {
  ViewFixture f;
  const BeliefState b_a = canonicalize({{3, 0.5}, {4, 0.5}});
  const BeliefState not_goal = belief_after_observation(b_a, LineWorldModel::kRight,
                                                        LineWorldModel::kNotGoal, f.view);
  REQUIRE(not_goal.support_size() == 1);
  CHECK(not_goal.particles[0].first == 3);
  const BeliefState goal =
      belief_after_observation(b_a, LineWorldModel::kRight, kGoalObservation, f.view);
  REQUIRE(goal.support_size() == 1);
  CHECK(goal.particles[0].first == 4);
}

TEST_CASE("zero-probability observation is an error") {
  ViewFixture f;
  const BeliefState b_a = canonicalize({{1, 1.0}});
  CHECK_THROWS_AS(
      belief_after_observation(b_a, LineWorldModel::kRight, kGoalObservation, f.view),
      ZeroProbabilityObservationError);
}

TEST_CASE("full transition of the uniform {2,3} belief under Right") {
  ViewFixture f;
  const BeliefState b = canonicalize({{2, 1.0}, {3, 1.0}});
  const BeliefTransition tr = compute_belief_transition(b, LineWorldModel::kRight, f.view);
  CHECK(tr.expected_cost == doctest::Approx(1.0));
  REQUIRE(tr.branches.size() == 2);
  // Branches sorted by observation id: z_g (=-1) first.
  CHECK(tr.branches[0].observation == kGoalObservation);
  CHECK(tr.branches[0].probability == doctest::Approx(0.5));
  REQUIRE(tr.branches[0].successor.support_size() == 1);
  CHECK(tr.branches[0].successor.particles[0].first == 4);
  CHECK(tr.branches[0].successor_is_goal);
  CHECK(tr.branches[1].observation == LineWorldModel::kNotGoal);
  CHECK(tr.branches[1].probability == doctest::Approx(0.5));
  REQUIRE(tr.branches[1].successor.support_size() == 1);
  CHECK(tr.branches[1].successor.particles[0].first == 3);
}

TEST_CASE("goal belief input violates the transition precondition") {
  ViewFixture f;
  const BeliefState goal = canonicalize({{4, 1.0}});
  CHECK_THROWS_AS(compute_belief_transition(goal, LineWorldModel::kRight, f.view),
                  PreconditionError);
}

TEST_CASE("deterministic domain yields a single branch") {
  ViewFixture f;
  const BeliefState b = canonicalize({{0, 1.0}});
  const BeliefTransition tr = compute_belief_transition(b, LineWorldModel::kRight, f.view);
  REQUIRE(tr.branches.size() == 1);
  CHECK(tr.branches[0].probability == doctest::Approx(1.0));
}

TEST_CASE("broken observation rows are detected") {
  class BrokenObsModel final : public testing::RandomDiscreteModel {
   public:
    BrokenObsModel() : RandomDiscreteModel(1) {}
    void enumerate_observations(const Observable&, StateId, ActionId,
                                std::vector<WeightedObservation>& out) const override {
      out = {{0, 0.4}, {1, 0.4}};  // sums to 0.8
    }
  };
  BrokenObsModel model;
  QueryLedger ledger;
  ModelView view(model, ledger);
  const BeliefState b_a = canonicalize({{0, 1.0}});
  CHECK_THROWS_AS(observation_distribution(b_a, 0, view), DomainModelError);
}

TEST_CASE("Chapman-Kolmogorov consistency on random models") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    testing::RandomDiscreteModel model(seed);
    QueryLedger ledger;
    ModelView view(model, ledger);
    Rng rng(seed * 97);
    for (int trial = 0; trial < 25; ++trial) {
      std::vector<std::pair<StateId, double>> raw;
      const int n = 1 + static_cast<int>(rng.next_below(5));
      for (int i = 0; i < n; ++i) {
        raw.emplace_back(static_cast<StateId>(rng.next_below(5)), rng.next_double() + 0.05);
      }
      const BeliefState b = canonicalize(std::move(raw));
      const ActionId a = static_cast<ActionId>(rng.next_below(3));
      const BeliefState b_a = belief_after_action(b, a, view);
      const auto dist = observation_distribution(b_a, a, view);
      std::map<StateId, double> mixed;
      for (const auto& [z, pz] : dist) {
        const BeliefState post = belief_after_observation(b_a, a, z, view);
        for (const auto& [s, p] : post.particles) mixed[s] += pz * p;
      }
      for (const auto& [s, p] : b_a.particles) {
        CHECK(mixed[s] == doctest::Approx(p).epsilon(1e-9));
      }
    }
  }
}

TEST_CASE("transition cache counts one computation per pair") {
  LineWorldModel model;
  BeliefMdp mdp(model, default_heuristics(model));
  const BeliefState b = canonicalize({{2, 1.0}, {3, 1.0}});
  const BeliefKey key = make_key(b);
  const BeliefTransition& first = mdp.transition(b, key, LineWorldModel::kRight);
  const auto after_first = mdp.ledger();
  const BeliefTransition& second = mdp.transition(b, key, LineWorldModel::kRight);
  CHECK(&first == &second);
  CHECK(mdp.ledger().belief_transitions_computed == 1);
  CHECK(mdp.ledger().transition_queries == after_first.transition_queries);
  CHECK(mdp.ledger().observation_queries == after_first.observation_queries);

  // Identical branch sets on a fresh computation of an equal belief.
  const BeliefState b2 = canonicalize({{3, 2.0}, {2, 2.0}});
  const BeliefTransition& third = mdp.transition(b2, make_key(b2), LineWorldModel::kRight);
  CHECK(&first == &third);
  CHECK(mdp.ledger().belief_transitions_computed == 1);
}

TEST_SUITE_END();
