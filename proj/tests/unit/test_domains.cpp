#include <doctest.h>

#include <cmath>
#include <queue>
#include <set>

#include "bsp/domains/contact.hpp"
#include "bsp/domains/indoor.hpp"
#include "bsp/domains/line_world.hpp"
#include "bsp/domains/outdoor.hpp"
#include "bsp/oracle.hpp"
#include "bsp/rng.hpp"
#include "bsp/solvers.hpp"

using namespace bsp;

namespace {
const std::string kFixtures = BSP_FIXTURE_DIR;
}

TEST_SUITE_BEGIN("domains");

TEST_CASE("map parsing rejects malformed fixtures") {
  CHECK_THROWS_AS(GridMap::parse("###\n#.#\n##"), FixtureError);   // ragged rows
  CHECK_THROWS_AS(GridMap::parse("###\n#.#\n#.#"), FixtureError);  // open border
  CHECK_THROWS_AS(GridMap::parse("###\n#?#\n###"), FixtureError);  // unknown char
  CHECK_THROWS_AS(GridMap::parse("####\n####"), FixtureError);     // too small
}

TEST_CASE("map parsing collects cell roles") {
  const GridMap map = GridMap::parse("#####\n#S~G#\n#.!L#\n#####");
  CHECK(map.width == 5);
  CHECK(map.height == 4);
  CHECK(map.start_cells == std::vector<std::pair<int, int>>{{1, 1}});
  CHECK(map.goal_cells == std::vector<std::pair<int, int>>{{3, 1}});
  CHECK(map.slip(2, 1));
  CHECK(map.hazard(2, 2));
  REQUIRE(map.landmarks.size() == 1);
  CHECK(map.landmarks[0].x == 3);
  CHECK(map.landmarks[0].y == 2);
  CHECK(map.occupied(0, 0));
  CHECK_FALSE(map.occupied(1, 2));
}

TEST_CASE("forward ray reads the distance to the first occupied cell") {
  // Pose faces east; the wall is 3 cells ahead.
  const GridMap map = GridMap::parse("######\n#....#\n#....#\n######");
  const LidarSpec spec{8, 10, 1};
  const auto ranges = raycast_ranges(map, Pose{1, 1, 0}, spec);
  CHECK(ranges[0] == 4);  // east wall at x=5 from x=1
  const auto ranges2 = raycast_ranges(map, Pose{2, 1, 0}, spec);
  CHECK(ranges2[0] == 3);
}

TEST_CASE("rays clamp at max range in open corridors") {
  std::string corridor = "##############\n#............#\n##############";
  const GridMap map = GridMap::parse(corridor);
  const LidarSpec spec{1, 10, 1};
  const auto ranges = raycast_ranges(map, Pose{1, 1, 0}, spec);
  CHECK(ranges[0] == 10);
}

namespace {

// Independent brute-force traversal used as the raycast oracle.
std::vector<int> brute_force_rays(const GridMap& map, const Pose& p, const LidarSpec& spec) {
  std::vector<int> out;
  for (int r = 0; r < spec.ray_count; ++r) {
    const int dir = (p.theta + r * (kHeadings / spec.ray_count)) % kHeadings;
    int d = 1;
    while (d < spec.max_range) {
      const int x = p.x + d * kHeadingDx[dir];
      const int y = p.y + d * kHeadingDy[dir];
      if (map.occupied(x, y)) break;
      ++d;
    }
    out.push_back(d);
  }
  return out;
}

GridMap random_map(Rng& rng, int w, int h) {
  std::string text;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const bool border = x == 0 || y == 0 || x == w - 1 || y == h - 1;
      text += border || rng.next_double() < 0.25 ? '#' : '.';
    }
    text += '\n';
  }
  return GridMap::parse(text);
}

}  // namespace

TEST_CASE("raycast agrees with the brute-force oracle on random fixtures") {
  Rng rng(2024);
  int checked = 0;
  for (int fixture = 0; fixture < 100; ++fixture) {
    const int w = 5 + static_cast<int>(rng.next_below(8));
    const int h = 5 + static_cast<int>(rng.next_below(8));
    const GridMap map = random_map(rng, w, h);
    const LidarSpec spec{8, 1 + static_cast<int>(rng.next_below(12)),
                         1 + static_cast<int>(rng.next_below(3))};
    for (int trial = 0; trial < 20; ++trial) {
      const int x = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(w - 2)));
      const int y = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(h - 2)));
      if (map.occupied(x, y)) continue;
      const Pose p{x, y, static_cast<int>(rng.next_below(8))};
      CHECK(raycast_ranges(map, p, spec) == brute_force_rays(map, p, spec));
      // Identical inputs give identical observation ids.
      CHECK(raycast_observation(map, p, spec) == raycast_observation(map, p, spec));
      ++checked;
    }
  }
  CHECK(checked > 500);
}

TEST_CASE("primitives collide cell by cell and turns stay in place") {
  const GridMap map = GridMap::parse("#####\n#..##\n#...#\n#####");
  const auto prims = default_primitives();
  const Pose p{1, 1, 0};
  const auto fwd1 = apply_primitive(map, p, prims[0]);
  REQUIRE(fwd1.has_value());
  CHECK(fwd1->x == 2);
  CHECK_FALSE(apply_primitive(map, p, prims[3]).has_value());  // fwd2 hits the wall at x=3
  const auto turn = apply_primitive(map, p, prims[1]);
  REQUIRE(turn.has_value());
  CHECK(turn->x == 1);
  CHECK(turn->theta == 7);
}

namespace {

// Uniform-cost-search oracle over the optimistic determinization,
// implemented forward per start state (independent of the Dijkstra sweep in
// the domain).
double ucs_cost_to_goal(const GridNavModel& model, StateId start) {
  const GridMap& map = model.map();
  using Item = std::pair<double, StateId>;
  std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
  std::set<StateId> done;
  heap.emplace(0.0, start);
  while (!heap.empty()) {
    auto [d, s] = heap.top();
    heap.pop();
    if (done.count(s)) continue;
    done.insert(s);
    const Pose p = decode_pose(map, s);
    if (map.goal_cell(p.x, p.y)) return d;
    for (const auto& prim : model.primitives()) {
      if (!apply_primitive(map, p, prim)) continue;
      std::vector<WeightedState> row;
      model.enumerate_transitions(std::nullopt, s, static_cast<ActionId>(prim.id), row);
      for (const auto& [next, prob] : row) {
        if (!done.count(next)) heap.emplace(d + prim.cost, next);
      }
    }
  }
  return std::numeric_limits<double>::infinity();
}

}  // namespace

TEST_CASE("dist table matches the uniform-cost-search oracle") {
  const auto model = indoor_stochastic_model(kFixtures + "/indoor5_slip.map");
  const auto& nav = dynamic_cast<const GridNavModel&>(*model);
  const GridMap& map = nav.map();
  for (int y = 1; y < map.height - 1; ++y) {
    for (int x = 1; x < map.width - 1; ++x) {
      if (map.occupied(x, y)) continue;
      for (int theta = 0; theta < kHeadings; ++theta) {
        const StateId s = encode_pose(map, Pose{x, y, theta});
        CHECK(nav.dist_to_goal(s) == doctest::Approx(ucs_cost_to_goal(nav, s)).epsilon(1e-12));
      }
    }
  }
}

TEST_CASE("dist table on an empty map uses diagonal moves") {
  GridMap map = GridMap::parse("#####\n#S..#\n#...#\n#..G#\n#####");
  MapConfig cfg;
  IndoorStochasticModel model(std::move(map), cfg);
  const GridMap& m = model.map();
  for (int theta = 0; theta < kHeadings; ++theta) {
    const double d = model.dist_to_goal(encode_pose(m, Pose{1, 1, theta}));
    CHECK(d >= 2.0);        // two diagonal steps minimum
    CHECK(d <= 2.0 + 2.0);  // plus at most a half-turn of heading changes
  }
  CHECK(model.dist_to_goal(encode_pose(m, Pose{3, 3, 0})) == 0.0);
  CHECK(model.dist_to_goal(encode_pose(m, Pose{2, 3, 0})) == doctest::Approx(1.0));
}

TEST_CASE("dist heuristic is admissible against the exact belief oracle") {
  for (const char* fixture : {"/indoor5_slip.map", "/indoor10_slip.map"}) {
    const auto model = indoor_stochastic_model(kFixtures + fixture);
    const auto& nav = dynamic_cast<const GridNavModel&>(*model);
    const auto enumerated = enumerate_belief_mdp(*model);
    const auto oracle = value_iterate(enumerated);
    for (std::size_t i = 0; i < enumerated.size(); ++i) {
      double h = 0.0;
      for (const auto& [s, p] : enumerated.beliefs[i].particles) {
        h += p * nav.dist_to_goal(s);
      }
      CHECK(h <= oracle.values[i] + 1e-9);
    }
  }
}

TEST_CASE("unreachable goal region fails fixture construction") {
  CHECK_THROWS_AS(
      IndoorStochasticModel(GridMap::parse("#####\n#S#G#\n#.#.#\n#####"), MapConfig{}),
      FixtureError);
}

TEST_CASE("adjacent start and goal cost one primitive") {
  GridMap map = GridMap::parse("#####\n#SG.#\n#...#\n#...#\n#####");
  MapConfig cfg;  // start_theta = 0, facing the goal
  IndoorStochasticModel model(std::move(map), cfg);
  const auto oracle = value_iterate(enumerate_belief_mdp(model));
  CHECK(oracle.value_b0 == doctest::Approx(1.0));
}

TEST_CASE("slip on the only corridor matches enumerated value iteration") {
  GridMap map = GridMap::parse("#####\n#...#\n#S~G#\n#...#\n#####");
  MapConfig cfg;
  IndoorStochasticModel model(std::move(map), cfg);
  const auto oracle = value_iterate(enumerate_belief_mdp(model));
  const Heuristics h = default_heuristics(model);
  SolverConfig scfg;
  scfg.seed = 5;
  const auto res = rtdp_bel(model, h, scfg);
  REQUIRE(res.converged);
  CHECK(res.value_b0 == doctest::Approx(oracle.value_b0).epsilon(1e-9));
}

TEST_CASE("goal states emit the goal observation and only them") {
  const auto slip = indoor_stochastic_model(kFixtures + "/indoor5_slip.map");
  const auto outdoorm = outdoor_model(kFixtures + "/outdoor.map", NavMode::goal_directed);
  for (const GoalPomdpModel* model : {slip.get(), outdoorm.get()}) {
    const auto& nav = dynamic_cast<const GridNavModel&>(*model);
    const GridMap& map = nav.map();
    std::vector<WeightedObservation> obs;
    for (int y = 1; y < map.height - 1; ++y) {
      for (int x = 1; x < map.width - 1; ++x) {
        if (map.occupied(x, y)) continue;
        for (int theta = 0; theta < kHeadings; ++theta) {
          const StateId s = encode_pose(map, Pose{x, y, theta});
          model->enumerate_observations(std::nullopt, s, 0, obs);
          double total = 0.0;
          bool has_goal_obs = false;
          for (const auto& [z, p] : obs) {
            total += p;
            if (z == kGoalObservation) has_goal_obs = true;
          }
          CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
          CHECK(has_goal_obs == model->is_goal_state(s));
        }
      }
    }
  }
}

TEST_CASE("hypothesis partitions conserve the support") {
  const auto model =
      indoor_start_uncertainty_model(kFixtures + "/indoor5_start.map", NavMode::goal_directed);
  QueryLedger ledger;
  ModelView view(*model, ledger);
  const BeliefState b0 = model->initial_belief();
  for (ActionId a : model->applicable_actions(b0)) {
    const BeliefTransition tr = compute_belief_transition(b0, a, view);
    std::size_t total = 0;
    for (const auto& br : tr.branches) total += br.successor.support_size();
    CHECK(total == b0.support_size());
  }
}

TEST_CASE("two distinguishable hypotheses localize at the cheapest action cost") {
  // The two hypotheses see different east-wall distances immediately, so any
  // cheapest action (a 0.5-cost turn) disambiguates.
  GridMap map = GridMap::parse("######\n#S.S.#\n#....#\n######");
  MapConfig cfg;
  cfg.hypothesis_thetas = {0};
  IndoorStartUncertaintyModel model(std::move(map), cfg, NavMode::info_gathering);
  const auto oracle = value_iterate(enumerate_belief_mdp(model));
  CHECK(oracle.value_b0 == doctest::Approx(0.5));
  const Heuristics h = default_heuristics(model);
  SolverConfig scfg;
  scfg.seed = 2;
  const auto res = lao_star(model, h, scfg);
  REQUIRE(res.converged);
  CHECK(res.value_b0 == doctest::Approx(0.5));
}

TEST_CASE("single hypothesis is already a goal belief in info mode") {
  GridMap map = GridMap::parse("#####\n#S..#\n#...#\n#####");
  MapConfig cfg;
  cfg.hypothesis_thetas = {0};
  IndoorStartUncertaintyModel model(std::move(map), cfg, NavMode::info_gathering);
  CHECK(model.is_goal_belief(model.initial_belief()));
  const Heuristics h = default_heuristics(model);
  SolverConfig scfg;
  const auto res = rtdp_bel(model, h, scfg);
  CHECK(res.converged);
  CHECK(res.value_b0 == 0.0);
}

TEST_CASE("symmetric corridor keeps hypotheses merged until the junction") {
  // Hypotheses at mirrored poses share raycast signatures until the search
  // routes them toward the asymmetric junction; the solvers must match the
  // exact oracle on the committed fixture.
  GridMap map = GridMap::parse("#######\n#S...S#\n###.###\n#######");
  MapConfig cfg;
  cfg.hypothesis_thetas = {0, 4};
  IndoorStartUncertaintyModel model(std::move(map), cfg, NavMode::info_gathering);
  const BeliefState b0 = model.initial_belief();
  REQUIRE(b0.support_size() == 4);
  const auto oracle = value_iterate(enumerate_belief_mdp(model));
  const Heuristics h = default_heuristics(model);
  SolverConfig scfg;
  scfg.seed = 3;
  const auto res = lao_star(model, h, scfg);
  REQUIRE(res.converged);
  CHECK(res.value_b0 == doctest::Approx(oracle.value_b0).epsilon(1e-9));
}

TEST_CASE("outdoor landmarks far from every hypothesis are uninformative") {
  const auto model = outdoor_model(kFixtures + "/outdoor.map", NavMode::goal_directed);
  QueryLedger ledger;
  ModelView view(*model, ledger);
  const BeliefState b0 = model->initial_belief();
  // From the start block every hypothesis is out of landmark range, so the
  // first forward move produces a single uninformative branch.
  const BeliefTransition tr = compute_belief_transition(b0, 0, view);
  CHECK(tr.branches.size() == 1);
  CHECK(tr.branches[0].probability == doctest::Approx(1.0));
}

TEST_CASE("outdoor validity oracle is the conjunction over support poses") {
  const auto model = outdoor_model(kFixtures + "/outdoor.map", NavMode::goal_directed);
  const Heuristics h = default_heuristics(*model);
  BeliefMdp mdp(*model, h);
  const BeliefState b0 = model->initial_belief();
  const BeliefKey key = make_key(b0);
  const bool via_mdp = mdp.validate(b0, key, 0);
  bool via_states = true;
  for (const auto& [s, p] : b0.particles) {
    if (!model->state_action_valid(s, 0)) via_states = false;
  }
  CHECK(via_mdp == via_states);
  CHECK(mdp.ledger().validity_queries == b0.support_size());
  // Memoized: a repeat check costs nothing.
  mdp.validate(b0, key, 0);
  CHECK(mdp.ledger().validity_queries == b0.support_size());
}

TEST_CASE("contact sweep across a hypothesis row partitions three ways") {
  ContactWorld w;
  w.field_width = 6;
  w.field_height = 3;
  w.robot_x = 0;
  w.robot_y = 1;
  w.hypothesis_cells = {{2, 1}, {3, 1}, {4, 1}};
  w.sweeps = {{1, 0, 5}};
  ContactToyModel model(std::move(w));
  QueryLedger ledger;
  ModelView view(model, ledger);
  const BeliefState b0 = model.initial_belief();
  const BeliefTransition tr = compute_belief_transition(b0, 0, view);
  REQUIRE(tr.branches.size() == 3);  // one stop cell per hypothesised object
  for (const auto& br : tr.branches) {
    CHECK(br.probability == doctest::Approx(1.0 / 3));
    CHECK(br.successor.support_size() == 1);
    CHECK(br.observation % 2 == 1);  // contact bit set
    CHECK(br.successor_is_goal);
  }
}

TEST_CASE("contact sweep that misses every hypothesis is uninformative") {
  ContactWorld w;
  w.field_width = 6;
  w.field_height = 3;
  w.robot_x = 0;
  w.robot_y = 0;
  w.hypothesis_cells = {{2, 2}, {3, 2}, {4, 2}};
  w.sweeps = {{1, 0, 5}};  // sweeps along row 0, hypotheses in row 2
  ContactToyModel model(std::move(w));
  QueryLedger ledger;
  ModelView view(model, ledger);
  const BeliefState b0 = model.initial_belief();
  const BeliefTransition tr = compute_belief_transition(b0, 0, view);
  REQUIRE(tr.branches.size() == 1);
  CHECK(tr.branches[0].observation % 2 == 0);
  CHECK(tr.branches[0].successor.support_size() == 3);  // |H| unchanged
  // The robot moved: the observable component advanced to the sweep end.
  CHECK(tr.branches[0].successor.observable != b0.observable);
}

TEST_CASE("single-hypothesis contact world is immediately localized") {
  ContactWorld w;
  w.field_width = 4;
  w.field_height = 2;
  w.robot_x = 0;
  w.robot_y = 0;
  w.hypothesis_cells = {{2, 1}};
  w.sweeps = {{1, 0, 3}};
  ContactToyModel model(std::move(w));
  CHECK(model.is_goal_belief(model.initial_belief()));
}

TEST_CASE("line world matches its hand-derived oracle") {
  const auto model = line_world();
  const auto oracle = value_iterate(enumerate_belief_mdp(*model));
  CHECK(oracle.value_b0 == doctest::Approx(3.0).epsilon(1e-12));
  // The distance heuristic is admissible and exact at b0.
  const Heuristics h = default_heuristics(*model);
  CHECK(h.belief(model->initial_belief()) == doctest::Approx(3.0));
}

TEST_SUITE_END();
