#include <doctest.h>

#include "bsp/belief.hpp"
#include "bsp/rng.hpp"

using namespace bsp;

TEST_SUITE_BEGIN("belief");

TEST_CASE("canonicalize reorders by state id") {
  const BeliefState b = canonicalize({{3, 0.5}, {1, 0.5}});
  REQUIRE(b.support_size() == 2);
  CHECK(b.particles[0].first == 1);
  CHECK(b.particles[0].second == doctest::Approx(0.5));
  CHECK(b.particles[1].first == 3);
  CHECK(b.particles[1].second == doctest::Approx(0.5));
}

TEST_CASE("canonicalize merges duplicates and normalizes") {
  const BeliefState b = canonicalize({{2, 2.0}, {2, 2.0}});
  REQUIRE(b.support_size() == 1);
  CHECK(b.particles[0].first == 2);
  CHECK(b.particles[0].second == doctest::Approx(1.0));
}

TEST_CASE("canonicalize prunes dust below the threshold") {
  const BeliefState b = canonicalize({{1, 1.0}, {2, 1e-15}});
  REQUIRE(b.support_size() == 1);
  CHECK(b.particles[0].first == 1);
  CHECK(b.particles[0].second == doctest::Approx(1.0));
}

TEST_CASE("canonicalize rejects non-positive total weight") {
  CHECK_THROWS_AS(canonicalize({{1, 0.0}, {2, 0.0}}), InvalidBeliefError);
  CHECK_THROWS_AS(canonicalize({{1, -1.0}}), InvalidBeliefError);
  CHECK_THROWS_AS(canonicalize({}), InvalidBeliefError);
}

TEST_CASE("canonical beliefs always sum to one") {
  Rng rng(7);
  for (int trial = 0; trial < 2000; ++trial) {
    std::vector<std::pair<StateId, double>> raw;
    const int n = 1 + static_cast<int>(rng.next_below(20));
    for (int i = 0; i < n; ++i) {
      raw.emplace_back(static_cast<StateId>(rng.next_below(12)), rng.next_double() + 1e-6);
    }
    const BeliefState b = canonicalize(std::move(raw));
    double total = 0.0;
    for (const auto& [s, p] : b.particles) {
      total += p;
      CHECK(p >= kPruneThreshold);
    }
    CHECK(total == doctest::Approx(1.0).epsilon(1e-9));
    for (std::size_t i = 1; i < b.particles.size(); ++i) {
      CHECK(b.particles[i - 1].first < b.particles[i].first);
    }
  }
}

TEST_CASE("equal canonical beliefs produce equal keys") {
  const BeliefState a = canonicalize({{1, 0.25}, {2, 0.75}});
  const BeliefState b = canonicalize({{2, 3.0}, {1, 1.0}});
  CHECK(make_key(a) == make_key(b));
  CHECK(make_key(a).hash == make_key(b).hash);
}

TEST_CASE("probability differences beyond the resolution change the key") {
  const BeliefState a = canonicalize({{1, 0.25}, {2, 0.75}});
  const BeliefState b = canonicalize({{1, 0.25 + 1e-6}, {2, 0.75 - 1e-6}});
  CHECK_FALSE(make_key(a) == make_key(b));
}

TEST_CASE("observable component distinguishes keys") {
  const BeliefState a = canonicalize({{1, 1.0}}, Observable{5});
  const BeliefState b = canonicalize({{1, 1.0}}, Observable{6});
  const BeliefState c = canonicalize({{1, 1.0}});
  CHECK_FALSE(make_key(a) == make_key(b));
  CHECK_FALSE(make_key(a) == make_key(c));
  CHECK(make_key(a) < make_key(b));
  CHECK(make_key(c) < make_key(a));  // empty observable orders first
}

TEST_CASE("key ordering is a strict weak order on random beliefs") {
  Rng rng(11);
  std::vector<BeliefKey> keys;
  for (int i = 0; i < 50; ++i) {
    std::vector<std::pair<StateId, double>> raw;
    const int n = 1 + static_cast<int>(rng.next_below(6));
    for (int j = 0; j < n; ++j) {
      raw.emplace_back(static_cast<StateId>(rng.next_below(9)), rng.next_double() + 0.01);
    }
    keys.push_back(make_key(canonicalize(std::move(raw))));
  }
  for (const auto& a : keys) {
    CHECK_FALSE(a < a);
    for (const auto& b : keys) {
      if (a == b) continue;
      CHECK((a < b) != (b < a));
    }
  }
}

TEST_SUITE_END();
