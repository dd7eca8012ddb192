#pragma once

#include <map>
#include <vector>

#include "bsp/model.hpp"
#include "bsp/rng.hpp"

namespace bsp::testing {

/// Seeded dense random Goal-POMDP over a handful of states; exercises the
/// weighted multi-outcome paths the benchmark domains do not reach.
class RandomDiscreteModel : public GoalPomdpModel {
 public:
  RandomDiscreteModel(std::uint64_t seed, int states = 6, int actions = 3, int observations = 4)
      : states_(states), actions_(actions) {
    Rng rng(seed);
    goal_ = static_cast<StateId>(states_ - 1);
    transition_.resize(static_cast<std::size_t>(states_ * actions_));
    observation_.resize(static_cast<std::size_t>(states_ * actions_));
    cost_.resize(static_cast<std::size_t>(states_ * actions_));
    for (int s = 0; s < states_; ++s) {
      for (int a = 0; a < actions_; ++a) {
        const auto idx = static_cast<std::size_t>(s * actions_ + a);
        cost_[idx] = s == goal_ ? 0.0 : 0.5 + rng.next_double();
        auto& row = transition_[idx];
        if (s == goal_) {
          row = {{goal_, 1.0}};
        } else {
          const int outcomes = 1 + static_cast<int>(rng.next_below(3));
          std::map<StateId, double> mass;
          for (int i = 0; i < outcomes; ++i) {
            mass[static_cast<StateId>(rng.next_below(static_cast<std::uint64_t>(states_)))] +=
                0.2 + rng.next_double();
          }
          double total = 0.0;
          for (auto& [t, w] : mass) total += w;
          for (auto& [t, w] : mass) row.emplace_back(t, w / total);
        }
        auto& obs = observation_[idx];
        if (s == goal_) {
          obs = {{kGoalObservation, 1.0}};
        } else {
          const int kinds = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(observations)));
          std::map<ObservationId, double> mass;
          for (int i = 0; i < kinds; ++i) {
            mass[static_cast<ObservationId>(rng.next_below(static_cast<std::uint64_t>(observations)))] +=
                0.2 + rng.next_double();
          }
          double total = 0.0;
          for (auto& [z, w] : mass) total += w;
          for (auto& [z, w] : mass) obs.emplace_back(z, w / total);
        }
      }
    }
  }

  int action_count() const override { return actions_; }
  std::int64_t state_space_size() const override { return states_; }
  BeliefState initial_belief() const override {
    std::vector<std::pair<StateId, double>> raw;
    for (int s = 0; s < states_ - 1; ++s) raw.emplace_back(s, 1.0);
    return canonicalize(std::move(raw));
  }
  bool is_goal_state(StateId s) const override { return s == goal_; }
  void enumerate_transitions(const Observable&, StateId s, ActionId a,
                             std::vector<WeightedState>& out) const override {
    out = transition_[static_cast<std::size_t>(s * actions_ + a)];
  }
  void enumerate_observations(const Observable&, StateId s, ActionId a,
                              std::vector<WeightedObservation>& out) const override {
    out = observation_[static_cast<std::size_t>(s * actions_ + a)];
  }
  double cost(const Observable&, StateId s, ActionId a) const override {
    return cost_[static_cast<std::size_t>(s * actions_ + a)];
  }
  double state_heuristic(StateId) const override { return 0.0; }

 private:
  int states_;
  int actions_;
  StateId goal_;
  std::vector<std::vector<WeightedState>> transition_;
  std::vector<std::vector<WeightedObservation>> observation_;
  std::vector<double> cost_;
};

}  // namespace bsp::testing
