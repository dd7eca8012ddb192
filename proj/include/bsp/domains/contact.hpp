#pragma once

#include <memory>

#include "bsp/model.hpp"

namespace bsp {

struct SweepAction {
  int dx = 0;  // unit direction
  int dy = 0;
  int length = 0;
};

/// Discrete contact-localization toy: the object occupies one unknown cell
/// of a 2-D field; the robot sweeps in straight lines and stops adjacent on
/// contact. Observation is (stop cell, contact bit); cost is one plus the
/// cells traveled.
struct ContactWorld {
  int field_width = 0;
  int field_height = 0;
  std::vector<std::pair<int, int>> hypothesis_cells;
  int robot_x = 0;
  int robot_y = 0;
  std::vector<SweepAction> sweeps;
};

struct SweepOutcome {
  int stop_x = 0;
  int stop_y = 0;
  bool contact = false;
  int traveled = 0;
};

class ContactToyModel final : public GoalPomdpModel {
 public:
  explicit ContactToyModel(ContactWorld world);

  int action_count() const override { return static_cast<int>(world_.sweeps.size()); }
  std::int64_t state_space_size() const override {
    return static_cast<std::int64_t>(world_.field_width) * world_.field_height;
  }
  BeliefState initial_belief() const override;

  bool is_goal_state(StateId) const override { return false; }
  bool is_goal_belief(const BeliefState& b) const override { return b.support_size() <= 1; }
  double belief_heuristic(const BeliefState& b) const override {
    return alpha_ * static_cast<double>(b.support_size());
  }

  void enumerate_transitions(const Observable&, StateId s, ActionId,
                             std::vector<WeightedState>& out) const override;
  void enumerate_observations(const Observable& ctx, StateId s, ActionId a,
                              std::vector<WeightedObservation>& out) const override;
  Observable next_observable(const Observable& ctx, ActionId a, ObservationId z) const override;
  double cost(const Observable& ctx, StateId s, ActionId a) const override;

  SweepOutcome simulate_sweep(std::int64_t robot_cell, ActionId a, StateId object_cell) const;

  StateId cell_id(int x, int y) const { return static_cast<StateId>(y) * world_.field_width + x; }

  void set_alpha(double alpha) { alpha_ = alpha; }

 private:
  ContactWorld world_;
  double alpha_ = 0.1;
};

std::unique_ptr<GoalPomdpModel> contact_toy_model(ContactWorld world);

/// The committed desk-scale contact world: a 10x10 hypothesis block with the
/// robot to its left and full-length sweeps in all four directions.
ContactWorld default_contact_world();

/// Synthetic information-gathering fixture with a planted observation
/// partition per action: unweighted hypotheses, identity transitions, unit
/// action cost and deterministic group observations. Used for estimator
/// statistics where the branch sizes must be controlled exactly.
class PlantedPartitionModel : public GoalPomdpModel {
 public:
  /// group_of[a][s] is the observation group of hypothesis s under action a.
  PlantedPartitionModel(std::int64_t n, std::vector<std::vector<int>> group_of, double alpha);

  int action_count() const override { return static_cast<int>(group_of_.size()); }
  std::int64_t state_space_size() const override { return n_; }
  BeliefState initial_belief() const override;

  bool is_goal_state(StateId) const override { return false; }
  bool is_goal_belief(const BeliefState& b) const override { return b.support_size() <= 1; }
  double belief_heuristic(const BeliefState& b) const override {
    return alpha_ * static_cast<double>(b.support_size());
  }

  void enumerate_transitions(const Observable&, StateId s, ActionId,
                             std::vector<WeightedState>& out) const override;
  void enumerate_observations(const Observable&, StateId s, ActionId a,
                              std::vector<WeightedObservation>& out) const override;
  double cost(const Observable&, StateId, ActionId) const override { return 1.0; }

 private:
  std::int64_t n_;
  std::vector<std::vector<int>> group_of_;
  double alpha_;
};

/// Builds the planted-partition fixture used by the estimator statistics
/// checks: n hypotheses, one action per partition in `partitions`, where
/// each partition lists its group sizes (summing to n).
std::unique_ptr<PlantedPartitionModel> planted_partition_model(
    std::int64_t n, const std::vector<std::vector<std::int64_t>>& partitions, double alpha = 0.1);

}  // namespace bsp
