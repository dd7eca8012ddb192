#pragma once

#include <memory>

#include "bsp/domains/grid_map.hpp"
#include "bsp/model.hpp"

namespace bsp {

enum class NavMode { goal_directed, info_gathering };
enum class NavHeuristic { dist_optimistic, euclidean };

/// Shared machinery for the grid navigation domains: pose states, motion
/// primitives, raycast observations and the optimistic-determinization
/// cost-to-go table used as the admissible Dist heuristic.
class GridNavModel : public GoalPomdpModel {
 public:
  int action_count() const override { return static_cast<int>(primitives_.size()); }
  std::int64_t state_space_size() const override {
    return static_cast<std::int64_t>(map_.width) * map_.height * kHeadings;
  }
  bool is_goal_state(StateId s) const override;
  double cost(const Observable&, StateId s, ActionId a) const override;
  bool state_action_applicable(const Observable&, StateId s, ActionId a) const override;
  double state_heuristic(StateId s) const override;

  const GridMap& map() const { return map_; }
  const std::vector<MotionPrimitive>& primitives() const { return primitives_; }
  const LidarSpec& lidar() const { return lidar_; }

  /// Optimistic-determinization cost-to-go (treats every stochastic outcome
  /// as a choosable edge). Infinite for states that cannot reach G.
  double dist_to_goal(StateId s) const { return dist_table_[static_cast<std::size_t>(s)]; }

 protected:
  GridNavModel(GridMap map, std::vector<MotionPrimitive> primitives, LidarSpec lidar,
               NavMode mode, NavHeuristic heuristic, double alpha);

  // Stochastic outcome set of one primitive; deterministic domains get the
  // single intended outcome.
  virtual void outcomes(const Pose& from, const MotionPrimitive& prim,
                        std::vector<std::pair<Pose, double>>& out) const;

  void build_dist_table();

  GridMap map_;
  std::vector<MotionPrimitive> primitives_;
  LidarSpec lidar_;
  NavMode mode_;
  NavHeuristic heuristic_;
  double alpha_;
  std::vector<double> dist_table_;
};

/// Indoor navigation with stochastic slip regions: the robot reaches the
/// intended end state with probability 0.5 and slips laterally with
/// probability 0.25 each when starting from a slip cell. Known start,
/// weighted-particle beliefs, raycast observations.
class IndoorStochasticModel final : public GridNavModel {
 public:
  IndoorStochasticModel(GridMap map, const MapConfig& cfg,
                        NavHeuristic heuristic = NavHeuristic::dist_optimistic);

  BeliefState initial_belief() const override;
  void enumerate_transitions(const Observable&, StateId s, ActionId a,
                             std::vector<WeightedState>& out) const override;
  void enumerate_observations(const Observable&, StateId s, ActionId a,
                              std::vector<WeightedObservation>& out) const override;

 protected:
  void outcomes(const Pose& from, const MotionPrimitive& prim,
                std::vector<std::pair<Pose, double>>& out) const override;

 private:
  Pose start_;
};

/// Indoor navigation with start-state uncertainty: equally likely hypothesis
/// poses, deterministic transitions, raycast observations partitioning the
/// hypotheses. Goal-directed or information-gathering (localize, |H| = 1).
class IndoorStartUncertaintyModel final : public GridNavModel {
 public:
  IndoorStartUncertaintyModel(GridMap map, const MapConfig& cfg, NavMode mode,
                              NavHeuristic heuristic = NavHeuristic::dist_optimistic);

  BeliefState initial_belief() const override;
  bool is_goal_state(StateId s) const override;
  bool is_goal_belief(const BeliefState& b) const override;
  double belief_heuristic(const BeliefState& b) const override;
  void enumerate_transitions(const Observable&, StateId s, ActionId a,
                             std::vector<WeightedState>& out) const override;
  void enumerate_observations(const Observable&, StateId s, ActionId a,
                              std::vector<WeightedObservation>& out) const override;

 private:
  std::vector<Pose> hypotheses_;
};

std::unique_ptr<GoalPomdpModel> indoor_stochastic_model(
    const std::string& map_path, NavHeuristic heuristic = NavHeuristic::dist_optimistic);
std::unique_ptr<GoalPomdpModel> indoor_start_uncertainty_model(
    const std::string& map_path, NavMode mode,
    NavHeuristic heuristic = NavHeuristic::dist_optimistic);

}  // namespace bsp
