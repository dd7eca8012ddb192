#include "bsp/domains/contact.hpp"

#include <algorithm>

namespace bsp {

ContactToyModel::ContactToyModel(ContactWorld world) : world_(std::move(world)) {
  if (world_.hypothesis_cells.empty()) throw FixtureError("contact world needs hypotheses");
  if (world_.sweeps.empty()) throw FixtureError("contact world needs sweep actions");
  for (const auto& [x, y] : world_.hypothesis_cells) {
    if (x < 0 || x >= world_.field_width || y < 0 || y >= world_.field_height) {
      throw FixtureError("hypothesis cell out of field bounds");
    }
    if (x == world_.robot_x && y == world_.robot_y) {
      throw FixtureError("robot cell cannot be a hypothesis cell");
    }
  }
}

BeliefState ContactToyModel::initial_belief() const {
  std::vector<std::pair<StateId, double>> raw;
  raw.reserve(world_.hypothesis_cells.size());
  for (const auto& [x, y] : world_.hypothesis_cells) raw.emplace_back(cell_id(x, y), 1.0);
  return canonicalize(std::move(raw), Observable{cell_id(world_.robot_x, world_.robot_y)});
}

SweepOutcome ContactToyModel::simulate_sweep(std::int64_t robot_cell, ActionId a,
                                             StateId object_cell) const {
  const SweepAction& sweep = world_.sweeps[static_cast<std::size_t>(a)];
  const int ox = static_cast<int>(object_cell % world_.field_width);
  const int oy = static_cast<int>(object_cell / world_.field_width);
  SweepOutcome out;
  out.stop_x = static_cast<int>(robot_cell % world_.field_width);
  out.stop_y = static_cast<int>(robot_cell / world_.field_width);
  for (int step = 0; step < sweep.length; ++step) {
    const int nx = out.stop_x + sweep.dx;
    const int ny = out.stop_y + sweep.dy;
    if (nx < 0 || nx >= world_.field_width || ny < 0 || ny >= world_.field_height) break;
    if (nx == ox && ny == oy) {
      out.contact = true;  // stop adjacent to the object
      break;
    }
    out.stop_x = nx;
    out.stop_y = ny;
    ++out.traveled;
  }
  return out;
}

void ContactToyModel::enumerate_transitions(const Observable&, StateId s, ActionId,
                                            std::vector<WeightedState>& out) const {
  out.clear();
  out.emplace_back(s, 1.0);  // the object never moves
}

void ContactToyModel::enumerate_observations(const Observable& ctx, StateId s, ActionId a,
                                             std::vector<WeightedObservation>& out) const {
  out.clear();
  if (!ctx.has_value()) throw DomainModelError("contact observation needs the robot cell");
  const SweepOutcome sim = simulate_sweep(*ctx, a, s);
  const ObservationId z = cell_id(sim.stop_x, sim.stop_y) * 2 + (sim.contact ? 1 : 0);
  out.emplace_back(z, 1.0);
}

Observable ContactToyModel::next_observable(const Observable&, ActionId, ObservationId z) const {
  return Observable{z / 2};
}

double ContactToyModel::cost(const Observable& ctx, StateId s, ActionId a) const {
  if (!ctx.has_value()) throw DomainModelError("contact cost needs the robot cell");
  // One engagement unit plus the cells traveled, so every sweep has
  // strictly positive cost.
  return 1.0 + static_cast<double>(simulate_sweep(*ctx, a, s).traveled);
}

std::unique_ptr<GoalPomdpModel> contact_toy_model(ContactWorld world) {
  return std::make_unique<ContactToyModel>(std::move(world));
}

ContactWorld default_contact_world() {
  ContactWorld w;
  w.field_width = 13;
  w.field_height = 12;
  w.robot_x = 0;
  w.robot_y = 5;
  for (int y = 1; y <= 10; ++y) {
    for (int x = 2; x <= 11; ++x) w.hypothesis_cells.emplace_back(x, y);
  }
  w.sweeps = {
      {1, 0, 12},   // east, full width
      {0, 1, 11},   // south
      {-1, 0, 12},  // west
      {0, -1, 11},  // north
      {1, 0, 6},    // short east probe
  };
  return w;
}

PlantedPartitionModel::PlantedPartitionModel(std::int64_t n,
                                             std::vector<std::vector<int>> group_of, double alpha)
    : n_(n), group_of_(std::move(group_of)), alpha_(alpha) {
  if (n_ < 1) throw FixtureError("planted partition needs at least one hypothesis");
  for (const auto& groups : group_of_) {
    if (static_cast<std::int64_t>(groups.size()) != n_) {
      throw FixtureError("planted partition row size must equal n");
    }
  }
}

BeliefState PlantedPartitionModel::initial_belief() const {
  std::vector<std::pair<StateId, double>> raw;
  raw.reserve(static_cast<std::size_t>(n_));
  for (StateId s = 0; s < n_; ++s) raw.emplace_back(s, 1.0);
  return canonicalize(std::move(raw));
}

void PlantedPartitionModel::enumerate_transitions(const Observable&, StateId s, ActionId,
                                                  std::vector<WeightedState>& out) const {
  out.clear();
  out.emplace_back(s, 1.0);
}

void PlantedPartitionModel::enumerate_observations(const Observable&, StateId s, ActionId a,
                                                   std::vector<WeightedObservation>& out) const {
  out.clear();
  out.emplace_back(group_of_[static_cast<std::size_t>(a)][static_cast<std::size_t>(s)], 1.0);
}

std::unique_ptr<PlantedPartitionModel> planted_partition_model(
    std::int64_t n, const std::vector<std::vector<std::int64_t>>& partitions, double alpha) {
  std::vector<std::vector<int>> group_of;
  for (const auto& sizes : partitions) {
    std::int64_t total = 0;
    for (std::int64_t s : sizes) total += s;
    if (total != n) throw FixtureError("planted partition sizes must sum to n");
    std::vector<int> row(static_cast<std::size_t>(n));
    std::int64_t idx = 0;
    for (std::size_t g = 0; g < sizes.size(); ++g) {
      for (std::int64_t i = 0; i < sizes[g]; ++i) row[static_cast<std::size_t>(idx++)] = static_cast<int>(g);
    }
    group_of.push_back(std::move(row));
  }
  return std::make_unique<PlantedPartitionModel>(n, std::move(group_of), alpha);
}

}  // namespace bsp
