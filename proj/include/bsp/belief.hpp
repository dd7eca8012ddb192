#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "bsp/types.hpp"

namespace bsp {

// Fully observable component of a belief (e.g. the robot cell in the
// contact domain). Domains without one leave it empty.
using Observable = std::optional<std::int64_t>;

/// Finite weighted particle distribution over state ids, optionally paired
/// with a fully observable component. Canonical form: particles strictly
/// increasing by state id, probabilities normalized to 1 and all above the
/// prune threshold.
struct BeliefState {
  std::vector<std::pair<StateId, double>> particles;
  Observable observable;

  std::size_t support_size() const { return particles.size(); }
  bool is_singleton() const { return particles.size() == 1; }
  double probability_of(StateId s) const;
  bool contains(StateId s) const { return probability_of(s) > 0.0; }
};

/// Identity key for a belief: the observable component plus the particle
/// sequence with probabilities quantized at kKeyResolution. Equal canonical
/// beliefs produce equal keys; beliefs differing in any probability by more
/// than the resolution produce distinct keys.
struct BeliefKey {
  Observable observable;
  std::vector<std::pair<StateId, std::int64_t>> entries;
  std::size_t hash = 0;

  friend bool operator==(const BeliefKey& a, const BeliefKey& b) {
    return a.hash == b.hash && a.observable == b.observable && a.entries == b.entries;
  }
  friend bool operator<(const BeliefKey& a, const BeliefKey& b);
};

struct BeliefKeyHash {
  std::size_t operator()(const BeliefKey& k) const { return k.hash; }
};

BeliefKey make_key(const BeliefState& b);

/// Canonicalize a raw weighted particle list: duplicates merged by
/// summation, weights normalized, entries below the prune threshold removed
/// and the rest renormalized, sorted by state id. Throws InvalidBeliefError
/// if the total weight is not positive or any weight is meaningfully
/// negative.
BeliefState canonicalize(std::vector<std::pair<StateId, double>> raw,
                         Observable observable = std::nullopt);

/// True when both beliefs share support and observable and every
/// probability agrees within tol.
bool beliefs_close(const BeliefState& a, const BeliefState& b, double tol);

}  // namespace bsp
