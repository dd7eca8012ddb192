#pragma once

#include <limits>
#include <unordered_map>
#include <vector>

#include "bsp/belief_mdp.hpp"

namespace bsp {

enum class QSource { heuristic_lookahead, estimator, backup };

struct QEntry {
  ActionId action = 0;
  double q = std::numeric_limits<double>::infinity();
  bool evaluated = false;  // belief transition computed for this action
  bool invalid = false;    // eager-validation verdict; excluded from argmin
  QSource source = QSource::heuristic_lookahead;
};

struct BeliefRecord {
  BeliefState belief;
  double value = 0.0;
  std::vector<QEntry> entries;  // one per applicable action, ascending action id
  bool initialized = false;     // Q values assigned (lookahead or estimator)
  bool expanded = false;        // processed as an expansion at least once

  /// Index into entries of the lowest-q non-invalid entry; ties broken by
  /// lowest action id (entries are stored in ascending action order).
  /// Returns -1 when every entry is invalid.
  int argmin() const;
  const QEntry* entry_for(ActionId a) const;
  QEntry* entry_for(ActionId a);
};

/// Per-belief value and Q records, keyed by belief identity. Uninitialized
/// beliefs are absent from the map.
class QTable {
 public:
  BeliefRecord* find(const BeliefKey& key);
  const BeliefRecord* find(const BeliefKey& key) const;

  /// Find or create the record for key, populating the entry list from the
  /// given applicable-action set on creation.
  BeliefRecord& ensure(const BeliefKey& key, const BeliefState& b,
                       const std::vector<ActionId>& actions);

  /// Remove one action from a record (full-horizon blacklisting) and keep
  /// value = min over remaining entries. Throws NoValidPolicyError when the
  /// record runs out of actions.
  void remove_action(const BeliefKey& key, ActionId a);

  std::size_t size() const { return records_.size(); }
  void clear() { records_.clear(); }

  auto begin() const { return records_.begin(); }
  auto end() const { return records_.end(); }

 private:
  std::unordered_map<BeliefKey, BeliefRecord, BeliefKeyHash> records_;
};

struct PolicyEdge {
  ObservationId observation;
  double probability;
  BeliefKey successor;
  bool terminal = false;  // successor is a goal belief
};

struct PolicyNode {
  BeliefState belief;
  ActionId action = 0;
  double action_cost = 0.0;
  std::vector<PolicyEdge> edges;
};

/// Greedy policy closure from the root: every non-goal node carries its
/// chosen (evaluated) action and the branch list of its belief transition.
struct PolicyGraph {
  BeliefKey root;
  bool root_is_goal = false;
  std::unordered_map<BeliefKey, PolicyNode, BeliefKeyHash> nodes;
  std::vector<BeliefKey> order;  // deterministic BFS order from the root

  std::size_t size() const { return nodes.size(); }
  bool empty() const { return nodes.empty(); }
};

}  // namespace bsp
