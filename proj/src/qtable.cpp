#include "bsp/qtable.hpp"

#include <algorithm>

namespace bsp {

int BeliefRecord::argmin() const {
  int best = -1;
  for (std::size_t i = 0; i < entries.size(); ++i) {
    if (entries[i].invalid) continue;
    if (best < 0 || entries[i].q < entries[static_cast<std::size_t>(best)].q) {
      best = static_cast<int>(i);
    }
  }
  return best;
}

const QEntry* BeliefRecord::entry_for(ActionId a) const {
  for (const auto& e : entries) {
    if (e.action == a) return &e;
  }
  return nullptr;
}

QEntry* BeliefRecord::entry_for(ActionId a) {
  for (auto& e : entries) {
    if (e.action == a) return &e;
  }
  return nullptr;
}

BeliefRecord* QTable::find(const BeliefKey& key) {
  auto it = records_.find(key);
  return it == records_.end() ? nullptr : &it->second;
}

const BeliefRecord* QTable::find(const BeliefKey& key) const {
  auto it = records_.find(key);
  return it == records_.end() ? nullptr : &it->second;
}

BeliefRecord& QTable::ensure(const BeliefKey& key, const BeliefState& b,
                             const std::vector<ActionId>& actions) {
  auto it = records_.find(key);
  if (it != records_.end()) return it->second;
  BeliefRecord rec;
  rec.belief = b;
  rec.entries.reserve(actions.size());
  for (ActionId a : actions) {
    QEntry e;
    e.action = a;
    rec.entries.push_back(e);
  }
  return records_.emplace(key, std::move(rec)).first->second;
}

void QTable::remove_action(const BeliefKey& key, ActionId a) {
  auto it = records_.find(key);
  if (it == records_.end()) return;
  BeliefRecord& rec = it->second;
  std::erase_if(rec.entries, [a](const QEntry& e) { return e.action == a; });
  if (rec.entries.empty()) {
    throw NoValidPolicyError("belief exhausted all actions as invalid");
  }
  const int best = rec.argmin();
  if (best >= 0) rec.value = rec.entries[static_cast<std::size_t>(best)].q;
}

}  // namespace bsp
