#include "bsp/belief_mdp.hpp"

#include <algorithm>

namespace bsp {

Heuristics default_heuristics(const GoalPomdpModel& model) {
  Heuristics h;
  h.belief = [&model](const BeliefState& b) {
    return model.is_goal_belief(b) ? 0.0 : model.belief_heuristic(b);
  };
  h.state = [&model](StateId s) { return model.state_heuristic(s); };
  return h;
}

BeliefMdp::BeliefMdp(const GoalPomdpModel& model, Heuristics heuristics, BeliefMdpOptions options)
    : model_(model),
      heuristics_(std::move(heuristics)),
      options_(options),
      view_(model_, ledger_, options.query_delay_us) {}

std::vector<ActionId> BeliefMdp::applicable(const BeliefState& b, const BeliefKey& key) const {
  std::vector<ActionId> actions = model_.applicable_actions(b);
  auto it = blacklist_.find(key);
  if (it == blacklist_.end()) return actions;
  std::erase_if(actions, [&](ActionId a) { return it->second.count(a) > 0; });
  return actions;
}

const BeliefTransition& BeliefMdp::transition(const BeliefState& b, const BeliefKey& key,
                                              ActionId a) {
  ActionSlot& slot = cache_[key];
  if (slot.by_action.empty()) {
    slot.by_action.resize(static_cast<std::size_t>(model_.action_count()));
  }
  auto& entry = slot.by_action.at(static_cast<std::size_t>(a));
  if (!entry) {
    entry = std::make_unique<BeliefTransition>(compute_belief_transition(b, a, view_));
    ++ledger_.belief_transitions_computed;
  }
  return *entry;
}

const BeliefTransition* BeliefMdp::cached_transition(const BeliefKey& key, ActionId a) const {
  auto it = cache_.find(key);
  if (it == cache_.end() || it->second.by_action.empty()) return nullptr;
  return it->second.by_action.at(static_cast<std::size_t>(a)).get();
}

void BeliefMdp::drop_cached_transition(const BeliefKey& key, ActionId a) {
  auto it = cache_.find(key);
  if (it == cache_.end() || it->second.by_action.empty()) return;
  it->second.by_action.at(static_cast<std::size_t>(a)).reset();
}

std::size_t BeliefMdp::cache_size() const {
  std::size_t n = 0;
  for (const auto& [key, slot] : cache_) {
    for (const auto& entry : slot.by_action) {
      if (entry) ++n;
    }
  }
  return n;
}

void BeliefMdp::clear_transition_cache() { cache_.clear(); }

bool BeliefMdp::validate(const BeliefState& b, const BeliefKey& key, ActionId a) {
  auto& memo = validity_memo_[key];
  auto it = memo.find(a);
  if (it != memo.end()) return it->second;
  bool valid = true;
  for (const auto& [s, p] : b.particles) {
    // Count one validity query per support particle; no short-circuit.
    if (!view_.validity(s, a)) valid = false;
  }
  memo[a] = valid;
  return valid;
}

void BeliefMdp::blacklist(const BeliefKey& key, ActionId a) {
  blacklist_[key].insert(a);
  drop_cached_transition(key, a);
}

bool BeliefMdp::is_blacklisted(const BeliefKey& key, ActionId a) const {
  auto it = blacklist_.find(key);
  return it != blacklist_.end() && it->second.count(a) > 0;
}

}  // namespace bsp
