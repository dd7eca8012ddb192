#include "bsp/oracle.hpp"

#include <cmath>
#include <deque>
#include <limits>

namespace bsp {

EnumeratedBeliefMdp enumerate_belief_mdp(const GoalPomdpModel& model, std::int64_t max_beliefs) {
  EnumeratedBeliefMdp out;
  QueryLedger ledger;  // throwaway; the oracle is not part of any solve
  ModelView view(model, ledger);

  const BeliefState b0 = model.initial_belief();
  if (model.is_goal_belief(b0)) return out;

  std::deque<std::int64_t> queue;
  out.beliefs.push_back(b0);
  out.index.emplace(make_key(b0), 0);
  queue.push_back(0);

  while (!queue.empty()) {
    const std::int64_t i = queue.front();
    queue.pop_front();
    const BeliefState b = out.beliefs[static_cast<std::size_t>(i)];
    const BeliefKey key = make_key(b);

    std::vector<EnumeratedBeliefMdp::ActionEntry> entries;
    for (ActionId a : model.applicable_actions(b)) {
      const BeliefTransition tr = compute_belief_transition(b, a, view);
      EnumeratedBeliefMdp::ActionEntry entry;
      entry.action = a;
      entry.expected_cost = tr.expected_cost;
      for (const auto& br : tr.branches) {
        EnumeratedBeliefMdp::Branch branch;
        branch.probability = br.probability;
        if (br.successor_is_goal) {
          branch.successor = -1;
        } else {
          auto it = out.index.find(br.successor_key);
          if (it == out.index.end()) {
            if (static_cast<std::int64_t>(out.beliefs.size()) >= max_beliefs) {
              throw FixtureError("reachable belief space exceeds the enumeration cap");
            }
            const auto fresh = static_cast<std::int64_t>(out.beliefs.size());
            out.beliefs.push_back(br.successor);
            out.index.emplace(br.successor_key, fresh);
            queue.push_back(fresh);
            branch.successor = fresh;
          } else {
            branch.successor = it->second;
          }
        }
        entry.branches.push_back(branch);
      }
      entries.push_back(std::move(entry));
    }
    if (static_cast<std::size_t>(i) >= out.actions.size()) {
      out.actions.resize(static_cast<std::size_t>(i) + 1);
    }
    out.actions[static_cast<std::size_t>(i)] = std::move(entries);
  }
  out.actions.resize(out.beliefs.size());
  return out;
}

OracleSolution value_iterate(const EnumeratedBeliefMdp& mdp) {
  OracleSolution sol;
  const std::size_t n = mdp.size();
  sol.values.assign(n, 0.0);
  sol.q_values.resize(n);
  if (n == 0) return sol;

  constexpr double kTol = 1e-13;
  constexpr std::int64_t kMaxSweeps = 10000000;
  for (std::int64_t sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double resid = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (const auto& entry : mdp.actions[i]) {
        double q = entry.expected_cost;
        for (const auto& br : entry.branches) {
          if (br.successor >= 0) q += br.probability * sol.values[static_cast<std::size_t>(br.successor)];
        }
        best = std::min(best, q);
      }
      if (mdp.actions[i].empty()) best = std::numeric_limits<double>::infinity();
      resid = std::max(resid, std::abs(best - sol.values[i]));
      sol.values[i] = best;
    }
    if (resid <= kTol) break;
  }

  for (std::size_t i = 0; i < n; ++i) {
    sol.q_values[i].resize(mdp.actions[i].size());
    for (std::size_t j = 0; j < mdp.actions[i].size(); ++j) {
      const auto& entry = mdp.actions[i][j];
      double q = entry.expected_cost;
      for (const auto& br : entry.branches) {
        if (br.successor >= 0) q += br.probability * sol.values[static_cast<std::size_t>(br.successor)];
      }
      sol.q_values[i][j] = q;
    }
  }
  sol.value_b0 = sol.values[0];
  return sol;
}

}  // namespace bsp
