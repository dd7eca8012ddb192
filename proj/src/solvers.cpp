#include "bsp/solvers.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>
#include <unordered_set>

#include <Eigen/Dense>

namespace bsp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

constexpr double kInf = std::numeric_limits<double>::infinity();

// Shared machinery for the four planners. One engine instance is a single
// solve; full-horizon laziness re-runs the same engine so the query ledger,
// transition cache, QTable and rng stream persist across outer iterations.
class SolverEngine {
 public:
  SolverEngine(SolverKind kind, const GoalPomdpModel& model, const Heuristics& h,
               QEstimator* estimator, const SolverConfig& cfg)
      : kind_(kind),
        model_(model),
        heuristics_(h),
        estimator_(estimator),
        cfg_(cfg),
        mdp_(model, h, BeliefMdpOptions{cfg.query_delay_us, cfg.eager_validation}),
        rng_(cfg.seed),
        start_(Clock::now()) {
    if (solver_is_lazy(kind_) && estimator_ == nullptr) {
      throw ConfigError("lazy solver requires an estimator");
    }
    b0_ = model.initial_belief();
    b0_key_ = make_key(b0_);
  }

  BeliefMdp& mdp() { return mdp_; }
  QTable& qtable() { return qtable_; }

  void reset_tables() {
    qtable_.clear();
    mdp_.clear_transition_cache();
  }

  SolverResult run() {
    converged_ = false;
    if (mdp_.is_goal(b0_)) {
      converged_ = true;
      return finalize();
    }
    switch (kind_) {
      case SolverKind::rtdp_bel:
      case SolverKind::lazy_rtdp_bel:
        run_rtdp();
        break;
      case SolverKind::lao_star:
      case SolverKind::lazy_lao_star:
        run_lao();
        break;
    }
    return finalize();
  }

  SolverResult finalize() {
    SolverResult res;
    res.converged = converged_;
    if (mdp_.is_goal(b0_)) {
      res.value_b0 = 0.0;
      res.policy.root = b0_key_;
      res.policy.root_is_goal = true;
    } else {
      const BeliefRecord* rec = qtable_.find(b0_key_);
      res.value_b0 = rec ? rec->value : cfg_.heuristic_inflation * mdp_.belief_heur(b0_);
      if (converged_) res.policy = extract_policy(qtable_, b0_, mdp_);
    }
    res.ledger = mdp_.ledger();
    res.trials = trials_;
    res.expansions = expansions_;
    res.wall_time_seconds = seconds_since(start_);
    res.monotone_violations = monotone_violations_;
    res.evaluation_log = evaluation_log_;
    return res;
  }

 private:
  bool lazy() const { return solver_is_lazy(kind_); }
  bool timed_out() const { return seconds_since(start_) > cfg_.timeout_seconds; }

  double successor_value(const ObservationBranch& br) const {
    if (br.successor_is_goal) return 0.0;
    const BeliefRecord* rec = qtable_.find(br.successor_key);
    if (rec) return rec->value;
    // Uninitialized: heuristic, inflated at initialization only.
    return cfg_.heuristic_inflation * mdp_.belief_heur(br.successor);
  }

  double q_backup(const BeliefTransition& tr) const {
    double q = tr.expected_cost;
    for (const auto& br : tr.branches) q += br.probability * successor_value(br);
    return q;
  }

  BeliefRecord& ensure_record(const BeliefState& b, const BeliefKey& key) {
    BeliefRecord* existing = qtable_.find(key);
    if (existing) return *existing;
    BeliefRecord& rec = qtable_.ensure(key, b, mdp_.applicable(b, key));
    rec.value = rec.entries.empty() ? kInf : cfg_.heuristic_inflation * mdp_.belief_heur(b);
    return rec;
  }

  void write_value(BeliefRecord& rec, double v) {
    if (cfg_.check_monotone_backups && v < rec.value - 1e-9) ++monotone_violations_;
    rec.value = v;
  }

  // Recompute Q for every evaluated (and valid) action from its cached
  // transition; unevaluated entries keep their initialization values.
  void update_q_values(BeliefRecord& rec, const BeliefKey& key) {
    for (auto& e : rec.entries) {
      if (!e.evaluated || e.invalid) continue;
      const BeliefTransition* tr = mdp_.cached_transition(key, e.action);
      e.q = q_backup(*tr);
      if (e.source != QSource::heuristic_lookahead || rec.initialized) {
        e.source = QSource::backup;
      }
    }
  }

  // Compute the belief transition for one action (the expensive step). With
  // eager validation the action is first checked against the validity
  // oracle and marked invalid instead of evaluated when it fails.
  void evaluate_entry(BeliefRecord& rec, const BeliefKey& key, QEntry& e) {
    if (e.evaluated || e.invalid) return;
    if (cfg_.eager_validation && model_.has_validity_oracle() &&
        !mdp_.validate(rec.belief, key, e.action)) {
      e.invalid = true;
      e.q = kInf;
      return;
    }
    if (lazy() && cfg_.record_evaluation_log) {
      EvaluationLogEntry log;
      log.key = key;
      log.action = e.action;
      for (const auto& other : rec.entries) {
        log.actions.push_back(other.action);
        log.q_at_selection.push_back(other.q);
      }
      evaluation_log_.push_back(std::move(log));
    }
    mdp_.transition(rec.belief, key, e.action);
    e.evaluated = true;
  }

  // First-touch Q initialization for lazy solvers. With a single applicable
  // action there is nothing to defer: the estimator is skipped so the solve
  // matches the vanilla planner query for query.
  void initialize_lazy(BeliefRecord& rec, const BeliefKey& key) {
    if (rec.initialized) return;
    if (rec.entries.size() > 1) {
      for (auto& e : rec.entries) {
        e.q = cfg_.heuristic_inflation *
              estimator_->estimate(rec.belief, key, e.action, mdp_.view());
        e.source = QSource::estimator;
        e.evaluated = false;
      }
    }
    rec.initialized = true;
  }

  // Alg. 3/4 inner loop: select the argmin action, evaluate it if
  // unevaluated, recompute Q values, repeat until the argmin is stable
  // under its own update. Returns the entry index, or -1 on a dead end.
  int argmin_evaluate_loop(BeliefRecord& rec, const BeliefKey& key) {
    for (;;) {
      const int i = rec.argmin();
      if (i < 0) {
        write_value(rec, kInf);
        return -1;
      }
      QEntry& e = rec.entries[static_cast<std::size_t>(i)];
      if (!e.evaluated) {
        evaluate_entry(rec, key, e);
        if (e.invalid) continue;
      }
      update_q_values(rec, key);
      if (rec.argmin() == i) return i;
    }
  }

  // Vanilla expansion: evaluate every action, then one-step lookahead.
  int evaluate_all(BeliefRecord& rec, const BeliefKey& key) {
    for (auto& e : rec.entries) evaluate_entry(rec, key, e);
    update_q_values(rec, key);
    rec.initialized = true;
    return rec.argmin();
  }

  // ---- RTDP-Bel ----

  void run_rtdp() {
    const std::int64_t step_cap =
        cfg_.trial_step_cap > 0 ? cfg_.trial_step_cap : 10 * model_.state_space_size();
    while (trials_ < cfg_.max_trials && !timed_out()) {
      run_trial(step_cap);
      ++trials_;
      if (trials_ % cfg_.convergence_window == 0 && policy_converged()) {
        converged_ = true;
        return;
      }
    }
    if (!converged_) converged_ = policy_converged();
  }

  void run_trial(std::int64_t step_cap) {
    BeliefState b = b0_;
    BeliefKey key = b0_key_;
    StateId s = sample_particle(b);
    std::int64_t steps = 0;
    std::vector<WeightedState> trow;
    std::vector<WeightedObservation> orow;

    while (!mdp_.is_goal(b)) {
      if (++steps > step_cap || timed_out()) return;
      BeliefRecord& rec = ensure_record(b, key);
      if (rec.entries.empty()) return;  // dead end

      int i;
      if (lazy()) {
        initialize_lazy(rec, key);
        i = argmin_evaluate_loop(rec, key);
      } else {
        i = evaluate_all(rec, key);
      }
      if (i < 0) return;
      QEntry& e = rec.entries[static_cast<std::size_t>(i)];
      write_value(rec, e.q);
      rec.expanded = true;

      const BeliefTransition* tr = mdp_.cached_transition(key, e.action);

      // Descend: sample s' ~ T(s, a, .), z ~ O(s', a, .), move to b_a^z.
      mdp_.view().transitions(b.observable, s, e.action, trow);
      std::vector<double> w(trow.size());
      for (std::size_t j = 0; j < trow.size(); ++j) w[j] = trow[j].second;
      const StateId s_next = trow[rng_.weighted_index(w)].first;

      mdp_.view().observations(b.observable, s_next, e.action, orow);
      w.resize(orow.size());
      for (std::size_t j = 0; j < orow.size(); ++j) w[j] = orow[j].second;
      const ObservationId z = orow[rng_.weighted_index(w)].first;

      const ObservationBranch* branch = nullptr;
      for (const auto& br : tr->branches) {
        if (br.observation == z) {
          branch = &br;
          break;
        }
      }
      if (!branch) {
        throw DomainModelError("sampled observation has no corresponding belief branch");
      }
      b = branch->successor;
      key = branch->successor_key;
      s = s_next;
    }
  }

  StateId sample_particle(const BeliefState& b) {
    std::vector<double> w(b.particles.size());
    for (std::size_t i = 0; i < b.particles.size(); ++i) w[i] = b.particles[i].second;
    return b.particles[rng_.weighted_index(w)].first;
  }

  // Convergence surrogate: the greedy policy from b0 is closed and the max
  // Bellman residual over policy-reachable beliefs is within tolerance.
  // Read-only; uses cached transitions exclusively.
  bool policy_converged() {
    std::deque<BeliefKey> queue{b0_key_};
    std::unordered_set<BeliefKey, BeliefKeyHash> visited{b0_key_};
    double max_resid = 0.0;
    while (!queue.empty()) {
      const BeliefKey key = queue.front();
      queue.pop_front();
      const BeliefRecord* rec = qtable_.find(key);
      if (!rec || !rec->initialized) return false;

      // Refresh Q values into temporaries and take the greedy action.
      int best = -1;
      double best_q = kInf;
      bool best_evaluated = false;
      for (const auto& e : rec->entries) {
        if (e.invalid) continue;
        double q = e.q;
        if (e.evaluated) {
          const BeliefTransition* tr = mdp_.cached_transition(key, e.action);
          q = q_backup(*tr);
        }
        if (best < 0 || q < best_q) {
          best = static_cast<int>(&e - rec->entries.data());
          best_q = q;
          best_evaluated = e.evaluated;
        }
      }
      if (best < 0 || !best_evaluated) return false;
      max_resid = std::max(max_resid, std::abs(best_q - rec->value));
      if (max_resid > cfg_.residual_tolerance) return false;

      const BeliefTransition* tr =
          mdp_.cached_transition(key, rec->entries[static_cast<std::size_t>(best)].action);
      for (const auto& br : tr->branches) {
        if (br.successor_is_goal) continue;
        if (visited.insert(br.successor_key).second) queue.push_back(br.successor_key);
      }
    }
    return true;
  }

  // ---- LAO* ----

  struct Derivation {
    std::vector<BeliefKey> interior;  // BFS order from the root
    std::unordered_map<BeliefKey, int, BeliefKeyHash> depth;
    std::unordered_map<BeliefKey, std::vector<BeliefKey>, BeliefKeyHash> parents;
    std::vector<std::pair<BeliefKey, BeliefState>> tips;
  };

  bool is_interior(const BeliefRecord* rec) const {
    if (!rec) return false;
    if (kind_ == SolverKind::lao_star) {
      if (!rec->expanded) return false;
    } else {
      if (!rec->initialized) return false;
    }
    const int i = rec->argmin();
    return i >= 0 && rec->entries[static_cast<std::size_t>(i)].evaluated;
  }

  bool is_dead(const BeliefRecord* rec) const {
    return rec && rec->initialized && (rec->entries.empty() || rec->argmin() < 0);
  }

  // Current best partial solution graph: beliefs reachable from b0 under
  // the argmin actions. Frontier nodes needing expansion become tips; for
  // the lazy variant that includes initialized beliefs whose best action is
  // unevaluated.
  Derivation derive() {
    Derivation d;
    std::deque<std::pair<BeliefKey, BeliefState>> queue;
    std::unordered_set<BeliefKey, BeliefKeyHash> visited;
    queue.emplace_back(b0_key_, b0_);
    visited.insert(b0_key_);
    d.depth[b0_key_] = 0;
    while (!queue.empty()) {
      auto [key, belief] = std::move(queue.front());
      queue.pop_front();
      const BeliefRecord* rec = qtable_.find(key);
      if (!is_interior(rec)) {
        if (!is_dead(rec)) d.tips.emplace_back(key, std::move(belief));
        continue;
      }
      d.interior.push_back(key);
      const int i = rec->argmin();
      const BeliefTransition* tr =
          mdp_.cached_transition(key, rec->entries[static_cast<std::size_t>(i)].action);
      for (const auto& br : tr->branches) {
        if (br.successor_is_goal) continue;
        d.parents[br.successor_key].push_back(key);
        if (visited.insert(br.successor_key).second) {
          d.depth[br.successor_key] = d.depth[key] + 1;
          queue.emplace_back(br.successor_key, br.successor);
        }
      }
    }
    return d;
  }

  void run_lao() {
    while (expansions_ < cfg_.max_expansions && !timed_out()) {
      Derivation d = derive();

      if (d.tips.empty()) {
        std::vector<BeliefKey> order(d.interior.rbegin(), d.interior.rend());
        const ImproveOutcome out = improve_values(order, qtable_, mdp_, lazy(), cfg_,
                                                  &monotone_violations_, start_);
        if (out == ImproveOutcome::converged) {
          converged_ = true;
          return;
        }
        continue;  // policy changed or a tip re-appeared: re-derive
      }

      // Deepest-first tip selection, ties by key order.
      std::size_t pick = 0;
      for (std::size_t i = 1; i < d.tips.size(); ++i) {
        const int di = d.depth[d.tips[i].first];
        const int dp = d.depth[d.tips[pick].first];
        if (di > dp || (di == dp && d.tips[i].first < d.tips[pick].first)) pick = i;
      }
      const BeliefKey tip_key = d.tips[pick].first;
      const BeliefState& tip_belief = d.tips[pick].second;

      BeliefRecord& rec = ensure_record(tip_belief, tip_key);
      int i = -1;
      if (!rec.entries.empty()) {
        if (lazy()) {
          initialize_lazy(rec, tip_key);
          i = argmin_evaluate_loop(rec, tip_key);
        } else {
          i = evaluate_all(rec, tip_key);
        }
      } else {
        rec.initialized = true;
      }
      rec.expanded = true;
      write_value(rec, i >= 0 ? rec.entries[static_cast<std::size_t>(i)].q : kInf);
      ++expansions_;

      // Z: the expanded belief plus its ancestors in the solution graph,
      // deepest first.
      std::vector<BeliefKey> z_set{tip_key};
      std::unordered_set<BeliefKey, BeliefKeyHash> in_z{tip_key};
      std::deque<BeliefKey> frontier{tip_key};
      while (!frontier.empty()) {
        const BeliefKey k = frontier.front();
        frontier.pop_front();
        auto it = d.parents.find(k);
        if (it == d.parents.end()) continue;
        for (const BeliefKey& p : it->second) {
          if (in_z.insert(p).second) {
            z_set.push_back(p);
            frontier.push_back(p);
          }
        }
      }
      std::sort(z_set.begin(), z_set.end(), [&](const BeliefKey& a, const BeliefKey& b) {
        const int da = d.depth.count(a) ? d.depth[a] : 0;
        const int db = d.depth.count(b) ? d.depth[b] : 0;
        if (da != db) return da > db;
        return a < b;
      });
      improve_values(z_set, qtable_, mdp_, lazy(), cfg_, &monotone_violations_, start_);
    }
  }

 public:
  static ImproveOutcome improve_values(const std::vector<BeliefKey>& order, QTable& qtable,
                                       BeliefMdp& mdp, bool lazy_aware, const SolverConfig& cfg,
                                       std::int64_t* monotone_violations,
                                       Clock::time_point start) {
    // Snapshot the argmin actions to detect policy changes.
    std::vector<ActionId> entry_argmin(order.size(), -1);
    for (std::size_t i = 0; i < order.size(); ++i) {
      const BeliefRecord* rec = qtable.find(order[i]);
      if (!rec) throw PreconditionError("improve_values: uninitialized belief in order");
      const int a = rec->argmin();
      if (a >= 0) entry_argmin[i] = rec->entries[static_cast<std::size_t>(a)].action;
    }

    constexpr std::int64_t kSweepCap = 1000000;
    for (std::int64_t sweep = 0; sweep < kSweepCap; ++sweep) {
      if (seconds_since(start) > cfg.timeout_seconds) return ImproveOutcome::policy_changed;
      double max_resid = 0.0;
      for (const BeliefKey& key : order) {
        BeliefRecord* rec = qtable.find(key);
        for (auto& e : rec->entries) {
          if (!e.evaluated || e.invalid) continue;
          const BeliefTransition* tr = mdp.cached_transition(key, e.action);
          double q = tr->expected_cost;
          for (const auto& br : tr->branches) {
            double v;
            if (br.successor_is_goal) {
              v = 0.0;
            } else if (const BeliefRecord* s = qtable.find(br.successor_key)) {
              v = s->value;
            } else {
              v = cfg.heuristic_inflation * mdp.belief_heur(br.successor);
            }
            q += br.probability * v;
          }
          e.q = q;
          e.source = QSource::backup;
        }
        const int i = rec->argmin();
        if (i < 0) {
          rec->value = kInf;
          continue;
        }
        const QEntry& best = rec->entries[static_cast<std::size_t>(i)];
        if (!best.evaluated) {
          if (lazy_aware) return ImproveOutcome::best_action_unevaluated;
          continue;  // vanilla never reaches this; keep the value untouched
        }
        max_resid = std::max(max_resid, std::abs(best.q - rec->value));
        if (monotone_violations && cfg.check_monotone_backups && best.q < rec->value - 1e-9) {
          ++*monotone_violations;
        }
        rec->value = best.q;
      }
      if (max_resid <= cfg.residual_tolerance) break;
    }

    for (std::size_t i = 0; i < order.size(); ++i) {
      const BeliefRecord* rec = qtable.find(order[i]);
      const int a = rec->argmin();
      const ActionId now = a >= 0 ? rec->entries[static_cast<std::size_t>(a)].action : -1;
      if (now != entry_argmin[i]) return ImproveOutcome::policy_changed;
    }
    return ImproveOutcome::converged;
  }

 private:
  SolverKind kind_;
  const GoalPomdpModel& model_;
  const Heuristics& heuristics_;
  QEstimator* estimator_;
  SolverConfig cfg_;
  BeliefMdp mdp_;
  QTable qtable_;
  Rng rng_;
  Clock::time_point start_;

  BeliefState b0_;
  BeliefKey b0_key_;
  bool converged_ = false;
  std::int64_t trials_ = 0;
  std::int64_t expansions_ = 0;
  std::int64_t monotone_violations_ = 0;
  std::vector<EvaluationLogEntry> evaluation_log_;
};

}  // namespace

SolverKind solver_kind_from_string(const std::string& name) {
  if (name == "rtdp_bel") return SolverKind::rtdp_bel;
  if (name == "lazy_rtdp_bel") return SolverKind::lazy_rtdp_bel;
  if (name == "lao_star") return SolverKind::lao_star;
  if (name == "lazy_lao_star") return SolverKind::lazy_lao_star;
  throw ConfigError("unknown solver: " + name);
}

std::string to_string(SolverKind kind) {
  switch (kind) {
    case SolverKind::rtdp_bel: return "rtdp_bel";
    case SolverKind::lazy_rtdp_bel: return "lazy_rtdp_bel";
    case SolverKind::lao_star: return "lao_star";
    case SolverKind::lazy_lao_star: return "lazy_lao_star";
  }
  return "?";
}

bool solver_is_lazy(SolverKind kind) {
  return kind == SolverKind::lazy_rtdp_bel || kind == SolverKind::lazy_lao_star;
}

SolverResult rtdp_bel(const GoalPomdpModel& model, const Heuristics& h, const SolverConfig& cfg) {
  return SolverEngine(SolverKind::rtdp_bel, model, h, nullptr, cfg).run();
}

SolverResult lazy_rtdp_bel(const GoalPomdpModel& model, const Heuristics& h, QEstimator& estimator,
                           const SolverConfig& cfg) {
  return SolverEngine(SolverKind::lazy_rtdp_bel, model, h, &estimator, cfg).run();
}

SolverResult lao_star(const GoalPomdpModel& model, const Heuristics& h, const SolverConfig& cfg) {
  return SolverEngine(SolverKind::lao_star, model, h, nullptr, cfg).run();
}

SolverResult lazy_lao_star(const GoalPomdpModel& model, const Heuristics& h, QEstimator& estimator,
                           const SolverConfig& cfg) {
  return SolverEngine(SolverKind::lazy_lao_star, model, h, &estimator, cfg).run();
}

SolverResult solve(SolverKind kind, const GoalPomdpModel& model, const Heuristics& h,
                   QEstimator* estimator, const SolverConfig& cfg) {
  return SolverEngine(kind, model, h, estimator, cfg).run();
}

ImproveOutcome improve_values(const std::vector<BeliefKey>& order, QTable& qtable, BeliefMdp& mdp,
                              bool lazy_aware, const SolverConfig& cfg,
                              std::int64_t* monotone_violations) {
  return SolverEngine::improve_values(order, qtable, mdp, lazy_aware, cfg, monotone_violations,
                                      Clock::now());
}

SolverResult fh_lazy(SolverKind inner, const GoalPomdpModel& model, const Heuristics& h,
                     QEstimator* estimator, const SolverConfig& cfg) {
  SolverConfig inner_cfg = cfg;
  inner_cfg.eager_validation = false;  // validity is checked on policy actions only
  SolverEngine engine(inner, model, h, estimator, inner_cfg);

  std::int64_t outer = 0;
  std::int64_t invalid_found = 0;
  for (;;) {
    if (cfg.fh_cold_restart && outer > 0) engine.reset_tables();
    ++outer;

    SolverResult res = engine.run();
    res.fh_outer_iterations = outer;
    res.fh_invalid_actions_found = invalid_found;
    if (!res.converged) return res;

    // Validate exactly the (belief, action) pairs in the returned policy,
    // in deterministic BFS order.
    std::vector<std::pair<BeliefKey, ActionId>> invalid;
    for (const BeliefKey& key : res.policy.order) {
      const PolicyNode& node = res.policy.nodes.at(key);
      if (!engine.mdp().validate(node.belief, key, node.action)) {
        invalid.emplace_back(key, node.action);
      }
    }
    res.ledger = engine.mdp().ledger();  // include the validation queries
    if (invalid.empty()) return res;

    invalid_found += static_cast<std::int64_t>(invalid.size());
    res.fh_invalid_actions_found = invalid_found;
    if (outer >= cfg.fh_max_outer) {
      res.converged = false;
      return res;
    }
    for (const auto& [key, action] : invalid) {
      engine.mdp().blacklist(key, action);
      engine.qtable().remove_action(key, action);
    }
  }
}

PolicyGraph extract_policy(QTable& qtable, const BeliefState& b0, BeliefMdp& mdp) {
  PolicyGraph policy;
  policy.root = make_key(b0);
  if (mdp.is_goal(b0)) {
    policy.root_is_goal = true;
    return policy;
  }

  std::deque<BeliefKey> queue{policy.root};
  std::unordered_set<BeliefKey, BeliefKeyHash> visited{policy.root};
  while (!queue.empty()) {
    const BeliefKey key = queue.front();
    queue.pop_front();
    const BeliefRecord* rec = qtable.find(key);
    if (!rec || !rec->initialized) {
      throw PolicyExtractionError("open policy: reachable belief is uninitialized");
    }
    const int i = rec->argmin();
    if (i < 0) throw PolicyExtractionError("open policy: belief has no usable action");
    const QEntry& best = rec->entries[static_cast<std::size_t>(i)];
    if (!best.evaluated) {
      throw PolicyExtractionError("open policy: best action is unevaluated");
    }
    const BeliefTransition* tr = mdp.cached_transition(key, best.action);

    PolicyNode node;
    node.belief = rec->belief;
    node.action = best.action;
    node.action_cost = tr->expected_cost;
    for (const auto& br : tr->branches) {
      PolicyEdge edge;
      edge.observation = br.observation;
      edge.probability = br.probability;
      edge.successor = br.successor_key;
      edge.terminal = br.successor_is_goal;
      node.edges.push_back(std::move(edge));
      if (!br.successor_is_goal && visited.insert(br.successor_key).second) {
        queue.push_back(br.successor_key);
      }
    }
    policy.nodes.emplace(key, std::move(node));
    policy.order.push_back(key);
  }
  return policy;
}

namespace {

double evaluate_exact(const PolicyGraph& policy) {
  const auto n = static_cast<std::int64_t>(policy.order.size());
  std::unordered_map<BeliefKey, std::int64_t, BeliefKeyHash> index;
  for (std::int64_t i = 0; i < n; ++i) index.emplace(policy.order[static_cast<std::size_t>(i)], i);

  // Termination reachability: a node must reach a terminal edge with
  // positive probability under the policy, otherwise the expected cost
  // diverges.
  std::vector<char> reaches(static_cast<std::size_t>(n), 0);
  bool changed = true;
  while (changed) {
    changed = false;
    for (std::int64_t i = 0; i < n; ++i) {
      if (reaches[static_cast<std::size_t>(i)]) continue;
      const PolicyNode& node = policy.nodes.at(policy.order[static_cast<std::size_t>(i)]);
      for (const auto& edge : node.edges) {
        if (edge.terminal || reaches[static_cast<std::size_t>(index.at(edge.successor))]) {
          reaches[static_cast<std::size_t>(i)] = 1;
          changed = true;
          break;
        }
      }
    }
  }
  for (std::int64_t i = 0; i < n; ++i) {
    if (!reaches[static_cast<std::size_t>(i)]) {
      throw PolicyDivergenceError("policy has a component with zero termination probability");
    }
  }

  Eigen::MatrixXd A = Eigen::MatrixXd::Identity(n, n);
  Eigen::VectorXd c(n);
  for (std::int64_t i = 0; i < n; ++i) {
    const PolicyNode& node = policy.nodes.at(policy.order[static_cast<std::size_t>(i)]);
    c(i) = node.action_cost;
    for (const auto& edge : node.edges) {
      if (edge.terminal) continue;
      A(i, index.at(edge.successor)) -= edge.probability;
    }
  }
  const Eigen::VectorXd v = A.partialPivLu().solve(c);
  return v(index.at(policy.root));
}

double evaluate_monte_carlo(const PolicyGraph& policy, const GoalPomdpModel& model,
                            std::int64_t rollouts, std::uint64_t seed) {
  Rng rng(seed);
  const BeliefState b0 = policy.nodes.at(policy.root).belief;
  std::vector<WeightedState> trow;
  std::vector<WeightedObservation> orow;
  double total = 0.0;
  constexpr std::int64_t kStepCap = 100000;

  for (std::int64_t r = 0; r < rollouts; ++r) {
    // Sample the hidden start state.
    std::vector<double> w(b0.particles.size());
    for (std::size_t i = 0; i < b0.particles.size(); ++i) w[i] = b0.particles[i].second;
    StateId s = b0.particles[rng.weighted_index(w)].first;

    const PolicyNode* node = &policy.nodes.at(policy.root);
    double cost = 0.0;
    for (std::int64_t step = 0;; ++step) {
      if (step >= kStepCap) throw PolicyDivergenceError("rollout exceeded the step cap");
      const Observable& ctx = node->belief.observable;
      cost += model.cost(ctx, s, node->action);

      trow.clear();
      model.enumerate_transitions(ctx, s, node->action, trow);
      w.resize(trow.size());
      for (std::size_t i = 0; i < trow.size(); ++i) w[i] = trow[i].second;
      const StateId s_next = trow[rng.weighted_index(w)].first;

      orow.clear();
      model.enumerate_observations(ctx, s_next, node->action, orow);
      w.resize(orow.size());
      for (std::size_t i = 0; i < orow.size(); ++i) w[i] = orow[i].second;
      const ObservationId z = orow[rng.weighted_index(w)].first;

      const PolicyEdge* edge = nullptr;
      for (const auto& e : node->edges) {
        if (e.observation == z) {
          edge = &e;
          break;
        }
      }
      if (!edge) throw DomainModelError("rollout observation has no policy branch");
      s = s_next;
      if (edge->terminal) break;
      node = &policy.nodes.at(edge->successor);
    }
    total += cost;
  }
  return total / static_cast<double>(rollouts);
}

}  // namespace

double evaluate_policy(const PolicyGraph& policy, const GoalPomdpModel& model, EvalMode mode,
                       std::int64_t mc_rollouts, std::uint64_t seed) {
  if (policy.root_is_goal) return 0.0;
  if (policy.nodes.empty()) throw PreconditionError("evaluate_policy: empty non-goal policy");
  if (mode == EvalMode::exact) return evaluate_exact(policy);
  return evaluate_monte_carlo(policy, model, mc_rollouts, seed);
}

}  // namespace bsp
