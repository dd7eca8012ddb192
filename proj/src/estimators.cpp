#include "bsp/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <map>

namespace bsp {

EstimatorKind estimator_kind_from_string(const std::string& name) {
  if (name == "exact") return EstimatorKind::exact;
  if (name == "subsample") return EstimatorKind::subsample;
  if (name == "entropy") return EstimatorKind::entropy_corrected;
  if (name == "pce") return EstimatorKind::pce;
  if (name == "qmdp") return EstimatorKind::qmdp;
  if (name == "unbiased") return EstimatorKind::unbiased_decomposed;
  throw ConfigError("unknown estimator kind: " + name);
}

std::string to_string(EstimatorKind kind) {
  switch (kind) {
    case EstimatorKind::exact: return "exact";
    case EstimatorKind::subsample: return "subsample";
    case EstimatorKind::entropy_corrected: return "entropy";
    case EstimatorKind::pce: return "pce";
    case EstimatorKind::qmdp: return "qmdp";
    case EstimatorKind::unbiased_decomposed: return "unbiased";
  }
  return "?";
}

namespace {

SubsampledBelief subsample_to_target(const BeliefState& b, std::int64_t target, Rng& rng) {
  SubsampledBelief out;
  out.base = make_key(b);
  out.base_support = static_cast<std::int64_t>(b.support_size());
  const std::int64_t n = out.base_support;
  target = std::clamp<std::int64_t>(target, 1, n);

  if (target == n) {
    // Exhaustive support: empirical noise serves no purpose, keep b exactly.
    out.sampled = b;
    out.support = n;
    return out;
  }

  std::vector<double> weights(b.particles.size());
  for (std::size_t i = 0; i < b.particles.size(); ++i) weights[i] = b.particles[i].second;

  std::map<StateId, double> counts;
  std::int64_t distinct = 0;
  const std::int64_t draw_cap = 50 * target;
  for (std::int64_t d = 0; d < draw_cap && distinct < target; ++d) {
    const std::size_t i = rng.weighted_index(weights);
    auto [it, fresh] = counts.try_emplace(b.particles[i].first, 0.0);
    it->second += 1.0;
    if (fresh) ++distinct;
  }
  if (distinct < target) {
    // Heavy tail: pad with the highest-probability unseen states, one
    // pseudo-draw each.
    std::vector<std::size_t> unseen;
    for (std::size_t i = 0; i < b.particles.size(); ++i) {
      if (!counts.count(b.particles[i].first)) unseen.push_back(i);
    }
    std::sort(unseen.begin(), unseen.end(), [&](std::size_t x, std::size_t y) {
      if (b.particles[x].second != b.particles[y].second) {
        return b.particles[x].second > b.particles[y].second;
      }
      return b.particles[x].first < b.particles[y].first;
    });
    for (std::size_t i : unseen) {
      if (distinct >= target) break;
      counts[b.particles[i].first] = 1.0;
      ++distinct;
    }
  }

  std::vector<std::pair<StateId, double>> raw(counts.begin(), counts.end());
  out.sampled = canonicalize(std::move(raw), b.observable);
  out.support = static_cast<std::int64_t>(out.sampled.support_size());
  return out;
}

void require_unweighted(const BeliefState& b) {
  const double uniform = 1.0 / static_cast<double>(b.support_size());
  for (const auto& [s, p] : b.particles) {
    if (std::abs(p - uniform) > kProbTolerance) {
      throw UnsupportedDomainError("estimator requires unweighted hypothesis particles");
    }
  }
}

// Deterministic successor + observation for one hypothesis particle.
ObservationId observation_of_particle(const Observable& ctx, StateId s, ActionId a,
                                      ModelView& view) {
  std::vector<WeightedState> row;
  view.transitions(ctx, s, a, row);
  if (row.size() != 1) {
    throw UnsupportedDomainError("estimator requires deterministic transitions");
  }
  std::vector<WeightedObservation> obs;
  view.observations(ctx, row.front().first, a, obs);
  ObservationId best = obs.front().first;
  double best_p = obs.front().second;
  for (const auto& [z, p] : obs) {
    if (p > best_p) {
      best = z;
      best_p = p;
    }
  }
  if (best_p < 1.0 - kProbTolerance) {
    throw UnsupportedDomainError("estimator requires deterministic observations");
  }
  return best;
}

}  // namespace

SubsampledBelief subsample(const BeliefState& b, double delta_fraction, Rng& rng) {
  if (b.particles.empty()) throw InvalidBeliefError("subsample: empty belief");
  const auto n = static_cast<std::int64_t>(b.support_size());
  const auto target = static_cast<std::int64_t>(
      std::ceil(delta_fraction * static_cast<double>(n)) + 0.0);
  return subsample_to_target(b, std::max<std::int64_t>(target, 1), rng);
}

double q_init_exact(const BeliefState& b, ActionId a, ModelView& view, const Heuristics& h) {
  const BeliefTransition tr = compute_belief_transition(b, a, view);
  double q = tr.expected_cost;
  for (const auto& br : tr.branches) q += br.probability * h.belief(br.successor);
  return q;
}

double q_hat_qmdp(const BeliefState& b, ActionId a, ModelView& view, const Heuristics& h) {
  double q = 0.0;
  std::vector<WeightedState> row;
  for (const auto& [s, p] : b.particles) {
    double inner = view.model().cost(b.observable, s, a);
    view.transitions(b.observable, s, a, row);
    for (const auto& [s2, t] : row) {
      if (!view.model().is_goal_state(s2)) inner += t * h.state(s2);
    }
    q += p * inner;
  }
  return q;
}

double entropy_corrected_value(double cost, double alpha, std::int64_t n, std::int64_t k,
                               std::span<const std::int64_t> partition) {
  const double ratio = static_cast<double>(n) / static_cast<double>(k);
  double sum = 0.0;
  for (std::int64_t c : partition) sum += static_cast<double>(c) * static_cast<double>(c);
  return cost + alpha * ratio * ratio * sum / static_cast<double>(n);
}

double pce_value(double cost, double alpha, double kappa, std::int64_t n, std::int64_t k,
                 std::span<const std::int64_t> partition) {
  const double ratio = static_cast<double>(n) / static_cast<double>(k);
  const double shrink = kappa * std::sqrt(static_cast<double>(k));
  double sum = 0.0;
  for (std::int64_t c : partition) {
    // Shrunken counts are floored at 0 before squaring; a negative count
    // squared would overestimate.
    const double shrunk = std::max(0.0, static_cast<double>(c) - shrink) * ratio;
    sum += shrunk * shrunk;
  }
  return cost + alpha * sum / static_cast<double>(n);
}

QEstimator::QEstimator(EstimatorConfig config, Heuristics heuristics)
    : config_(config), heuristics_(std::move(heuristics)) {}

Rng QEstimator::stream_for(const BeliefKey& key, ActionId a) const {
  return Rng(mix_seed(config_.seed, key.hash, static_cast<std::uint64_t>(a)));
}

double QEstimator::estimate(const BeliefState& b, const BeliefKey& key, ActionId a,
                            ModelView& view) {
  const CacheKey ck{key, a};
  auto it = cache_.find(ck);
  if (it != cache_.end()) return it->second;
  const double value = compute(b, key, a, view);
  cache_.emplace(ck, value);
  return value;
}

double QEstimator::compute(const BeliefState& b, const BeliefKey& key, ActionId a,
                           ModelView& view) {
  switch (config_.kind) {
    case EstimatorKind::exact:
      return q_init_exact(b, a, view, heuristics_);
    case EstimatorKind::subsample:
      return subsampled(b, key, a, view);
    case EstimatorKind::entropy_corrected:
      return entropy_family(b, key, a, view, false);
    case EstimatorKind::pce:
      return entropy_family(b, key, a, view, true);
    case EstimatorKind::qmdp:
      return q_hat_qmdp(b, a, view, heuristics_);
    case EstimatorKind::unbiased_decomposed:
      return decomposed(b, key, a, view);
  }
  throw ConfigError("unreachable estimator kind");
}

double QEstimator::subsampled(const BeliefState& b, const BeliefKey& key, ActionId a,
                              ModelView& view) {
  Rng rng = stream_for(key, a);
  const SubsampledBelief sub = subsample(b, config_.delta_fraction, rng);
  return q_init_exact(sub.sampled, a, view, heuristics_);
}

double QEstimator::entropy_family(const BeliefState& b, const BeliefKey& key, ActionId a,
                                  ModelView& view, bool conservative) {
  require_unweighted(b);
  Rng rng = stream_for(key, a);
  const SubsampledBelief sub = subsample(b, config_.delta_fraction, rng);

  // Expected cost over the full belief; cost lookups are cheap. Model
  // queries happen only on the subsampled support.
  const double cost = expected_cost(b, a, view.model());

  std::map<ObservationId, std::int64_t> partition;
  for (const auto& [s, p] : sub.sampled.particles) {
    ++partition[observation_of_particle(sub.sampled.observable, s, a, view)];
  }
  std::vector<std::int64_t> counts;
  counts.reserve(partition.size());
  for (const auto& [z, c] : partition) counts.push_back(c);

  if (conservative) {
    return pce_value(cost, config_.alpha, config_.kappa, sub.base_support, sub.support, counts);
  }
  return entropy_corrected_value(cost, config_.alpha, sub.base_support, sub.support, counts);
}

double QEstimator::decomposed(const BeliefState& b, const BeliefKey& key, ActionId a,
                              ModelView& view) {
  Rng rng = stream_for(key, a);
  return decompose_q_estimate(b, a, view, heuristics_, config_, rng).combine();
}

DecomposedComponents decompose_q_estimate(const BeliefState& b, ActionId a, ModelView& view,
                                          const Heuristics& h, const EstimatorConfig& cfg,
                                          Rng& rng) {
  const auto n = static_cast<std::int64_t>(b.support_size());
  std::int64_t budget = cfg.sampling_budget;
  if (budget <= 0) {
    budget = static_cast<std::int64_t>(std::ceil(cfg.delta_fraction * static_cast<double>(n)));
  }
  if (budget < 3) throw InsufficientBudgetError("decomposed estimator needs a budget of >= 3");
  const std::int64_t per_pool = budget / 3;

  Rng r1(rng.next_u64());
  Rng r2(rng.next_u64());
  Rng r3(rng.next_u64());
  const SubsampledBelief pool1 = subsample_to_target(b, per_pool, r1);
  const SubsampledBelief pool2 = subsample_to_target(b, per_pool, r2);
  const SubsampledBelief pool3 = subsample_to_target(b, per_pool, r3);

  // Per-observation accumulators: p_hat from pool 1, the heuristic-weighted
  // numerator from pool 2, the posterior denominator from pool 3.
  std::map<ObservationId, double> p_hat;
  std::map<ObservationId, double> numerator;
  std::map<ObservationId, double> denominator;

  std::vector<WeightedState> row;
  std::vector<WeightedObservation> obs;
  auto accumulate = [&](const BeliefState& pool, std::map<ObservationId, double>* plain,
                        std::map<ObservationId, double>* weighted) {
    for (const auto& [s, p] : pool.particles) {
      view.transitions(pool.observable, s, a, row);
      for (const auto& [s2, t] : row) {
        view.observations(pool.observable, s2, a, obs);
        for (const auto& [z, o] : obs) {
          if (o <= 0.0) continue;
          if (plain) (*plain)[z] += p * t * o;
          if (weighted) {
            const double hs = view.model().is_goal_state(s2) ? 0.0 : h.state(s2);
            (*weighted)[z] += p * t * o * hs;
          }
        }
      }
    }
  };
  accumulate(pool1.sampled, &p_hat, nullptr);
  accumulate(pool2.sampled, nullptr, &numerator);
  accumulate(pool3.sampled, &denominator, nullptr);

  DecomposedComponents out;
  out.cost = (expected_cost(pool1.sampled, a, view.model()) +
              expected_cost(pool2.sampled, a, view.model()) +
              expected_cost(pool3.sampled, a, view.model())) /
             3.0;
  for (const auto& [z, p] : p_hat) {
    DecomposedComponents::Branch br;
    br.observation = z;
    br.p_hat = p;
    auto itn = numerator.find(z);
    br.numerator = itn == numerator.end() ? 0.0 : itn->second;
    auto itd = denominator.find(z);
    br.denominator = itd == denominator.end() ? 0.0 : itd->second;
    out.branches.push_back(br);
  }
  return out;
}

}  // namespace bsp
