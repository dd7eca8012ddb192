#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>

#include "bsp/belief_mdp.hpp"
#include "bsp/rng.hpp"

namespace bsp {

enum class EstimatorKind {
  exact,                  // full Q_init lookahead (no saving; reference)
  subsample,              // Q_init on a reduced-support belief
  entropy_corrected,      // subsampled with the squared sampling-ratio term
  pce,                    // probabilistically conservative (Hoeffding shrink)
  qmdp,                   // full observability after one action
  unbiased_decomposed,    // three independent component estimates
};

EstimatorKind estimator_kind_from_string(const std::string& name);
std::string to_string(EstimatorKind kind);

struct EstimatorConfig {
  EstimatorKind kind = EstimatorKind::qmdp;
  double delta_fraction = 0.15;  // subsample support target as fraction of n
  double alpha = 0.1;            // entropy-heuristic scale
  double kappa = 1.22;           // confidence coefficient (95%)
  std::uint64_t seed = 0;
  // Total draw budget for the decomposed estimator, split evenly across the
  // three component pools. 0 derives it as ceil(delta_fraction * n).
  std::int64_t sampling_budget = 0;
};

struct SubsampledBelief {
  BeliefKey base;
  BeliefState sampled;
  std::int64_t base_support = 0;  // n
  std::int64_t support = 0;       // k
};

/// Draw i.i.d. states s ~ b until the distinct-state count reaches
/// ceil(delta_fraction * n) (capped at n); probabilities are the empirical
/// frequencies of all draws. When the target equals the full support the
/// exact belief is returned. Total draws are capped at 50x the target, after
/// which the highest-probability unseen states pad the support.
SubsampledBelief subsample(const BeliefState& b, double delta_fraction, Rng& rng);

/// One-step lookahead value Q_init(b, a) = C(b, a) + sum_z P(z|b,a) heur(b_a^z).
/// Computes the full belief transition (uncached); this is the expensive
/// reference that the cheap estimators approximate.
double q_init_exact(const BeliefState& b, ActionId a, ModelView& view, const Heuristics& h);

/// Q^MDP surrogate: sum_s b(s) (c(s,a) + sum_s' T(s,a,s') heur(s')).
/// Queries the transition model only; performs zero observation queries.
double q_hat_qmdp(const BeliefState& b, ActionId a, ModelView& view, const Heuristics& h);

/// Per-observation components of the three-pool decomposed estimator:
/// observation probability, heuristic-weighted numerator and posterior
/// denominator, each from its own independent sample pool.
struct DecomposedComponents {
  double cost = 0.0;
  struct Branch {
    ObservationId observation;
    double p_hat = 0.0;
    double numerator = 0.0;
    double denominator = 0.0;
  };
  std::vector<Branch> branches;

  double combine() const {
    double q = cost;
    for (const auto& br : branches) {
      if (br.denominator > 0.0) q += br.p_hat * br.numerator / br.denominator;
    }
    return q;
  }
};

DecomposedComponents decompose_q_estimate(const BeliefState& b, ActionId a, ModelView& view,
                                          const Heuristics& h, const EstimatorConfig& cfg,
                                          Rng& rng);

// Pure arithmetic used by the entropy-family estimators; partition holds the
// per-observation subsampled hypothesis counts |H_hat^z|.
double entropy_corrected_value(double cost, double alpha, std::int64_t n, std::int64_t k,
                               std::span<const std::int64_t> partition);
double pce_value(double cost, double alpha, double kappa, std::int64_t n, std::int64_t k,
                 std::span<const std::int64_t> partition);

/// Q-value initializer family. Stateless with respect to the solve: never
/// touches the QTable or the transition cache. Estimates are cached per
/// (BeliefKey, ActionId) under per-call rng streams derived from
/// (seed, key, action) so revisits are deterministic.
class QEstimator {
 public:
  QEstimator(EstimatorConfig config, Heuristics heuristics);

  double estimate(const BeliefState& b, const BeliefKey& key, ActionId a, ModelView& view);

  const EstimatorConfig& config() const { return config_; }

 private:
  double compute(const BeliefState& b, const BeliefKey& key, ActionId a, ModelView& view);
  double subsampled(const BeliefState& b, const BeliefKey& key, ActionId a, ModelView& view);
  double entropy_family(const BeliefState& b, const BeliefKey& key, ActionId a, ModelView& view,
                        bool conservative);
  double decomposed(const BeliefState& b, const BeliefKey& key, ActionId a, ModelView& view);

  Rng stream_for(const BeliefKey& key, ActionId a) const;

  EstimatorConfig config_;
  Heuristics heuristics_;

  struct CacheKey {
    BeliefKey key;
    ActionId action;
    bool operator==(const CacheKey&) const = default;
  };
  struct CacheKeyHash {
    std::size_t operator()(const CacheKey& c) const {
      return c.key.hash * 1099511628211ull + static_cast<std::size_t>(c.action);
    }
  };
  std::unordered_map<CacheKey, double, CacheKeyHash> cache_;
};

}  // namespace bsp
