#include "bsp/belief.hpp"

#include <algorithm>
#include <cmath>

#include "bsp/rng.hpp"

namespace bsp {

double BeliefState::probability_of(StateId s) const {
  auto it = std::lower_bound(particles.begin(), particles.end(), s,
                             [](const auto& p, StateId v) { return p.first < v; });
  if (it == particles.end() || it->first != s) return 0.0;
  return it->second;
}

bool operator<(const BeliefKey& a, const BeliefKey& b) {
  if (a.observable != b.observable) {
    if (!a.observable.has_value()) return b.observable.has_value();
    if (!b.observable.has_value()) return false;
    return *a.observable < *b.observable;
  }
  return a.entries < b.entries;
}

BeliefKey make_key(const BeliefState& b) {
  BeliefKey key;
  key.observable = b.observable;
  key.entries.reserve(b.particles.size());
  for (const auto& [s, p] : b.particles) {
    key.entries.emplace_back(s, static_cast<std::int64_t>(std::llround(p / kKeyResolution)));
  }
  std::uint64_t h = 0x51ed270b7a14c253ull;
  if (key.observable.has_value()) {
    h = mix_seed(h, static_cast<std::uint64_t>(*key.observable), 1);
  }
  for (const auto& [s, q] : key.entries) {
    h = mix_seed(h, static_cast<std::uint64_t>(s), static_cast<std::uint64_t>(q));
  }
  key.hash = static_cast<std::size_t>(h);
  return key;
}

BeliefState canonicalize(std::vector<std::pair<StateId, double>> raw, Observable observable) {
  if (raw.empty()) throw InvalidBeliefError("canonicalize: empty particle list");

  std::sort(raw.begin(), raw.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  // Merge duplicates by summation.
  std::vector<std::pair<StateId, double>> merged;
  merged.reserve(raw.size());
  for (const auto& [s, w] : raw) {
    if (w < -kPruneThreshold) {
      throw InvalidBeliefError("canonicalize: negative particle weight");
    }
    if (!merged.empty() && merged.back().first == s) {
      merged.back().second += w;
    } else {
      merged.emplace_back(s, w);
    }
  }

  double total = 0.0;
  for (const auto& [s, w] : merged) total += w;
  if (!(total > 0.0)) {
    throw InvalidBeliefError("canonicalize: total weight not positive");
  }

  // Normalize, prune dust, renormalize.
  double kept = 0.0;
  std::vector<std::pair<StateId, double>> out;
  out.reserve(merged.size());
  for (const auto& [s, w] : merged) {
    const double p = w / total;
    if (p < kPruneThreshold) continue;
    out.emplace_back(s, p);
    kept += p;
  }
  if (out.empty() || !(kept > 0.0)) {
    throw InvalidBeliefError("canonicalize: all mass pruned");
  }
  for (auto& [s, p] : out) p /= kept;

  BeliefState b;
  b.particles = std::move(out);
  b.observable = observable;
  return b;
}

bool beliefs_close(const BeliefState& a, const BeliefState& b, double tol) {
  if (a.observable != b.observable) return false;
  if (a.particles.size() != b.particles.size()) return false;
  for (std::size_t i = 0; i < a.particles.size(); ++i) {
    if (a.particles[i].first != b.particles[i].first) return false;
    if (std::abs(a.particles[i].second - b.particles[i].second) > tol) return false;
  }
  return true;
}

}  // namespace bsp
