#pragma once

#include <cstdint>
#include <random>
#include <span>

#include "bsp/types.hpp"

namespace bsp {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) {
  return splitmix64(splitmix64(splitmix64(a) ^ b) ^ c);
}

// Deterministic RNG. Sampling helpers are hand-rolled on top of the
// bit-exact mt19937_64 engine so results are identical across standard
// library implementations (std distributions are not portable).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) {
    // Rejection sampling keeps the draw unbiased.
    const std::uint64_t limit = ~0ull - (~0ull % n + 1) % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x > limit);
    return x % n;
  }

  // Index into a weight vector, proportional to weight. Weights need not be
  // normalized; total must be positive.
  std::size_t weighted_index(std::span<const double> weights) {
    double total = 0.0;
    for (double w : weights) total += w;
    double u = next_double() * total;
    for (std::size_t i = 0; i + 1 < weights.size(); ++i) {
      u -= weights[i];
      if (u < 0.0) return i;
    }
    return weights.empty() ? 0 : weights.size() - 1;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bsp
