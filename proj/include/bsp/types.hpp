#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace bsp {

using StateId = std::int64_t;
using ActionId = std::int32_t;
using ObservationId = std::int64_t;

// Observation emitted by every goal state and by no other state.
inline constexpr ObservationId kGoalObservation = -1;

// Probability mass below this is numerical dust: pruned from beliefs and
// dropped from observation branches, followed by renormalization.
inline constexpr double kPruneThreshold = 1e-12;

// Quantization resolution for belief identity keys. At this resolution the
// key is exact identity for desk-scale arithmetic.
inline constexpr double kKeyResolution = 1e-9;

// Tolerance for probability-normalization checks.
inline constexpr double kProbTolerance = 1e-9;

struct InvalidBeliefError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct DomainModelError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct UnsupportedDomainError : DomainModelError {
  using DomainModelError::DomainModelError;
};

struct ZeroProbabilityObservationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PreconditionError : std::logic_error {
  using std::logic_error::logic_error;
};

struct PolicyExtractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct PolicyDivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NoValidPolicyError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InsufficientBudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FixtureError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace bsp
