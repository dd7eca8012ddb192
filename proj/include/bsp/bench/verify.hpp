#pragma once

#include <string>
#include <vector>

namespace bsp {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SuiteReport {
  std::string suite;
  std::vector<CheckResult> checks;
  bool passed() const {
    for (const auto& c : checks) {
      if (!c.passed) return false;
    }
    return true;
  }
};

/// Valid suite ids: oracle-equivalence, laziness-counters, estimator-stats,
/// fh-correctness. Throws ConfigError for anything else.
SuiteReport verify_acceptance(const std::string& suite_id, const std::string& fixture_dir);

std::vector<std::string> verify_suite_ids();

/// Render a report as one PASS/FAIL line per check.
std::string format_report(const SuiteReport& report);

}  // namespace bsp
