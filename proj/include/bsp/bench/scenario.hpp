#pragma once

#include <memory>
#include <string>
#include <vector>

#include "bsp/solvers.hpp"

namespace bsp {

enum class DomainId { line_world, indoor_slip, indoor_start, outdoor, contact_toy, contact_planted };
enum class PlannerId {
  rtdp_bel,
  lazy_rtdp_bel,
  lao_star,
  lazy_lao_star,
  fh_lazy_rtdp_bel,
  fh_lazy_lao_star,
};

DomainId domain_id_from_string(const std::string& name);
PlannerId planner_id_from_string(const std::string& name);
std::string to_string(DomainId id);
std::string to_string(PlannerId id);

/// One benchmark scenario: the unit of execution, expanded over its seed
/// list. Parsed from flat key = value blocks introduced by [scenario]
/// section headers.
struct ScenarioConfig {
  std::string id;
  std::string group;  // aggregation group; defaults to domain+map+mode
  DomainId domain = DomainId::line_world;
  std::string map_path;
  std::string mode = "goal_directed";     // goal_directed | info_gathering
  std::string heuristic = "dist";         // dist | euclidean
  PlannerId planner = PlannerId::rtdp_bel;
  std::string estimator = "none";         // none | exact | subsample | entropy | pce | qmdp | unbiased
  double delta_fraction = 0.15;
  double alpha = 0.1;
  double kappa = 1.22;
  std::int64_t budget = 0;
  std::vector<std::uint64_t> seeds;
  double eps_res = 1e-9;
  double eps_inflate = 1.0;
  double timeout_s = 300.0;
  std::int64_t max_trials = 200000;
  std::int64_t max_expansions = 2000000;
  std::int64_t query_delay_us = 0;
  std::string validation = "none";  // none | eager
  std::string cost_mode = "exact";  // exact | mc
  std::int64_t mc_samples = 10000;
  bool fh_cold_restart = false;
};

/// Parse a config file holding one or more [scenario] sections. Unknown
/// keys, missing files and empty seed lists fail fast with ConfigError.
std::vector<ScenarioConfig> parse_scenario_file(const std::string& path);
std::vector<ScenarioConfig> parse_scenario_text(const std::string& text,
                                                const std::string& base_dir);

std::unique_ptr<GoalPomdpModel> build_domain(const ScenarioConfig& config);

/// Result of one (scenario, seed) execution; mirrors one runs.csv row.
struct RunRecord {
  std::string scenario_id;
  std::string group;
  std::string domain;
  std::string planner;
  std::string estimator;
  std::uint64_t seed = 0;
  bool success = false;
  double wall_time_s = 0.0;
  double value_b0 = 0.0;
  double policy_cost = 0.0;
  bool policy_cost_defined = false;
  std::string cost_mode;
  QueryLedger ledger;
  std::int64_t trials = 0;
  std::int64_t expansions = 0;
};

RunRecord execute_run(const ScenarioConfig& config, std::uint64_t seed);

struct MatrixResult {
  std::vector<RunRecord> runs;         // scenario-major, seed-minor order
  std::string runs_csv;
  std::string summary_csv;
};

/// Execute every (scenario, seed) pair, optionally in parallel. Per-run
/// failures (timeouts, no-valid-policy) are recorded with success = false
/// and never abort the matrix. Aggregation averages time/cost over the
/// per-group intersection of seeds solved by every planner with success
/// rate >= 0.2; planners below that are excluded from those columns.
MatrixResult run_matrix(const std::vector<ScenarioConfig>& configs, int workers = 1);

std::string runs_csv_header();
std::string to_csv_row(const RunRecord& r);

/// Strip the wall-time columns from a runs.csv text, for byte-identity
/// comparisons across reruns.
std::string strip_wall_time_columns(const std::string& csv);

}  // namespace bsp
