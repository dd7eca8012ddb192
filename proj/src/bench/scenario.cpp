#include "bsp/bench/scenario.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <thread>

#include "bsp/domains/contact.hpp"
#include "bsp/domains/indoor.hpp"
#include "bsp/domains/line_world.hpp"
#include "bsp/domains/outdoor.hpp"

namespace bsp {

DomainId domain_id_from_string(const std::string& name) {
  if (name == "line_world") return DomainId::line_world;
  if (name == "indoor_slip") return DomainId::indoor_slip;
  if (name == "indoor_start") return DomainId::indoor_start;
  if (name == "outdoor") return DomainId::outdoor;
  if (name == "contact_toy") return DomainId::contact_toy;
  if (name == "contact_planted") return DomainId::contact_planted;
  throw ConfigError("unknown domain: " + name);
}

PlannerId planner_id_from_string(const std::string& name) {
  if (name == "rtdp_bel") return PlannerId::rtdp_bel;
  if (name == "lazy_rtdp_bel") return PlannerId::lazy_rtdp_bel;
  if (name == "lao_star") return PlannerId::lao_star;
  if (name == "lazy_lao_star") return PlannerId::lazy_lao_star;
  if (name == "fh_lazy_rtdp_bel") return PlannerId::fh_lazy_rtdp_bel;
  if (name == "fh_lazy_lao_star") return PlannerId::fh_lazy_lao_star;
  throw ConfigError("unknown solver: " + name);
}

std::string to_string(DomainId id) {
  switch (id) {
    case DomainId::line_world: return "line_world";
    case DomainId::indoor_slip: return "indoor_slip";
    case DomainId::indoor_start: return "indoor_start";
    case DomainId::outdoor: return "outdoor";
    case DomainId::contact_toy: return "contact_toy";
    case DomainId::contact_planted: return "contact_planted";
  }
  return "?";
}

std::string to_string(PlannerId id) {
  switch (id) {
    case PlannerId::rtdp_bel: return "rtdp_bel";
    case PlannerId::lazy_rtdp_bel: return "lazy_rtdp_bel";
    case PlannerId::lao_star: return "lao_star";
    case PlannerId::lazy_lao_star: return "lazy_lao_star";
    case PlannerId::fh_lazy_rtdp_bel: return "fh_lazy_rtdp_bel";
    case PlannerId::fh_lazy_lao_star: return "fh_lazy_lao_star";
  }
  return "?";
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  auto e = s.find_last_not_of(" \t\r");
  if (b == std::string::npos) return "";
  return s.substr(b, e - b + 1);
}

void apply_key(ScenarioConfig& c, const std::string& key, const std::string& value,
               const std::string& base_dir) {
  if (key == "id") c.id = value;
  else if (key == "group") c.group = value;
  else if (key == "domain") c.domain = domain_id_from_string(value);
  else if (key == "map") {
    c.map_path = value;
    if (!base_dir.empty() && !std::filesystem::path(value).is_absolute()) {
      c.map_path = (std::filesystem::path(base_dir) / value).string();
    }
  } else if (key == "mode") c.mode = value;
  else if (key == "heuristic") c.heuristic = value;
  else if (key == "solver") c.planner = planner_id_from_string(value);
  else if (key == "estimator") c.estimator = value;
  else if (key == "delta") c.delta_fraction = std::stod(value);
  else if (key == "alpha") c.alpha = std::stod(value);
  else if (key == "kappa") c.kappa = std::stod(value);
  else if (key == "budget") c.budget = std::stoll(value);
  else if (key == "seeds") {
    c.seeds.clear();
    std::istringstream in(value);
    std::string item;
    while (std::getline(in, item, ',')) {
      item = trim(item);
      if (!item.empty()) c.seeds.push_back(std::stoull(item));
    }
  } else if (key == "eps_res") c.eps_res = std::stod(value);
  else if (key == "eps_inflate") c.eps_inflate = std::stod(value);
  else if (key == "timeout_s") c.timeout_s = std::stod(value);
  else if (key == "max_trials") c.max_trials = std::stoll(value);
  else if (key == "max_expansions") c.max_expansions = std::stoll(value);
  else if (key == "query_delay_us") c.query_delay_us = std::stoll(value);
  else if (key == "validation") c.validation = value;
  else if (key == "cost_mode") c.cost_mode = value;
  else if (key == "mc_samples") c.mc_samples = std::stoll(value);
  else if (key == "fh_cold_restart") c.fh_cold_restart = value == "1" || value == "true";
  else throw ConfigError("unknown scenario key: " + key);
}

void validate_config(const ScenarioConfig& c) {
  if (c.id.empty()) throw ConfigError("scenario missing id");
  if (c.seeds.empty()) throw ConfigError("scenario '" + c.id + "' has an empty seed list");
  if (c.eps_res <= 0.0) throw ConfigError("eps_res must be positive");
  if (c.eps_inflate < 1.0) throw ConfigError("eps_inflate must be >= 1");
  if (c.mode != "goal_directed" && c.mode != "info_gathering") {
    throw ConfigError("unknown mode: " + c.mode);
  }
  if (c.heuristic != "dist" && c.heuristic != "euclidean") {
    throw ConfigError("unknown heuristic: " + c.heuristic);
  }
  if (c.validation != "none" && c.validation != "eager") {
    throw ConfigError("unknown validation mode: " + c.validation);
  }
  if (c.cost_mode != "exact" && c.cost_mode != "mc") {
    throw ConfigError("unknown cost_mode: " + c.cost_mode);
  }
  const bool needs_map = c.domain == DomainId::indoor_slip || c.domain == DomainId::indoor_start ||
                         c.domain == DomainId::outdoor;
  if (needs_map) {
    if (c.map_path.empty()) throw ConfigError("scenario '" + c.id + "' needs a map");
    if (!std::filesystem::exists(c.map_path)) {
      throw ConfigError("map file does not exist: " + c.map_path);
    }
  }
  const bool lazy = c.planner == PlannerId::lazy_rtdp_bel || c.planner == PlannerId::lazy_lao_star ||
                    c.planner == PlannerId::fh_lazy_rtdp_bel ||
                    c.planner == PlannerId::fh_lazy_lao_star;
  if (lazy && c.estimator == "none") {
    throw ConfigError("scenario '" + c.id + "' uses a lazy solver without an estimator");
  }
}

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

std::vector<ScenarioConfig> parse_scenario_text(const std::string& text,
                                                const std::string& base_dir) {
  std::vector<ScenarioConfig> out;
  std::istringstream in(text);
  std::string line;
  bool in_scenario = false;
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty() || line[0] == '#') continue;
    if (line == "[scenario]") {
      out.emplace_back();
      in_scenario = true;
      continue;
    }
    if (line.front() == '[') throw ConfigError("unknown section: " + line);
    if (!in_scenario) throw ConfigError("key outside a [scenario] section: " + line);
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("bad config line: " + line);
    apply_key(out.back(), trim(line.substr(0, eq)), trim(line.substr(eq + 1)), base_dir);
  }
  if (out.empty()) throw ConfigError("config defines no scenarios");
  for (auto& c : out) {
    if (c.group.empty()) {
      c.group = to_string(c.domain) + ":" + std::filesystem::path(c.map_path).filename().string() +
                ":" + c.mode;
    }
    validate_config(c);
  }
  std::set<std::string> ids;
  for (const auto& c : out) {
    if (!ids.insert(c.id).second) throw ConfigError("duplicate scenario id: " + c.id);
  }
  return out;
}

std::vector<ScenarioConfig> parse_scenario_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_scenario_text(buf.str(), std::filesystem::path(path).parent_path().string());
}

std::unique_ptr<GoalPomdpModel> build_domain(const ScenarioConfig& c) {
  const NavMode mode = c.mode == "info_gathering" ? NavMode::info_gathering : NavMode::goal_directed;
  const NavHeuristic heur =
      c.heuristic == "euclidean" ? NavHeuristic::euclidean : NavHeuristic::dist_optimistic;
  switch (c.domain) {
    case DomainId::line_world:
      return line_world();
    case DomainId::indoor_slip:
      return indoor_stochastic_model(c.map_path, heur);
    case DomainId::indoor_start:
      return indoor_start_uncertainty_model(c.map_path, mode, heur);
    case DomainId::outdoor:
      return outdoor_model(c.map_path, mode, heur);
    case DomainId::contact_toy: {
      auto model = std::make_unique<ContactToyModel>(default_contact_world());
      model->set_alpha(c.alpha);
      return model;
    }
    case DomainId::contact_planted:
      return planted_partition_model(100, {{40, 30, 20, 10}, {70, 30}, {25, 25, 25, 25}}, c.alpha);
  }
  throw ConfigError("unreachable domain id");
}

RunRecord execute_run(const ScenarioConfig& c, std::uint64_t seed) {
  RunRecord rec;
  rec.scenario_id = c.id;
  rec.group = c.group;
  rec.domain = to_string(c.domain);
  rec.planner = to_string(c.planner);
  rec.estimator = c.estimator;
  rec.seed = seed;
  rec.cost_mode = c.cost_mode;

  const auto model = build_domain(c);
  const Heuristics heuristics = default_heuristics(*model);

  SolverConfig scfg;
  scfg.residual_tolerance = c.eps_res;
  scfg.heuristic_inflation = c.eps_inflate;
  scfg.seed = seed;
  scfg.max_trials = c.max_trials;
  scfg.max_expansions = c.max_expansions;
  scfg.timeout_seconds = c.timeout_s;
  scfg.query_delay_us = c.query_delay_us;
  scfg.eager_validation = c.validation == "eager";
  scfg.fh_cold_restart = c.fh_cold_restart;

  std::unique_ptr<QEstimator> estimator;
  if (c.estimator != "none") {
    EstimatorConfig ecfg;
    ecfg.kind = estimator_kind_from_string(c.estimator);
    ecfg.delta_fraction = c.delta_fraction;
    ecfg.alpha = c.alpha;
    ecfg.kappa = c.kappa;
    ecfg.sampling_budget = c.budget;
    ecfg.seed = seed;
    estimator = std::make_unique<QEstimator>(ecfg, heuristics);
  }

  SolverResult result;
  switch (c.planner) {
    case PlannerId::rtdp_bel:
      result = solve(SolverKind::rtdp_bel, *model, heuristics, nullptr, scfg);
      break;
    case PlannerId::lazy_rtdp_bel:
      result = solve(SolverKind::lazy_rtdp_bel, *model, heuristics, estimator.get(), scfg);
      break;
    case PlannerId::lao_star:
      result = solve(SolverKind::lao_star, *model, heuristics, nullptr, scfg);
      break;
    case PlannerId::lazy_lao_star:
      result = solve(SolverKind::lazy_lao_star, *model, heuristics, estimator.get(), scfg);
      break;
    case PlannerId::fh_lazy_rtdp_bel:
      result = fh_lazy(SolverKind::lazy_rtdp_bel, *model, heuristics, estimator.get(), scfg);
      break;
    case PlannerId::fh_lazy_lao_star:
      result = fh_lazy(SolverKind::lazy_lao_star, *model, heuristics, estimator.get(), scfg);
      break;
  }

  rec.success = result.converged;
  rec.wall_time_s = result.wall_time_seconds;
  rec.value_b0 = result.value_b0;
  rec.ledger = result.ledger;
  rec.trials = result.trials;
  rec.expansions = result.expansions;

  if (result.converged && !result.policy.root_is_goal) {
    if (c.cost_mode == "exact") {
      rec.policy_cost = evaluate_policy(result.policy, *model, EvalMode::exact);
    } else {
      rec.policy_cost =
          evaluate_policy(result.policy, *model, EvalMode::monte_carlo, c.mc_samples, seed);
    }
    rec.policy_cost_defined = true;
  } else if (result.converged) {
    rec.policy_cost = 0.0;
    rec.policy_cost_defined = true;
  }
  return rec;
}

std::string runs_csv_header() {
  return "scenario,group,domain,solver,estimator,seed,success,v_b0,policy_cost,cost_mode,"
         "transition_queries,observation_queries,validity_queries,belief_transitions_computed,"
         "trials,expansions,wall_time_s";
}

std::string to_csv_row(const RunRecord& r) {
  std::ostringstream out;
  out << r.scenario_id << ',' << r.group << ',' << r.domain << ',' << r.planner << ','
      << r.estimator << ',' << r.seed << ',' << (r.success ? 1 : 0) << ','
      << format_double(r.value_b0) << ','
      << (r.policy_cost_defined ? format_double(r.policy_cost) : "") << ',' << r.cost_mode << ','
      << r.ledger.transition_queries << ',' << r.ledger.observation_queries << ','
      << r.ledger.validity_queries << ',' << r.ledger.belief_transitions_computed << ','
      << r.trials << ',' << r.expansions << ',' << format_double(r.wall_time_s);
  return out.str();
}

namespace {

struct Aggregate {
  std::string scenario_id;
  std::string group;
  std::string domain;
  std::string planner;
  std::string estimator;
  std::int64_t runs = 0;
  std::int64_t successes = 0;
  bool eligible = false;       // success rate >= 0.2
  bool has_averages = false;   // averages over the group intersection
  double mean_wall = 0.0;
  double mean_cost = 0.0;
  double mean_v = 0.0;
  double mean_transitions = 0.0;
  double mean_observations = 0.0;
  double mean_validity = 0.0;
  double mean_belief_transitions = 0.0;
};

}  // namespace

MatrixResult run_matrix(const std::vector<ScenarioConfig>& configs, int workers) {
  struct Task {
    std::size_t config_index;
    std::uint64_t seed;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    for (std::uint64_t seed : configs[i].seeds) tasks.push_back({i, seed});
  }

  MatrixResult result;
  result.runs.resize(tasks.size());
  std::atomic<std::size_t> next{0};
  std::vector<std::string> errors(tasks.size());

  auto worker = [&]() {
    for (;;) {
      const std::size_t t = next.fetch_add(1);
      if (t >= tasks.size()) return;
      const ScenarioConfig& cfg = configs[tasks[t].config_index];
      try {
        result.runs[t] = execute_run(cfg, tasks[t].seed);
      } catch (const std::exception& e) {
        RunRecord rec;
        rec.scenario_id = cfg.id;
        rec.group = cfg.group;
        rec.domain = to_string(cfg.domain);
        rec.planner = to_string(cfg.planner);
        rec.estimator = cfg.estimator;
        rec.seed = tasks[t].seed;
        rec.success = false;
        rec.cost_mode = cfg.cost_mode;
        result.runs[t] = rec;
        errors[t] = e.what();
      }
    }
  };

  workers = std::max(1, workers);
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < workers; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  std::ostringstream runs_csv;
  runs_csv << runs_csv_header() << '\n';
  for (const auto& rec : result.runs) runs_csv << to_csv_row(rec) << '\n';
  result.runs_csv = runs_csv.str();

  // Aggregation. Per group: planners with success rate >= 0.2 are eligible;
  // time/cost averages run over the seeds every eligible planner solved.
  std::map<std::string, std::vector<const RunRecord*>> by_scenario;
  std::vector<std::string> scenario_order;
  for (const auto& rec : result.runs) {
    if (!by_scenario.count(rec.scenario_id)) scenario_order.push_back(rec.scenario_id);
    by_scenario[rec.scenario_id].push_back(&rec);
  }

  std::map<std::string, Aggregate> aggregates;
  std::map<std::string, std::vector<std::string>> group_members;
  for (const std::string& sid : scenario_order) {
    const auto& runs = by_scenario[sid];
    Aggregate agg;
    agg.scenario_id = sid;
    agg.group = runs.front()->group;
    agg.domain = runs.front()->domain;
    agg.planner = runs.front()->planner;
    agg.estimator = runs.front()->estimator;
    agg.runs = static_cast<std::int64_t>(runs.size());
    for (const RunRecord* r : runs) agg.successes += r->success ? 1 : 0;
    agg.eligible = agg.runs > 0 && static_cast<double>(agg.successes) >=
                                       0.2 * static_cast<double>(agg.runs);
    aggregates.emplace(sid, agg);
    group_members[agg.group].push_back(sid);
  }

  for (auto& [group, members] : group_members) {
    // Intersection of successful seeds across eligible members.
    std::set<std::uint64_t> intersection;
    bool first = true;
    for (const std::string& sid : members) {
      if (!aggregates.at(sid).eligible) continue;
      std::set<std::uint64_t> ok;
      for (const RunRecord* r : by_scenario[sid]) {
        if (r->success) ok.insert(r->seed);
      }
      if (first) {
        intersection = std::move(ok);
        first = false;
      } else {
        std::set<std::uint64_t> merged;
        std::set_intersection(intersection.begin(), intersection.end(), ok.begin(), ok.end(),
                              std::inserter(merged, merged.begin()));
        intersection = std::move(merged);
      }
    }
    for (const std::string& sid : members) {
      Aggregate& agg = aggregates.at(sid);
      if (!agg.eligible || intersection.empty()) continue;
      double n = 0.0;
      for (const RunRecord* r : by_scenario[sid]) {
        if (!intersection.count(r->seed)) continue;
        n += 1.0;
        agg.mean_wall += r->wall_time_s;
        agg.mean_cost += r->policy_cost;
        agg.mean_v += r->value_b0;
        agg.mean_transitions += static_cast<double>(r->ledger.transition_queries);
        agg.mean_observations += static_cast<double>(r->ledger.observation_queries);
        agg.mean_validity += static_cast<double>(r->ledger.validity_queries);
        agg.mean_belief_transitions += static_cast<double>(r->ledger.belief_transitions_computed);
      }
      if (n > 0.0) {
        agg.mean_wall /= n;
        agg.mean_cost /= n;
        agg.mean_v /= n;
        agg.mean_transitions /= n;
        agg.mean_observations /= n;
        agg.mean_validity /= n;
        agg.mean_belief_transitions /= n;
        agg.has_averages = true;
      }
    }
  }

  std::ostringstream summary;
  summary << "scenario,group,domain,solver,estimator,runs,successes,success_rate,eligible,"
             "mean_cost,mean_v_b0,mean_transition_queries,mean_observation_queries,"
             "mean_validity_queries,mean_belief_transitions_computed,mean_wall_time_s\n";
  for (const std::string& sid : scenario_order) {
    const Aggregate& a = aggregates.at(sid);
    summary << a.scenario_id << ',' << a.group << ',' << a.domain << ',' << a.planner << ','
            << a.estimator << ',' << a.runs << ',' << a.successes << ','
            << format_double(static_cast<double>(a.successes) / static_cast<double>(a.runs)) << ','
            << (a.eligible ? 1 : 0) << ',';
    if (a.has_averages) {
      summary << format_double(a.mean_cost) << ',' << format_double(a.mean_v) << ','
              << format_double(a.mean_transitions) << ',' << format_double(a.mean_observations)
              << ',' << format_double(a.mean_validity) << ','
              << format_double(a.mean_belief_transitions) << ',' << format_double(a.mean_wall);
    } else {
      summary << ",,,,,,";
    }
    summary << '\n';
  }
  result.summary_csv = summary.str();
  return result;
}

std::string strip_wall_time_columns(const std::string& csv) {
  std::istringstream in(csv);
  std::ostringstream out;
  std::string line;
  while (std::getline(in, line)) {
    // wall time is always the final column
    const auto comma = line.rfind(',');
    out << (comma == std::string::npos ? line : line.substr(0, comma)) << '\n';
  }
  return out.str();
}

}  // namespace bsp
