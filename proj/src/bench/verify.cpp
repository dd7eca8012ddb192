#include "bsp/bench/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <memory>
#include <sstream>

#include "bsp/domains/contact.hpp"
#include "bsp/domains/indoor.hpp"
#include "bsp/domains/line_world.hpp"
#include "bsp/domains/outdoor.hpp"
#include "bsp/oracle.hpp"
#include "bsp/solvers.hpp"

namespace bsp {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_s(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(10);
  out << v;
  return out.str();
}

SolverConfig base_config(std::uint64_t seed) {
  SolverConfig cfg;
  cfg.residual_tolerance = 1e-9;
  cfg.seed = seed;
  cfg.timeout_seconds = 120.0;
  return cfg;
}

QEstimator make_qmdp(const Heuristics& h, std::uint64_t seed) {
  EstimatorConfig cfg;
  cfg.kind = EstimatorKind::qmdp;
  cfg.seed = seed;
  return QEstimator(cfg, h);
}

struct Fixture {
  std::string name;
  std::unique_ptr<GoalPomdpModel> model;
};

std::vector<Fixture> enumerable_fixtures(const std::string& dir) {
  std::vector<Fixture> out;
  out.push_back({"line_world", line_world()});
  out.push_back({"indoor5_slip", indoor_stochastic_model(dir + "/indoor5_slip.map")});
  out.push_back({"indoor5_start",
                 indoor_start_uncertainty_model(dir + "/indoor5_start.map", NavMode::goal_directed)});
  return out;
}

// Criteria 1 and 3: all four planners converge to the exhaustive
// value-iteration optimum on every enumerable fixture, and the lazy/vanilla
// policy pairs (under the conservative Q^MDP estimator) have equal exact
// expected costs.
SuiteReport oracle_equivalence(const std::string& dir) {
  SuiteReport report{"oracle-equivalence", {}};
  const auto t0 = Clock::now();

  auto fixtures = enumerable_fixtures(dir);
  fixtures.push_back({"indoor15_slip", indoor_stochastic_model(dir + "/indoor15_slip.map")});

  for (const auto& fixture : fixtures) {
    const GoalPomdpModel& model = *fixture.model;
    const Heuristics h = default_heuristics(model);
    const double v_star = value_iterate(enumerate_belief_mdp(model)).value_b0;

    SolverConfig cfg = base_config(1);
    cfg.check_monotone_backups = true;

    std::vector<std::pair<std::string, SolverResult>> results;
    results.emplace_back("rtdp_bel", rtdp_bel(model, h, cfg));
    results.emplace_back("lao_star", lao_star(model, h, cfg));
    {
      QEstimator est = make_qmdp(h, 1);
      results.emplace_back("lazy_rtdp_bel", lazy_rtdp_bel(model, h, est, cfg));
    }
    {
      QEstimator est = make_qmdp(h, 1);
      results.emplace_back("lazy_lao_star", lazy_lao_star(model, h, est, cfg));
    }

    const bool is_5x5 = fixture.name != "indoor15_slip";
    for (const auto& [solver, res] : results) {
      if (is_5x5) {
        CheckResult check;
        check.name = "criterion1/" + fixture.name + "/" + solver;
        check.passed = res.converged && std::abs(res.value_b0 - v_star) <= 1e-6 &&
                       res.monotone_violations == 0;
        check.detail = "V(b0)=" + fmt(res.value_b0) + " V*=" + fmt(v_star) +
                       (res.converged ? "" : " (not converged)");
        report.checks.push_back(check);
      }
    }

    // Criterion 3: exact policy costs of the lazy and vanilla planners agree.
    const double cost_rtdp = evaluate_policy(results[0].second.policy, model, EvalMode::exact);
    const double cost_lao = evaluate_policy(results[1].second.policy, model, EvalMode::exact);
    const double cost_lazy_rtdp = evaluate_policy(results[2].second.policy, model, EvalMode::exact);
    const double cost_lazy_lao = evaluate_policy(results[3].second.policy, model, EvalMode::exact);
    CheckResult c3;
    c3.name = "criterion3/" + fixture.name;
    c3.passed = std::abs(cost_rtdp - cost_lazy_rtdp) <= 1e-6 &&
                std::abs(cost_lao - cost_lazy_lao) <= 1e-6;
    c3.detail = "rtdp=" + fmt(cost_rtdp) + " lazy_rtdp=" + fmt(cost_lazy_rtdp) +
                " lao=" + fmt(cost_lao) + " lazy_lao=" + fmt(cost_lazy_lao);
    report.checks.push_back(c3);
  }

  CheckResult timing;
  timing.name = "criterion1/runtime";
  const double secs = elapsed_s(t0);
  timing.passed = secs < 60.0;
  timing.detail = fmt(secs) + " s (< 60 s)";
  report.checks.push_back(timing);
  return report;
}

// Criterion 2: per-seed counter dominance and a >= 2x median saving on the
// committed 15x15 stochastic fixture.
SuiteReport laziness_counters(const std::string& dir) {
  SuiteReport report{"laziness-counters", {}};
  const auto model = indoor_stochastic_model(dir + "/indoor15_slip.map");
  const Heuristics h = default_heuristics(*model);

  bool dominance = true;
  std::vector<double> rtdp_ratios;
  std::vector<double> lao_ratios;
  std::string worst;
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    SolverConfig cfg = base_config(seed);
    const auto vanilla_rtdp = rtdp_bel(*model, h, cfg);
    QEstimator est1 = make_qmdp(h, seed);
    const auto lazy_rtdp = lazy_rtdp_bel(*model, h, est1, cfg);
    const auto vanilla_lao = lao_star(*model, h, cfg);
    QEstimator est2 = make_qmdp(h, seed);
    const auto lazy_lao = lazy_lao_star(*model, h, est2, cfg);

    const auto v1 = vanilla_rtdp.ledger.belief_transitions_computed;
    const auto l1 = lazy_rtdp.ledger.belief_transitions_computed;
    const auto v2 = vanilla_lao.ledger.belief_transitions_computed;
    const auto l2 = lazy_lao.ledger.belief_transitions_computed;
    if (!vanilla_rtdp.converged || !lazy_rtdp.converged || !vanilla_lao.converged ||
        !lazy_lao.converged || l1 > v1 || l2 > v2) {
      dominance = false;
      worst = "seed " + std::to_string(seed);
    }
    rtdp_ratios.push_back(static_cast<double>(v1) / static_cast<double>(l1));
    lao_ratios.push_back(static_cast<double>(v2) / static_cast<double>(l2));
  }

  auto median = [](std::vector<double> v) {
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
  };
  const double med_rtdp = median(rtdp_ratios);
  const double med_lao = median(lao_ratios);

  CheckResult dom;
  dom.name = "criterion2/per-seed-dominance";
  dom.passed = dominance;
  dom.detail = dominance ? "lazy <= vanilla on all 20 seeds, both families"
                         : "violated at " + worst;
  report.checks.push_back(dom);

  CheckResult med;
  med.name = "criterion2/median-ratio";
  med.passed = med_rtdp >= 2.0 && med_lao >= 2.0;
  med.detail = "median vanilla/lazy: rtdp=" + fmt(med_rtdp) + " lao=" + fmt(med_lao) + " (>= 2.0)";
  report.checks.push_back(med);
  return report;
}

// Criteria 4 and 5 on the planted-partition contact fixture, plus the
// Q^MDP admissibility invariant on the enumerable navigation fixtures.
SuiteReport estimator_stats(const std::string& dir) {
  SuiteReport report{"estimator-stats", {}};
  const auto t0 = Clock::now();

  const auto model = planted_partition_model(100, {{40, 30, 20, 10}, {70, 30}, {25, 25, 25, 25}});
  const Heuristics h = default_heuristics(*model);
  const BeliefState b0 = model->initial_belief();
  const BeliefKey key = make_key(b0);
  QueryLedger ledger;
  ModelView view(*model, ledger);

  std::vector<double> exact(3);
  for (ActionId a = 0; a < 3; ++a) exact[static_cast<std::size_t>(a)] = q_init_exact(b0, a, view, h);

  constexpr int kDraws = 10000;

  // Criterion 4: empirical mean of the entropy-corrected estimator vs the
  // exact Q_init, on the first planted action.
  {
    double sum = 0.0, sumsq = 0.0;
    for (int i = 0; i < kDraws; ++i) {
      EstimatorConfig cfg;
      cfg.kind = EstimatorKind::entropy_corrected;
      cfg.seed = static_cast<std::uint64_t>(i);
      QEstimator est(cfg, h);
      const double v = est.estimate(b0, key, 0, view);
      sum += v;
      sumsq += v * v;
    }
    const double mean = sum / kDraws;
    const double var = std::max(0.0, sumsq / kDraws - mean * mean);
    const double se = std::sqrt(var / kDraws);
    CheckResult c4;
    c4.name = "criterion4/entropy-mean";
    c4.passed = std::abs(mean - exact[0]) <= 2.0 * se;
    c4.detail = "mean=" + fmt(mean) + " exact=" + fmt(exact[0]) + " |diff|=" +
                fmt(std::abs(mean - exact[0])) + " 2se=" + fmt(2.0 * se);
    report.checks.push_back(c4);
  }

  // Criterion 5: PCE conservative with 95% confidence.
  {
    int conservative = 0;
    for (int i = 0; i < kDraws; ++i) {
      const ActionId a = static_cast<ActionId>(i % 3);
      EstimatorConfig cfg;
      cfg.kind = EstimatorKind::pce;
      cfg.seed = static_cast<std::uint64_t>(i);
      QEstimator est(cfg, h);
      if (est.estimate(b0, key, a, view) <= exact[static_cast<std::size_t>(a)] + 1e-12) {
        ++conservative;
      }
    }
    const double frac = static_cast<double>(conservative) / kDraws;
    const double sigma = std::sqrt(0.95 * 0.05 / kDraws);
    CheckResult c5;
    c5.name = "criterion5/pce-confidence";
    c5.passed = frac >= 0.95 - 3.0 * sigma;
    c5.detail = "fraction=" + fmt(frac) + " threshold=" + fmt(0.95 - 3.0 * sigma);
    report.checks.push_back(c5);
  }

  CheckResult timing;
  timing.name = "criterion4/runtime";
  const double secs = elapsed_s(t0);
  timing.passed = secs < 30.0;
  timing.detail = fmt(secs) + " s (< 30 s)";
  report.checks.push_back(timing);

  // Q^MDP admissibility against the brute-force Q* oracle.
  {
    bool admissible = true;
    std::string where;
    for (const auto& fixture : enumerable_fixtures(dir)) {
      const Heuristics hf = default_heuristics(*fixture.model);
      const auto enumerated = enumerate_belief_mdp(*fixture.model);
      const auto oracle = value_iterate(enumerated);
      QueryLedger lf;
      ModelView vf(*fixture.model, lf);
      for (std::size_t i = 0; i < enumerated.size() && admissible; ++i) {
        for (std::size_t j = 0; j < enumerated.actions[i].size(); ++j) {
          const double qmdp =
              q_hat_qmdp(enumerated.beliefs[i], enumerated.actions[i][j].action, vf, hf);
          if (qmdp > oracle.q_values[i][j] + 1e-9) {
            admissible = false;
            where = fixture.name + " belief " + std::to_string(i);
            break;
          }
        }
      }
    }
    CheckResult adm;
    adm.name = "invariant/qmdp-admissible";
    adm.passed = admissible;
    adm.detail = admissible ? "Q^MDP <= Q* on every enumerable (b,a)" : "violated at " + where;
    report.checks.push_back(adm);
  }
  return report;
}

// Criterion 6: full-horizon laziness on the outdoor fixture.
SuiteReport fh_correctness(const std::string& dir) {
  SuiteReport report{"fh-correctness", {}};
  const auto model = outdoor_model(dir + "/outdoor.map", NavMode::goal_directed);
  const auto* outdoor = dynamic_cast<const OutdoorModel*>(model.get());
  const Heuristics h = default_heuristics(*model);

  SolverConfig cfg = base_config(1);

  QEstimator est_fh = make_qmdp(h, 1);
  const SolverResult fh = fh_lazy(SolverKind::lazy_lao_star, *model, h, &est_fh, cfg);

  SolverConfig eager_cfg = cfg;
  eager_cfg.eager_validation = true;
  QEstimator est_eager = make_qmdp(h, 1);
  const SolverResult eager = lazy_lao_star(*model, h, est_eager, eager_cfg);

  CheckResult conv;
  conv.name = "criterion6/converged";
  conv.passed = fh.converged && eager.converged;
  conv.detail = std::string("fh=") + (fh.converged ? "yes" : "no") + " eager=" +
                (eager.converged ? "yes" : "no") + " fh_outer=" +
                std::to_string(fh.fh_outer_iterations);
  report.checks.push_back(conv);
  if (!conv.passed) return report;

  // Exhaustive re-validation of the final policy.
  std::int64_t invalid = 0;
  for (const auto& key : fh.policy.order) {
    const PolicyNode& node = fh.policy.nodes.at(key);
    for (const auto& [s, p] : node.belief.particles) {
      if (!outdoor->state_action_valid(s, node.action)) ++invalid;
    }
  }
  CheckResult valid;
  valid.name = "criterion6/policy-valid";
  valid.passed = invalid == 0;
  valid.detail = std::to_string(invalid) + " invalid actions under exhaustive validation";
  report.checks.push_back(valid);

  const double cost_fh = evaluate_policy(fh.policy, *model, EvalMode::exact);
  const double cost_eager = evaluate_policy(eager.policy, *model, EvalMode::exact);
  CheckResult cost;
  cost.name = "criterion6/cost-equality";
  cost.passed = std::abs(cost_fh - cost_eager) <= 1e-6;
  cost.detail = "fh=" + fmt(cost_fh) + " eager=" + fmt(cost_eager);
  report.checks.push_back(cost);

  CheckResult savings;
  savings.name = "criterion6/validity-savings";
  savings.passed = fh.ledger.validity_queries * 2 <= eager.ledger.validity_queries;
  savings.detail = "fh=" + std::to_string(fh.ledger.validity_queries) + " eager=" +
                   std::to_string(eager.ledger.validity_queries) + " (fh <= 0.5x eager)";
  report.checks.push_back(savings);
  return report;
}

}  // namespace

std::vector<std::string> verify_suite_ids() {
  return {"oracle-equivalence", "laziness-counters", "estimator-stats", "fh-correctness"};
}

SuiteReport verify_acceptance(const std::string& suite_id, const std::string& fixture_dir) {
  if (suite_id == "oracle-equivalence") return oracle_equivalence(fixture_dir);
  if (suite_id == "laziness-counters") return laziness_counters(fixture_dir);
  if (suite_id == "estimator-stats") return estimator_stats(fixture_dir);
  if (suite_id == "fh-correctness") return fh_correctness(fixture_dir);
  throw ConfigError("unknown verify suite: " + suite_id);
}

std::string format_report(const SuiteReport& report) {
  std::ostringstream out;
  for (const auto& check : report.checks) {
    out << (check.passed ? "PASS" : "FAIL") << ' ' << check.name;
    if (!check.detail.empty()) out << "  [" << check.detail << ']';
    out << '\n';
  }
  out << (report.passed() ? "SUITE PASS " : "SUITE FAIL ") << report.suite << '\n';
  return out.str();
}

}  // namespace bsp
