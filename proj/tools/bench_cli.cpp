// Benchmark harness: run scenario matrices, enumerate them, or verify the
// acceptance fixtures.
//
// Exit codes: 0 success, 1 run failures present, 2 config error.

#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "bsp/bench/scenario.hpp"
#include "bsp/bench/verify.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_dir, int workers) {
  const auto configs = bsp::parse_scenario_file(config_path);
  const auto result = bsp::run_matrix(configs, workers);

  std::filesystem::create_directories(out_dir);
  {
    std::ofstream out(out_dir + "/runs.csv");
    out << result.runs_csv;
  }
  {
    std::ofstream out(out_dir + "/summary.csv");
    out << result.summary_csv;
  }
  {
    std::ofstream out(out_dir + "/meta");
    out << "config = " << config_path << '\n';
    out << "workers = " << workers << '\n';
    for (const auto& c : configs) {
      out << "[scenario " << c.id << "]\n";
      out << "  solver = " << bsp::to_string(c.planner) << '\n';
      out << "  estimator = " << c.estimator << '\n';
      out << "  eps_res = " << c.eps_res << '\n';
      out << "  eps_inflate = " << c.eps_inflate << '\n';
      out << "  timeout_s = " << c.timeout_s << '\n';
      out << "  seeds =";
      for (auto s : c.seeds) out << ' ' << s;
      out << '\n';
    }
  }

  std::int64_t failures = 0;
  for (const auto& rec : result.runs) {
    if (!rec.success) ++failures;
  }
  std::cout << result.runs.size() << " runs, " << failures << " failures; results in " << out_dir
            << '\n';
  return failures > 0 ? 1 : 0;
}

int enumerate_command(const std::string& config_path) {
  const auto configs = bsp::parse_scenario_file(config_path);
  std::size_t total = 0;
  for (const auto& c : configs) {
    for (auto seed : c.seeds) {
      std::cout << c.id << " domain=" << bsp::to_string(c.domain)
                << " solver=" << bsp::to_string(c.planner) << " estimator=" << c.estimator
                << " seed=" << seed << '\n';
      ++total;
    }
  }
  std::cout << total << " runs\n";
  return 0;
}

int verify_command(const std::string& suite, const std::string& fixture_dir) {
  const auto report = bsp::verify_acceptance(suite, fixture_dir);
  std::cout << bsp::format_report(report);
  return report.passed() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Goal-POMDP belief-space planning benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir = "out";
  int workers = 1;
  auto* run = app.add_subcommand("run", "execute a scenario matrix");
  run->add_option("config", config_path, "scenario config file")->required();
  run->add_option("--out", out_dir, "output directory");
  run->add_option("--workers", workers, "parallel workers");

  std::string enum_config;
  auto* enumerate = app.add_subcommand("enumerate", "print the expanded matrix without running");
  enumerate->add_option("config", enum_config, "scenario config file")->required();

  std::string suite;
  std::string fixture_dir = "fixtures";
  auto* verify = app.add_subcommand("verify", "run an acceptance suite");
  verify->add_option("suite", suite, "oracle-equivalence | laziness-counters | estimator-stats | fh-correctness")
      ->required();
  verify->add_option("--fixtures", fixture_dir, "fixture directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(config_path, out_dir, workers);
    if (enumerate->parsed()) return enumerate_command(enum_config);
    if (verify->parsed()) return verify_command(suite, fixture_dir);
  } catch (const bsp::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
