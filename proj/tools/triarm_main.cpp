// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

// Command-line front end: analyze a trial CSV, run the simulation grids,
// or print expected negative-binomial bin counts.

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "triarm/io.hpp"
#include "triarm/kernels.hpp"
#include "triarm/parallel.hpp"
#include "triarm/permutation.hpp"
#include "triarm/rng.hpp"
#include "triarm/simulate.hpp"
#include "triarm/special_math.hpp"
#include "triarm/trial.hpp"
#include "triarm/wald.hpp"

namespace {

using nlohmann::ordered_json;
using namespace triarm;

// Exit codes: 0 success, 2 usage, 3 file/parse, 4 validation, 5 numeric.
int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::file_not_found:
    case ErrorCode::parse_error:
      return 3;
    case ErrorCode::too_few_observations:
    case ErrorCode::non_finite_input:
    case ErrorCode::empty_arm:
    case ErrorCode::invalid_family_params:
    case ErrorCode::allocation_mismatch:
      return 4;
    case ErrorCode::unknown_selector:
      return 2;
    default:
      return 5;
  }
}

std::string hypothesis_label(double delta) {
  return delta < 1.0 ? "non-inferiority" : "superiority";
}

std::vector<TestVariant> parse_tests_or_throw(
    const std::vector<std::string>& names) {
  std::vector<TestVariant> tests;
  for (const auto& name : names) {
    const auto variant = parse_test_variant(name);
    if (!variant) {
      throw Error(ErrorCode::unknown_selector, "unknown test '" + name + "'");
    }
    tests.push_back(*variant);
  }
  if (tests.empty()) {
    tests = {TestVariant::permutation, TestVariant::wald_normal,
             TestVariant::wald_t};
  }
  return tests;
}

struct AnalyzeOptions {
  std::string input;
  double delta = 0.8;
  double alpha = 0.025;
  std::vector<std::string> tests;
  std::uint64_t permutations = 15000;
  std::uint64_t seed = 0;
  std::uint64_t exact_threshold = 200000;
  std::size_t threads = 0;
  std::string format = "human";
  std::string output;
};

ordered_json outcome_to_json(const TestOutcome& outcome) {
  ordered_json j;
  j["test"] = test_variant_name(outcome.variant);
  j["statistic"] = outcome.statistic;
  j["critical_value"] = outcome.critical_value;
  j["p_value"] = outcome.p_value;
  j["reject"] = outcome.reject;
  if (outcome.df) j["df"] = *outcome.df;
  if (outcome.distribution) {
    const auto& meta = *outcome.distribution;
    ordered_json d;
    d["mode"] = meta.mode == DistributionMode::exact ? "exact" : "monte-carlo";
    d["draws"] = meta.draws;
    d["skipped"] = meta.skipped;
    if (meta.mode == DistributionMode::monte_carlo) d["seed"] = meta.seed;
    j["distribution"] = d;
  }
  return j;
}

void print_human_analysis(std::ostream& os, const AnalyzeOptions& opt,
                          const TrialData& trial,
                          const std::vector<TestOutcome>& outcomes) {
  const ArmSummary e = summarize_arm(trial.arm_E());
  const ArmSummary r = summarize_arm(trial.arm_R());
  const ArmSummary p = summarize_arm(trial.arm_P());

  os << "trial: " << opt.input << "  (n_E=" << e.count << ", n_R=" << r.count
     << ", n_P=" << p.count << ")\n";
  os << "testing " << hypothesis_label(opt.delta)
     << " with margin delta=" << io::format_double(opt.delta)
     << " at one-sided alpha=" << io::format_double(opt.alpha) << "\n";
  os << "  H0: mu_P - mu_E <= " << io::format_double(opt.delta)
     << "*(mu_P - mu_R)   vs   H1: mu_P - mu_E > "
     << io::format_double(opt.delta) << "*(mu_P - mu_R)\n";
  os << "arm means: E=" << io::format_double(e.mean)
     << " R=" << io::format_double(r.mean) << " P=" << io::format_double(p.mean)
     << "\n\n";

  for (const auto& outcome : outcomes) {
    os << test_variant_name(outcome.variant) << ":\n";
    os << "  statistic      " << io::format_double(outcome.statistic) << "\n";
    os << "  critical value " << io::format_double(outcome.critical_value)
       << "\n";
    os << "  p-value        " << io::format_double(outcome.p_value) << "\n";
    if (outcome.df) {
      os << "  df             " << io::format_double(*outcome.df) << "\n";
    }
    if (outcome.distribution) {
      const auto& meta = *outcome.distribution;
      if (meta.mode == DistributionMode::exact) {
        os << "  distribution   exact, " << meta.draws << " assignments";
      } else {
        os << "  distribution   monte-carlo, B=" << meta.draws
           << ", seed=" << meta.seed;
      }
      if (meta.skipped) os << ", skipped=" << meta.skipped;
      os << "\n";
    }
    os << "  decision       " << (outcome.reject ? "reject H0" : "accept H0")
       << "\n";
  }
}

int run_analyze(const AnalyzeOptions& opt) {
  const TrialData trial = io::read_trial_csv(opt.input);
  const auto tests = parse_tests_or_throw(opt.tests);

  std::vector<TestOutcome> outcomes;
  for (TestVariant variant : tests) {
    TestConfig config;
    config.delta = opt.delta;
    config.alpha = opt.alpha;
    config.variant = variant;
    config.permutations = opt.permutations;
    config.seed = opt.seed;
    config.exact_threshold = opt.exact_threshold;
    config.threads = opt.threads;
    outcomes.push_back(run_test(trial, config));
  }

  std::ostringstream body;
  if (opt.format == "json") {
    ordered_json j;
    j["input"] = opt.input;
    j["delta"] = opt.delta;
    j["alpha"] = opt.alpha;
    j["hypothesis"] = hypothesis_label(opt.delta);
    j["n"] = {{"E", trial.size_E()}, {"R", trial.size_R()},
              {"P", trial.size_P()}};
    const ArmSummary e = summarize_arm(trial.arm_E());
    const ArmSummary r = summarize_arm(trial.arm_R());
    const ArmSummary p = summarize_arm(trial.arm_P());
    j["arms"] = {{"E", {{"mean", e.mean}, {"variance", e.variance}}},
                 {"R", {{"mean", r.mean}, {"variance", r.variance}}},
                 {"P", {{"mean", p.mean}, {"variance", p.variance}}}};
    j["tests"] = ordered_json::array();
    for (const auto& outcome : outcomes) {
      j["tests"].push_back(outcome_to_json(outcome));
    }
    body << j.dump(2) << "\n";
  } else {
    print_human_analysis(body, opt, trial, outcomes);
  }

  if (opt.output.empty() || opt.output == "-") {
    std::cout << body.str();
  } else {
    std::ofstream out(opt.output);
    if (!out) {
      throw Error(ErrorCode::file_not_found, "cannot write " + opt.output);
    }
    out << body.str();
  }
  return 0;
}

struct SimulateOptions {
  std::string selector;
  std::uint64_t replications = 0;  // 0 = keep defaults
  std::uint64_t permutations = 0;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::vector<double> mu_r;
  std::string allocation;
  std::vector<std::string> tests;
  std::string output;
  std::size_t threads = 0;
  // sweep-specific
  std::vector<std::size_t> n_values{30, 60, 120, 240, 480};
  double kappa = 3.0;
  double sweep_mu_r = 1.0;
  double sweep_mu_p = 5.5;
  double delta = 0.8;
  double alpha = 0.025;
};

sim::GridOptions grid_options_from(const SimulateOptions& opt) {
  sim::GridOptions g;
  if (opt.replications) g.replications = opt.replications;
  if (opt.permutations) g.permutations = opt.permutations;
  if (opt.seed_set) g.seed = opt.seed;
  g.mu_r_values = opt.mu_r;
  if (!opt.allocation.empty()) {
    g.allocations = {sim::parse_allocation(opt.allocation)};
  }
  g.tests = parse_tests_or_throw(opt.tests);
  return g;
}

sim::ScenarioSpec sweep_base_scenario(const SimulateOptions& opt) {
  sim::ScenarioSpec s;
  const double mu_e = sim::boundary_mean(opt.sweep_mu_r, opt.sweep_mu_p,
                                         opt.delta);
  const sim::Family family =
      opt.kappa == 1.0 ? sim::Family::poisson : sim::Family::negbin;
  s.arm_e = {family, mu_e, opt.kappa * mu_e, opt.kappa};
  s.arm_r = {family, opt.sweep_mu_r, opt.kappa * opt.sweep_mu_r, opt.kappa};
  s.arm_p = {family, opt.sweep_mu_p, opt.kappa * opt.sweep_mu_p, opt.kappa};
  s.delta = opt.delta;
  s.alpha = opt.alpha;
  s.tests = parse_tests_or_throw(opt.tests);
  s.replications = opt.replications ? opt.replications : 25000;
  s.permutations = opt.permutations ? opt.permutations : 15000;
  s.seed = opt.seed_set ? opt.seed : 0;
  std::ostringstream id;
  id << "sweep-" << sim::family_name(family) << "-k"
     << io::format_double(opt.kappa) << "-muR"
     << io::format_double(opt.sweep_mu_r);
  s.id = id.str();
  return s;
}

sim::ArmSpec arm_spec_from_json(const nlohmann::json& j) {
  sim::ArmSpec arm;
  const std::string family = j.at("family").get<std::string>();
  if (family == "normal") {
    arm.family = sim::Family::normal;
  } else if (family == "lognormal-std") {
    arm.family = sim::Family::lognormal_std;
  } else if (family == "chisq-std") {
    arm.family = sim::Family::chisq_std;
  } else if (family == "poisson") {
    arm.family = sim::Family::poisson;
  } else if (family == "negbin") {
    arm.family = sim::Family::negbin;
  } else {
    throw Error(ErrorCode::invalid_family_params,
                "unknown family '" + family + "'");
  }
  arm.mu = j.at("mu").get<double>();
  arm.kappa = j.value("kappa", 1.0);
  if (arm.family == sim::Family::poisson ||
      arm.family == sim::Family::negbin) {
    arm.sigma_sq = j.value("sigma_sq", arm.kappa * arm.mu);
  } else {
    arm.sigma_sq = j.at("sigma_sq").get<double>();
  }
  return arm;
}

std::vector<sim::ScenarioSpec> scenarios_from_file(
    const SimulateOptions& opt) {
  std::ifstream in(opt.selector);
  if (!in) {
    throw Error(ErrorCode::file_not_found, "cannot open " + opt.selector);
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::parse_error,
                opt.selector + ": " + std::string(e.what()));
  }
  if (!doc.is_array()) {
    throw Error(ErrorCode::parse_error,
                opt.selector + ": expected a JSON array of scenarios");
  }

  std::vector<sim::ScenarioSpec> scenarios;
  std::uint64_t index = 0;
  for (const auto& item : doc) {
    try {
      sim::ScenarioSpec s;
      s.id = item.value("id", "scenario-" + std::to_string(index));
      s.arm_e = arm_spec_from_json(item.at("arms").at("E"));
      s.arm_r = arm_spec_from_json(item.at("arms").at("R"));
      s.arm_p = arm_spec_from_json(item.at("arms").at("P"));
      const auto sizes = item.at("sizes");
      s.sizes = {sizes.at(0).get<std::size_t>(),
                 sizes.at(1).get<std::size_t>(),
                 sizes.at(2).get<std::size_t>()};
      s.delta = item.value("delta", 0.8);
      s.alpha = item.value("alpha", 0.025);
      s.replications = item.value("replications", std::uint64_t{25000});
      s.permutations = item.value("permutations", std::uint64_t{15000});
      s.seed = item.value("seed", std::uint64_t{0});
      s.exact_threshold = item.value("exact_threshold", std::uint64_t{0});
      if (item.contains("tests")) {
        s.tests = parse_tests_or_throw(
            item.at("tests").get<std::vector<std::string>>());
      }
      if (opt.replications) s.replications = opt.replications;
      if (opt.permutations) s.permutations = opt.permutations;
      if (opt.seed_set) s.seed = derive_stream(opt.seed, index);
      s.validate();
      scenarios.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::parse_error,
                  opt.selector + ": scenario " + std::to_string(index) + ": " +
                      std::string(e.what()));
    }
    ++index;
  }
  if (scenarios.empty()) {
    throw Error(ErrorCode::parse_error, opt.selector + ": no scenarios");
  }
  return scenarios;
}

int run_simulate(const SimulateOptions& opt) {
  std::vector<sim::ScenarioSpec> scenarios;
  std::string default_out;

  if (opt.selector == "continuous") {
    scenarios = sim::continuous_grid(grid_options_from(opt));
    default_out = "continuous.csv";
  } else if (opt.selector == "count") {
    scenarios = sim::count_grid(grid_options_from(opt));
    default_out = "count.csv";
  } else if (opt.selector == "sweep") {
    default_out = "sweep.csv";
  } else if (opt.selector.find('.') != std::string::npos ||
             opt.selector.find('/') != std::string::npos) {
    scenarios = scenarios_from_file(opt);
    default_out = "scenarios.csv";
  } else {
    throw Error(ErrorCode::unknown_selector,
                "selector must be continuous, count, sweep or a scenario "
                "file, got '" + opt.selector + "'");
  }

  std::vector<sim::SimulationResult> results;
  if (opt.selector == "sweep") {
    const sim::Allocation allocation =
        opt.allocation.empty() ? sim::Allocation{1, 1, 1}
                               : sim::parse_allocation(opt.allocation);
    results = sim::level_vs_n_sweep(sweep_base_scenario(opt), allocation,
                                    opt.n_values, opt.threads);
  } else {
    results.reserve(scenarios.size());
    for (const auto& scenario : scenarios) {
      results.push_back(sim::run_scenario(scenario, opt.threads));
    }
  }

  const std::string out_path = opt.output.empty() ? default_out : opt.output;
  if (out_path == "-") {
    io::write_simulation_csv(std::cout, results);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      throw Error(ErrorCode::file_not_found, "cannot write " + out_path);
    }
    io::write_simulation_csv(out, results);
    std::cerr << "wrote " << results.size() << " scenario(s) to " << out_path
              << "\n";
  }
  return 0;
}

struct ExpectedCountsOptions {
  double n = 0.0;
  double mean = 0.0;
  double sd = 0.0;
};

int run_expected_counts(const ExpectedCountsOptions& opt) {
  const auto counts =
      smath::nb_expected_counts(opt.n, opt.mean, opt.sd * opt.sd);
  static const char* kBins[] = {"0", "1", "2", "3", ">=4"};
  std::cout << "bin,expected,rounded\n";
  for (int k = 0; k < 5; ++k) {
    std::cout << kBins[k] << ',' << io::format_double(counts[k]) << ','
              << static_cast<long long>(smath::round_half_up(counts[k]))
              << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"studentized permutation and Wald-type tests for three-arm "
               "gold-standard trials"};
  app.require_subcommand(1);

  AnalyzeOptions analyze;
  auto* cmd_analyze = app.add_subcommand(
      "analyze", "run the configured tests on a trial CSV (group,value)");
  cmd_analyze->add_option("--input,-i", analyze.input, "trial CSV file")
      ->required();
  cmd_analyze->add_option("--delta,-d", analyze.delta,
                          "margin; (0,1) non-inferiority, >=1 superiority")
      ->required();
  cmd_analyze->add_option("--alpha,-a", analyze.alpha,
                          "one-sided significance level");
  cmd_analyze->add_option("--test,-t", analyze.tests,
                          "perm, wald-normal or wald-t (repeatable; "
                          "default all)");
  cmd_analyze->add_option("--permutations,-B", analyze.permutations,
                          "Monte-Carlo permutation count");
  cmd_analyze->add_option("--seed,-s", analyze.seed, "permutation seed");
  cmd_analyze->add_option("--exact-threshold", analyze.exact_threshold,
                          "enumerate exactly up to this many assignments");
  cmd_analyze->add_option("--threads", analyze.threads,
                          "worker threads (0 = TRIARM_THREADS or all cores)");
  cmd_analyze->add_option("--format,-f", analyze.format, "human or json")
      ->check(CLI::IsMember({"human", "json"}));
  cmd_analyze->add_option("--output,-o", analyze.output,
                          "output file ('-' = stdout)");

  SimulateOptions simulate;
  auto* cmd_simulate = app.add_subcommand(
      "simulate", "run a type-I-error simulation grid, emitting CSV");
  cmd_simulate->add_option("selector", simulate.selector,
                           "continuous, count, sweep, or a scenario JSON file")
      ->required();
  cmd_simulate->add_option("--reps", simulate.replications,
                           "replications per scenario");
  cmd_simulate->add_option("--permutations,-B", simulate.permutations,
                           "permutations per replication");
  auto* seed_opt =
      cmd_simulate->add_option("--seed,-s", simulate.seed, "master seed");
  cmd_simulate->add_option("--mu-r", simulate.mu_r,
                           "restrict the grid to these reference means")
      ->delimiter(',');
  cmd_simulate->add_option("--allocation", simulate.allocation,
                           "restrict to one allocation, e.g. 2:2:1");
  cmd_simulate->add_option("--tests", simulate.tests,
                           "subset of perm,wald-normal,wald-t")
      ->delimiter(',');
  cmd_simulate->add_option("--out,-o", simulate.output,
                           "output CSV ('-' = stdout; default per selector)");
  cmd_simulate->add_option("--threads", simulate.threads,
                           "worker threads (0 = TRIARM_THREADS or all cores)");
  cmd_simulate->add_option("--n", simulate.n_values,
                           "sweep: total sample sizes")
      ->delimiter(',');
  cmd_simulate->add_option("--kappa", simulate.kappa,
                           "sweep: variance-to-mean ratio");
  cmd_simulate->add_option("--sweep-mu-r", simulate.sweep_mu_r,
                           "sweep: reference mean");
  cmd_simulate->add_option("--sweep-mu-p", simulate.sweep_mu_p,
                           "sweep: placebo mean");
  cmd_simulate->add_option("--delta", simulate.delta, "sweep: margin");
  cmd_simulate->add_option("--alpha", simulate.alpha,
                           "sweep: significance level");

  ExpectedCountsOptions expected;
  auto* cmd_expected = app.add_subcommand(
      "expected-counts",
      "expected negative-binomial counts for bins 0,1,2,3,>=4");
  cmd_expected->add_option("--n", expected.n, "sample size")->required();
  cmd_expected->add_option("--mean", expected.mean, "sample mean")->required();
  cmd_expected->add_option("--sd", expected.sd, "sample standard deviation")
      ->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }
  simulate.seed_set = seed_opt->count() > 0;

  try {
    if (cmd_analyze->parsed()) return run_analyze(analyze);
    if (cmd_simulate->parsed()) return run_simulate(simulate);
    if (cmd_expected->parsed()) return run_expected_counts(expected);
  } catch (const triarm::Error& e) {
    std::cerr << "error (" << error_code_name(e.code()) << "): " << e.what()
              << "\n";
    return exit_code_for(e.code());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
