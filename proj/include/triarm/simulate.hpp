// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "triarm/trial.hpp"

namespace triarm::sim {

enum class Family { normal, lognormal_std, chisq_std, poisson, negbin };

const char* family_name(Family f);

/// Marginal distribution of one arm with target mean `mu` and variance
/// `sigma_sq`. The skewed continuous families draw from a fixed base law
/// (lognormal(0,1), chi-squared with 2 df), standardize it, and rescale
/// to the target moments. Count families require sigma_sq = kappa * mu.
struct ArmSpec {
  Family family = Family::normal;
  double mu = 0.0;
  double sigma_sq = 1.0;
  double kappa = 1.0;  // count families: variance-to-mean ratio >= 1

  void validate() const;  // throws InvalidFamilyParams
};

/// Allocation ratio n_E : n_R : n_P.
struct Allocation {
  unsigned e = 1;
  unsigned r = 1;
  unsigned p = 1;

  unsigned total() const { return e + r + p; }
  std::string label() const;
  /// Group sizes for total sample size n; throws AllocationMismatch
  /// unless the ratio divides n.
  std::array<std::size_t, 3> sizes_for(std::size_t n) const;
};

Allocation parse_allocation(const std::string& text);

/// One cell of a simulation grid.
struct ScenarioSpec {
  std::string id;
  ArmSpec arm_e, arm_r, arm_p;
  std::array<std::size_t, 3> sizes{};
  double delta = 0.8;
  double alpha = 0.025;
  std::vector<TestVariant> tests{TestVariant::permutation,
                                 TestVariant::wald_normal,
                                 TestVariant::wald_t};
  std::uint64_t replications = 25000;
  std::uint64_t permutations = 15000;
  std::uint64_t seed = 0;
  /// Permutation test: 0 keeps it Monte-Carlo; raise to allow exact
  /// enumeration for tiny groups.
  std::uint64_t exact_threshold = 0;

  void validate() const;
};

/// Rejection tally for one test within a scenario. `rate` uses the
/// non-skipped denominator; `mc_error` is the binomial standard error
/// sqrt(alpha*(1-alpha)/replications) at the nominal level.
struct TestRate {
  TestVariant test = TestVariant::permutation;
  std::uint64_t rejections = 0;
  std::uint64_t skipped = 0;
  double rate = 0.0;
  double mc_error = 0.0;
};

struct SimulationResult {
  ScenarioSpec scenario;
  std::uint64_t replications = 0;
  std::vector<TestRate> rates;
};

/// Null-boundary mean for the experimental arm:
/// mu_E = delta*mu_R + (1-delta)*mu_P.
double boundary_mean(double mu_r, double mu_p, double delta);

/// n draws from the arm's marginal distribution.
std::vector<double> draw_arm(const ArmSpec& spec, std::size_t n,
                             std::mt19937_64& rng);

/// Runs every replication of a scenario: draw a trial, apply each
/// configured test, tally rejections. Deterministic given scenario.seed,
/// independent of `threads`. Replications where a test errors (e.g.
/// degenerate variance) count into that test's `skipped`.
SimulationResult run_scenario(const ScenarioSpec& scenario,
                              std::size_t threads = 0);

struct GridOptions {
  std::uint64_t replications = 25000;
  std::uint64_t permutations = 15000;
  std::uint64_t seed = 0;
  std::vector<double> mu_r_values;          // empty = 0.5, 1, ..., 5
  std::vector<Allocation> allocations;      // empty = 1:1:1, 2:2:1, 3:2:1
  std::vector<TestVariant> tests{TestVariant::permutation,
                                 TestVariant::wald_normal,
                                 TestVariant::wald_t};
};

/// The continuous-data grid: delta 0.8, mu_P 5.5, n = 30, variance
/// patterns (1,1,1) and (1,2,3), families normal / lognormal-std /
/// chisq-std. 180 scenarios at the defaults.
std::vector<ScenarioSpec> continuous_grid(const GridOptions& options = {});

/// The count-data grid: delta 0.8, mu_P 5.5, n = 60, kappa in {1, 3}
/// (Poisson resp. negative binomial). 60 scenarios at the defaults.
std::vector<ScenarioSpec> count_grid(const GridOptions& options = {});

/// Both built-in grids concatenated.
std::vector<ScenarioSpec> builtin_grids(const GridOptions& options = {});

/// Re-runs one scenario at several total sample sizes (the level-vs-n
/// study). Throws AllocationMismatch when the ratio does not divide an n.
std::vector<SimulationResult> level_vs_n_sweep(
    const ScenarioSpec& base, const Allocation& allocation,
    const std::vector<std::size_t>& n_values, std::size_t threads = 0);

}  // namespace triarm::sim
