// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "triarm/trial.hpp"

namespace triarm {

/// Permutation distribution of the studentized statistic. `values` holds
/// the non-degenerate permutation statistics; permutations whose
/// relabeled variance estimator vanished are counted in `skipped`.
struct PermDistribution {
  std::vector<double> values;
  DistributionMode mode = DistributionMode::monte_carlo;
  std::uint64_t permutations = 0;      // Monte-Carlo draws requested (B)
  std::uint64_t seed = 0;              // Monte-Carlo master seed
  std::uint64_t assignment_count = 0;  // exact mode: n!/(n_E! n_R! n_P!)
  std::uint64_t skipped = 0;

  DistributionMeta meta() const {
    return {mode,
            mode == DistributionMode::exact ? assignment_count : permutations,
            skipped, seed};
  }
};

/// Regression coefficients c_{n,i} and studentization weights d_{n,i}
/// (three-block piecewise constants sharing one prefactor). Identities:
/// sum c_i = 0, sum c_i^2 = 1.
struct CoefficientScheme {
  std::vector<double> c;
  std::vector<double> d;
};

/// The four terms of the variance-estimator decomposition
/// W1 - W2^2 - W3^2 - W4^2 over a (relabeled) trial.
struct SigmaDecomposition {
  double w1 = 0.0;
  double w2 = 0.0;
  double w3 = 0.0;
  double w4 = 0.0;

  double value() const { return w1 - w2 * w2 - w3 * w3 - w4 * w4; }
};

/// Statistic for pooled data under an explicit arm labeling. The
/// labeling must assign exactly (n_E, n_R, n_P) elements. Throws
/// DegeneratePermutation when the relabeled variance estimator is zero.
double perm_statistic(std::span<const double> pooled,
                      std::span<const Arm> assignment, double delta);

/// Same, for pooled data already arranged as [E-block | R-block | P-block].
double perm_statistic(std::span<const double> grouped, std::size_t n_e,
                      std::size_t n_r, double delta);

/// Number of distinct group assignments n!/(n_E! n_R! n_P!), or nullopt
/// when it exceeds the uint64 range.
std::optional<std::uint64_t> exact_assignment_count(std::size_t n_e,
                                                    std::size_t n_r,
                                                    std::size_t n_p);

/// B statistics from uniformly random permutations of the pooled vector.
/// Deterministic given (seed, B) and independent of `threads` (each
/// permutation derives its own stream from the master seed).
PermDistribution mc_perm_distribution(const TrialData& trial, double delta,
                                      std::uint64_t permutations,
                                      std::uint64_t seed,
                                      std::size_t threads = 0);

/// One statistic per distinct group assignment. Within-group order does
/// not affect the statistic, so enumerating assignments induces the same
/// distribution as uniform permutations. Throws EnumerationTooLarge when
/// the assignment count exceeds `threshold`.
PermDistribution exact_perm_distribution(const TrialData& trial, double delta,
                                         std::uint64_t threshold);

/// The critical value c_n(alpha): the largest c such that the fraction
/// of permutation statistics strictly below c is at most alpha.
double perm_quantile(const PermDistribution& dist, double alpha);

/// The studentized permutation test. Enumerates exactly when the
/// assignment count is within config.exact_threshold, otherwise samples
/// config.permutations permutations. Rejects when the observed statistic
/// falls below c_n(alpha); the reported p-value uses the add-one rule
/// (1 + #{T* <= T_obs}) / (M + 1).
TestOutcome perm_test(const TrialData& trial, const TestConfig& config);

/// Coefficient scheme for sizes (n_E, n_R, n_P) and margin delta.
CoefficientScheme coefficient_scheme(std::size_t n_e, std::size_t n_r,
                                     std::size_t n_p, double delta);

/// d-weighted decomposition of the variance estimator over a (relabeled)
/// trial; value() equals the d-weighted variance computed from the
/// per-arm sample variances.
SigmaDecomposition sigma_decomposition(const TrialData& relabeled,
                                       double delta);

/// Runs the test selected by config.variant.
TestOutcome run_test(const TrialData& trial, const TestConfig& config);

}  // namespace triarm
