// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>

#include "triarm/kernels.hpp"
#include "triarm/trial.hpp"

namespace triarm {

namespace detail {

/// Mean/variance without validation; callers guarantee n >= 2 and finite
/// input. Same kernel route as summarize_arm, so results are bit-identical.
inline ArmSummary moments_unchecked(const double* x, std::size_t n) {
  const double nd = static_cast<double>(n);
  const double mean = kern::sum(x, n) / nd;
  return {n, mean, kern::sum_sq_dev(x, n, mean) / (nd - 1.0)};
}

struct WaldParts {
  double numerator = 0.0;     // mean_E - delta*mean_R + (delta-1)*mean_P
  double sigma_hat_sq = 0.0;  // variance estimator with w_k = n_k/n
  double statistic = 0.0;     // sqrt(n) * numerator / sigma_hat; NaN if degenerate
};

/// The one evaluation route for the studentized statistic. The
/// permutation engine feeds it relabeled segments of the pooled vector;
/// the identity relabeling therefore reproduces the original statistic
/// exactly.
WaldParts wald_parts(const double* e, std::size_t n_e, const double* r,
                     std::size_t n_r, const double* p, std::size_t n_p,
                     double delta);

}  // namespace detail

/// Pieces of the Wald machinery exposed for reporting.
struct WaldDiagnostics {
  double numerator = 0.0;
  double sigma_hat_sq = 0.0;
  double welch_df = 0.0;
  std::array<double, 3> weights{};  // (w_E, w_R, w_P), summing to 1
};

/// Variance estimator sigma^2 = var_E/w_E + delta^2 var_R/w_R +
/// (1-delta)^2 var_P/w_P with w_k = n_k/n. Throws DegenerateVariance
/// when it vanishes (all three arms constant).
double sigma_hat_sq(const ArmSummary& e, const ArmSummary& r,
                    const ArmSummary& p, double delta);

/// The studentized statistic T_n = sqrt(n) * effect / sigma_hat.
double wald_statistic(const TrialData& trial, double delta);

/// Welch approximation of the degrees of freedom for T_n.
double welch_df(const ArmSummary& e, const ArmSummary& r, const ArmSummary& p,
                double delta);

WaldDiagnostics wald_diagnostics(const TrialData& trial, double delta);

/// The reference-distribution tests: config.variant selects the standard
/// normal or the Welch-t critical value. Rejects when T_n falls below
/// the alpha-quantile; p-value is the reference CDF at T_n.
TestOutcome wald_test(const TrialData& trial, const TestConfig& config);

}  // namespace triarm
