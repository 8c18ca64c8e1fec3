// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#include "triarm/wald.hpp"

#include <cmath>
#include <limits>

#include "triarm/special_math.hpp"

namespace triarm {

namespace detail {

WaldParts wald_parts(const double* e, std::size_t n_e, const double* r,
                     std::size_t n_r, const double* p, std::size_t n_p,
                     double delta) {
  const ArmSummary me = moments_unchecked(e, n_e);
  const ArmSummary mr = moments_unchecked(r, n_r);
  const ArmSummary mp = moments_unchecked(p, n_p);

  const double n = static_cast<double>(n_e + n_r + n_p);
  const double w_e = static_cast<double>(n_e) / n;
  const double w_r = static_cast<double>(n_r) / n;
  const double w_p = static_cast<double>(n_p) / n;
  const double dm1 = 1.0 - delta;

  WaldParts parts;
  parts.numerator = me.mean - delta * mr.mean + (delta - 1.0) * mp.mean;
  parts.sigma_hat_sq = me.variance / w_e + delta * delta * mr.variance / w_r +
                       dm1 * dm1 * mp.variance / w_p;
  parts.statistic = parts.sigma_hat_sq > 0.0
                        ? std::sqrt(n) * parts.numerator /
                              std::sqrt(parts.sigma_hat_sq)
                        : std::numeric_limits<double>::quiet_NaN();
  return parts;
}

}  // namespace detail

double sigma_hat_sq(const ArmSummary& e, const ArmSummary& r,
                    const ArmSummary& p, double delta) {
  const double n = static_cast<double>(e.count + r.count + p.count);
  const double dm1 = 1.0 - delta;
  const double value = e.variance / (static_cast<double>(e.count) / n) +
                       delta * delta * r.variance /
                           (static_cast<double>(r.count) / n) +
                       dm1 * dm1 * p.variance /
                           (static_cast<double>(p.count) / n);
  if (!(value > 0.0)) {
    throw Error(ErrorCode::degenerate_variance,
                "variance estimator is zero (all arms constant)");
  }
  return value;
}

double wald_statistic(const TrialData& trial, double delta) {
  const auto parts = detail::wald_parts(
      trial.arm_E().data(), trial.size_E(), trial.arm_R().data(),
      trial.size_R(), trial.arm_P().data(), trial.size_P(), delta);
  if (!(parts.sigma_hat_sq > 0.0)) {
    throw Error(ErrorCode::degenerate_variance,
                "variance estimator is zero (all arms constant)");
  }
  return parts.statistic;
}

double welch_df(const ArmSummary& e, const ArmSummary& r, const ArmSummary& p,
                double delta) {
  const auto ne = static_cast<double>(e.count);
  const auto nr = static_cast<double>(r.count);
  const auto np = static_cast<double>(p.count);
  const double d2 = delta * delta;
  const double c2 = (1.0 - delta) * (1.0 - delta);

  const double se_sq = e.variance / ne + d2 * r.variance / nr +
                       c2 * p.variance / np;
  const double denom = e.variance * e.variance / (ne * ne * (ne - 1.0)) +
                       d2 * d2 * r.variance * r.variance / (nr * nr * (nr - 1.0)) +
                       c2 * c2 * p.variance * p.variance / (np * np * (np - 1.0));
  if (!(denom > 0.0)) {
    throw Error(ErrorCode::degenerate_variance,
                "Welch degrees of freedom undefined (zero denominator)");
  }
  return se_sq * se_sq / denom;
}

WaldDiagnostics wald_diagnostics(const TrialData& trial, double delta) {
  const ArmSummary e = summarize_arm(trial.arm_E());
  const ArmSummary r = summarize_arm(trial.arm_R());
  const ArmSummary p = summarize_arm(trial.arm_P());
  const double n = static_cast<double>(trial.total());

  WaldDiagnostics diag;
  diag.numerator = effect_estimate(e, r, p, delta);
  diag.sigma_hat_sq = sigma_hat_sq(e, r, p, delta);
  diag.welch_df = welch_df(e, r, p, delta);
  diag.weights = {static_cast<double>(e.count) / n,
                  static_cast<double>(r.count) / n,
                  static_cast<double>(p.count) / n};
  return diag;
}

TestOutcome wald_test(const TrialData& trial, const TestConfig& config) {
  config.validate();
  if (config.variant != TestVariant::wald_normal &&
      config.variant != TestVariant::wald_t) {
    throw Error(ErrorCode::domain_error,
                "wald_test requires the wald-normal or wald-t variant");
  }

  TestOutcome outcome;
  outcome.variant = config.variant;
  outcome.statistic = wald_statistic(trial, config.delta);

  if (config.variant == TestVariant::wald_normal) {
    outcome.critical_value = smath::std_normal_quantile(config.alpha);
    outcome.p_value = smath::std_normal_cdf(outcome.statistic);
  } else {
    const ArmSummary e = summarize_arm(trial.arm_E());
    const ArmSummary r = summarize_arm(trial.arm_R());
    const ArmSummary p = summarize_arm(trial.arm_P());
    const double df = welch_df(e, r, p, config.delta);
    outcome.df = df;
    outcome.critical_value = smath::student_t_quantile(config.alpha, df);
    outcome.p_value = smath::student_t_cdf(outcome.statistic, df);
  }
  outcome.reject = outcome.statistic < outcome.critical_value;
  return outcome;
}

}  // namespace triarm
