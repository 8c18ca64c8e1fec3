// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstdint>

namespace triarm::smath {

/// Standard normal CDF.
double std_normal_cdf(double x);

/// Standard normal quantile, p in (0,1). Absolute error well below 1e-9.
double std_normal_quantile(double p);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// Student-t CDF with real-valued degrees of freedom nu > 0.
double student_t_cdf(double t, double nu);

/// Student-t quantile with real-valued nu > 0 (Welch degrees of freedom
/// are non-integer). Inverts the incomplete-beta CDF; absolute error
/// well below 1e-8.
double student_t_quantile(double p, double nu);

/// Negative binomial with mean lambda and variance lambda*(1+lambda*phi).
/// phi == 0 is the Poisson limit.
struct NBParams {
  double lambda = 1.0;
  double phi = 0.0;
};

/// Parameters matching a given mean and variance: lambda = mean,
/// phi = (variance - mean) / mean^2. Throws UnderdispersedInput when
/// variance < mean.
NBParams nb_moment_match(double mean, double variance);

/// P(X = x), evaluated in log space.
double nb_pmf(std::uint64_t x, const NBParams& params);

/// Expected counts n*P(X=0..3) and n*P(X>=4) for a negative binomial
/// matched to (mean, variance).
std::array<double, 5> nb_expected_counts(double n, double mean,
                                         double variance);

/// Half-up rounding to an integer value (ties away from zero is not
/// needed here; inputs are nonnegative).
double round_half_up(double v);

}  // namespace triarm::smath
