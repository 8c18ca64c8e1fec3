// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#include "triarm/permutation.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numeric>
#include <string>

#include "triarm/kernels.hpp"
#include "triarm/parallel.hpp"
#include "triarm/rng.hpp"
#include "triarm/wald.hpp"

namespace triarm {

namespace {

double statistic_or_throw(const double* grouped, std::size_t n_e,
                          std::size_t n_r, std::size_t n_p, double delta) {
  const auto parts = detail::wald_parts(grouped, n_e, grouped + n_e, n_r,
                                        grouped + n_e + n_r, n_p, delta);
  if (!(parts.sigma_hat_sq > 0.0)) {
    throw Error(ErrorCode::degenerate_permutation,
                "relabeled variance estimator is zero");
  }
  return parts.statistic;
}

// Lexicographic enumeration of k-subsets of {0,...,n-1}.
template <typename Fn>
void for_each_combination(std::size_t n, std::size_t k, Fn&& fn) {
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), 0);
  while (true) {
    fn(idx);
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == n - k + (i - 1)) --i;
    if (i == 0) return;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

std::optional<std::uint64_t> binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n - k) k = n - k;
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;  // exact: each prefix is a binomial coefficient
    if (r > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  }
  return static_cast<std::uint64_t>(r);
}

struct BlockCoefficients {
  double prefactor_sq;  // n_E n_R n_P / D, shared by c and d
  double c_e, c_r, c_p;
  double d_e, d_r, d_p;
};

BlockCoefficients block_coefficients(std::size_t n_e, std::size_t n_r,
                                     std::size_t n_p, double delta) {
  const auto ne = static_cast<double>(n_e);
  const auto nr = static_cast<double>(n_r);
  const auto np = static_cast<double>(n_p);
  const double dm1 = delta - 1.0;
  const double denom =
      nr * np + delta * delta * ne * np + dm1 * dm1 * ne * nr;

  BlockCoefficients b;
  b.prefactor_sq = ne * nr * np / denom;
  const double pf = std::sqrt(b.prefactor_sq);
  b.c_e = -pf / ne;
  b.c_r = pf * delta / nr;
  b.c_p = pf * (1.0 - delta) / np;
  b.d_e = b.prefactor_sq / (ne * (ne - 1.0));
  b.d_r = b.prefactor_sq * delta * delta / (nr * (nr - 1.0));
  b.d_p = b.prefactor_sq * dm1 * dm1 / (np * (np - 1.0));
  return b;
}

}  // namespace

double perm_statistic(std::span<const double> grouped, std::size_t n_e,
                      std::size_t n_r, double delta) {
  if (grouped.size() < n_e + n_r) {
    throw Error(ErrorCode::domain_error, "group sizes exceed pooled length");
  }
  const std::size_t n_p = grouped.size() - n_e - n_r;
  if (n_e < 2 || n_r < 2 || n_p < 2) {
    throw Error(ErrorCode::too_few_observations,
                "each relabeled group needs at least 2 observations");
  }
  return statistic_or_throw(grouped.data(), n_e, n_r, n_p, delta);
}

double perm_statistic(std::span<const double> pooled,
                      std::span<const Arm> assignment, double delta) {
  if (pooled.size() != assignment.size()) {
    throw Error(ErrorCode::domain_error,
                "assignment length must match pooled length");
  }
  std::vector<double> grouped;
  grouped.reserve(pooled.size());
  std::size_t n_e = 0;
  std::size_t n_r = 0;
  for (Arm which : {Arm::E, Arm::R, Arm::P}) {
    for (std::size_t i = 0; i < pooled.size(); ++i) {
      if (assignment[i] == which) grouped.push_back(pooled[i]);
    }
    if (which == Arm::E) n_e = grouped.size();
    if (which == Arm::R) n_r = grouped.size() - n_e;
  }
  return perm_statistic(std::span<const double>(grouped), n_e, n_r, delta);
}

std::optional<std::uint64_t> exact_assignment_count(std::size_t n_e,
                                                    std::size_t n_r,
                                                    std::size_t n_p) {
  const std::uint64_t n = n_e + n_r + n_p;
  const auto first = binomial(n, n_e);
  if (!first) return std::nullopt;
  const auto second = binomial(n - n_e, n_r);
  if (!second) return std::nullopt;
  const unsigned __int128 total =
      static_cast<unsigned __int128>(*first) * *second;
  if (total > std::numeric_limits<std::uint64_t>::max()) return std::nullopt;
  return static_cast<std::uint64_t>(total);
}

PermDistribution mc_perm_distribution(const TrialData& trial, double delta,
                                      std::uint64_t permutations,
                                      std::uint64_t seed,
                                      std::size_t threads) {
  if (permutations < 1) {
    throw Error(ErrorCode::domain_error, "permutations must be >= 1");
  }
  const std::span<const double> pooled = trial.pooled();
  const std::size_t n = pooled.size();
  const std::size_t n_e = trial.size_E();
  const std::size_t n_r = trial.size_R();
  const std::size_t n_p = trial.size_P();

  // One slot per permutation; NaN marks a degenerate relabeling. Slots
  // depend only on (seed, index), so the result is the same for any
  // thread count.
  std::vector<double> slots(permutations,
                            std::numeric_limits<double>::quiet_NaN());

  parallel_for_chunks(permutations, threads, [&](std::size_t begin,
                                                 std::size_t end) {
    std::vector<double> scratch(n);
    for (std::size_t i = begin; i < end; ++i) {
      std::memcpy(scratch.data(), pooled.data(), n * sizeof(double));
      SplitMix64 rng(derive_stream(seed, i));
      shuffle_span(scratch.data(), n, rng);
      const auto parts = detail::wald_parts(
          scratch.data(), n_e, scratch.data() + n_e, n_r,
          scratch.data() + n_e + n_r, n_p, delta);
      if (parts.sigma_hat_sq > 0.0) slots[i] = parts.statistic;
    }
  });

  PermDistribution dist;
  dist.mode = DistributionMode::monte_carlo;
  dist.permutations = permutations;
  dist.seed = seed;
  dist.values.reserve(permutations);
  for (double v : slots) {
    if (std::isnan(v)) {
      ++dist.skipped;
    } else {
      dist.values.push_back(v);
    }
  }
  if (dist.values.empty()) {
    throw Error(ErrorCode::all_permutations_degenerate,
                "every sampled permutation had zero variance");
  }
  return dist;
}

PermDistribution exact_perm_distribution(const TrialData& trial, double delta,
                                         std::uint64_t threshold) {
  const std::size_t n_e = trial.size_E();
  const std::size_t n_r = trial.size_R();
  const std::size_t n_p = trial.size_P();
  const std::size_t n = trial.total();

  const auto count = exact_assignment_count(n_e, n_r, n_p);
  if (!count || *count > threshold) {
    const std::string size_text =
        count ? std::to_string(*count) : "more than 2^64";
    throw Error(ErrorCode::enumeration_too_large,
                "exact enumeration needs " + size_text +
                    " assignments, threshold is " + std::to_string(threshold));
  }

  const std::span<const double> pooled = trial.pooled();
  PermDistribution dist;
  dist.mode = DistributionMode::exact;
  dist.assignment_count = *count;
  dist.values.reserve(*count);

  std::vector<double> grouped(n);
  std::vector<std::size_t> rest(n - n_e);
  std::vector<char> in_e(n);

  for_each_combination(n, n_e, [&](const std::vector<std::size_t>& comb_e) {
    std::fill(in_e.begin(), in_e.end(), 0);
    for (std::size_t i = 0; i < n_e; ++i) {
      grouped[i] = pooled[comb_e[i]];
      in_e[comb_e[i]] = 1;
    }
    std::size_t r = 0;
    for (std::size_t i = 0; i < n; ++i) {
      if (!in_e[i]) rest[r++] = i;
    }
    for_each_combination(
        rest.size(), n_r, [&](const std::vector<std::size_t>& comb_r) {
          // comb_r holds increasing positions into `rest`; those go to the
          // R block, the remainder to the P block.
          std::size_t r_out = n_e;
          std::size_t p_out = n_e + n_r;
          std::size_t next = 0;
          for (std::size_t i = 0; i < rest.size(); ++i) {
            if (next < n_r && comb_r[next] == i) {
              grouped[r_out++] = pooled[rest[i]];
              ++next;
            } else {
              grouped[p_out++] = pooled[rest[i]];
            }
          }
          const auto parts = detail::wald_parts(
              grouped.data(), n_e, grouped.data() + n_e, n_r,
              grouped.data() + n_e + n_r, n_p, delta);
          if (parts.sigma_hat_sq > 0.0) {
            dist.values.push_back(parts.statistic);
          } else {
            ++dist.skipped;
          }
        });
  });

  if (dist.values.empty()) {
    throw Error(ErrorCode::all_permutations_degenerate,
                "every assignment had zero variance");
  }
  return dist;
}

double perm_quantile(const PermDistribution& dist, double alpha) {
  if (dist.values.empty()) {
    throw Error(ErrorCode::domain_error, "empty permutation distribution");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::domain_error, "alpha must lie in (0,1)");
  }
  std::vector<double> sorted = dist.values;
  std::sort(sorted.begin(), sorted.end());
  const std::size_t m = sorted.size();

  // Largest k with k/m <= alpha; the (k+1)-th order statistic is then the
  // largest c whose strictly-below fraction stays within alpha.
  const auto am = static_cast<long double>(alpha) * static_cast<long double>(m);
  auto k = static_cast<std::size_t>(
      std::min(std::floor(am), static_cast<long double>(m - 1)));
  while (k + 1 <= m - 1 && static_cast<long double>(k + 1) <= am) ++k;
  while (k > 0 && static_cast<long double>(k) > am) --k;
  return sorted[k];
}

TestOutcome perm_test(const TrialData& trial, const TestConfig& config) {
  config.validate();

  TestOutcome outcome;
  outcome.variant = TestVariant::permutation;
  outcome.statistic = wald_statistic(trial, config.delta);

  const auto count =
      exact_assignment_count(trial.size_E(), trial.size_R(), trial.size_P());
  const bool exact = count && *count <= config.exact_threshold;
  const PermDistribution dist =
      exact ? exact_perm_distribution(trial, config.delta,
                                      config.exact_threshold)
            : mc_perm_distribution(trial, config.delta, config.permutations,
                                   config.seed, config.threads);

  outcome.critical_value = perm_quantile(dist, config.alpha);
  const auto below_or_equal = static_cast<double>(
      std::count_if(dist.values.begin(), dist.values.end(),
                    [&](double v) { return v <= outcome.statistic; }));
  outcome.p_value =
      (1.0 + below_or_equal) / (static_cast<double>(dist.values.size()) + 1.0);
  outcome.reject = outcome.statistic < outcome.critical_value;
  outcome.distribution = dist.meta();
  return outcome;
}

CoefficientScheme coefficient_scheme(std::size_t n_e, std::size_t n_r,
                                     std::size_t n_p, double delta) {
  if (n_e < 2 || n_r < 2 || n_p < 2) {
    throw Error(ErrorCode::too_few_observations,
                "coefficient scheme needs group sizes >= 2");
  }
  const auto b = block_coefficients(n_e, n_r, n_p, delta);
  CoefficientScheme scheme;
  scheme.c.reserve(n_e + n_r + n_p);
  scheme.d.reserve(n_e + n_r + n_p);
  scheme.c.insert(scheme.c.end(), n_e, b.c_e);
  scheme.c.insert(scheme.c.end(), n_r, b.c_r);
  scheme.c.insert(scheme.c.end(), n_p, b.c_p);
  scheme.d.insert(scheme.d.end(), n_e, b.d_e);
  scheme.d.insert(scheme.d.end(), n_r, b.d_r);
  scheme.d.insert(scheme.d.end(), n_p, b.d_p);
  return scheme;
}

SigmaDecomposition sigma_decomposition(const TrialData& relabeled,
                                       double delta) {
  const auto b = block_coefficients(relabeled.size_E(), relabeled.size_R(),
                                    relabeled.size_P(), delta);
  const auto sum_sq = [](std::span<const double> xs) {
    return kern::sum_sq_dev(xs.data(), xs.size(), 0.0);
  };
  const auto sum = [](std::span<const double> xs) {
    return kern::sum(xs.data(), xs.size());
  };

  SigmaDecomposition w;
  w.w1 = b.d_e * sum_sq(relabeled.arm_E()) + b.d_r * sum_sq(relabeled.arm_R()) +
         b.d_p * sum_sq(relabeled.arm_P());
  w.w2 = std::sqrt(b.d_e / static_cast<double>(relabeled.size_E())) *
         sum(relabeled.arm_E());
  w.w3 = std::sqrt(b.d_r / static_cast<double>(relabeled.size_R())) *
         sum(relabeled.arm_R());
  w.w4 = std::sqrt(b.d_p / static_cast<double>(relabeled.size_P())) *
         sum(relabeled.arm_P());
  return w;
}

TestOutcome run_test(const TrialData& trial, const TestConfig& config) {
  if (config.variant == TestVariant::permutation) {
    return perm_test(trial, config);
  }
  return wald_test(trial, config);
}

}  // namespace triarm
