// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "triarm/error.hpp"

namespace triarm {

/// Count, arithmetic mean and sample variance (divisor n-1) of one arm.
struct ArmSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double variance = 0.0;
};

/// A validated three-arm trial: experimental (E), reference (R),
/// placebo (P). Smaller observations are better. Immutable once built;
/// construction throws ValidationError listing every violated invariant
/// (each arm needs >= 2 finite observations).
class TrialData {
 public:
  TrialData(std::vector<double> arm_e, std::vector<double> arm_r,
            std::vector<double> arm_p);

  std::span<const double> arm(Arm which) const;
  std::span<const double> arm_E() const { return arm(Arm::E); }
  std::span<const double> arm_R() const { return arm(Arm::R); }
  std::span<const double> arm_P() const { return arm(Arm::P); }

  std::size_t size(Arm which) const { return arm(which).size(); }
  std::size_t size_E() const { return n_e_; }
  std::size_t size_R() const { return n_r_; }
  std::size_t size_P() const { return pooled_.size() - n_e_ - n_r_; }
  std::size_t total() const { return pooled_.size(); }

  /// All observations in E,R,P order; the vector the permutation engine
  /// shuffles.
  std::span<const double> pooled() const { return pooled_; }

 private:
  std::vector<double> pooled_;
  std::size_t n_e_;
  std::size_t n_r_;
};

/// Validating constructor in free-function form.
TrialData validate_trial(std::vector<double> arm_e, std::vector<double> arm_r,
                         std::vector<double> arm_p);

/// Mean and sample variance of one arm. Throws on fewer than two
/// observations or non-finite values.
ArmSummary summarize_arm(std::span<const double> observations);

/// Plug-in estimate of the rearranged effect,
/// mean_E - delta*mean_R + (delta-1)*mean_P. Zero on the null boundary.
double effect_estimate(const ArmSummary& e, const ArmSummary& r,
                       const ArmSummary& p, double delta);

enum class TestVariant { permutation, wald_normal, wald_t };

const char* test_variant_name(TestVariant v);
std::optional<TestVariant> parse_test_variant(const std::string& name);

/// Shared configuration for all three tests. delta in (0,1) tests
/// non-inferiority, delta >= 1 superiority; both are admitted.
struct TestConfig {
  double delta = 0.8;
  double alpha = 0.025;
  TestVariant variant = TestVariant::permutation;
  std::uint64_t permutations = 15000;
  std::uint64_t seed = 0;
  /// Permutation test: enumerate exactly when the number of distinct
  /// group assignments is at most this; sample otherwise.
  std::uint64_t exact_threshold = 200000;
  /// 0 = default_thread_count().
  std::size_t threads = 0;

  void validate() const;  // throws Error(domain_error)
};

enum class DistributionMode { monte_carlo, exact };

/// Provenance of a permutation distribution: how many statistics were
/// drawn or enumerated, and how many degenerate permutations were skipped.
struct DistributionMeta {
  DistributionMode mode = DistributionMode::monte_carlo;
  std::uint64_t draws = 0;  // B in Monte-Carlo mode, assignment count in exact mode
  std::uint64_t skipped = 0;
  std::uint64_t seed = 0;  // Monte-Carlo mode only
};

/// Result of one test run. All tests reject in the lower tail:
/// reject == (statistic < critical_value).
struct TestOutcome {
  TestVariant variant = TestVariant::permutation;
  double statistic = 0.0;
  double critical_value = 0.0;
  double p_value = 1.0;
  bool reject = false;
  std::optional<double> df;                        // wald_t only
  std::optional<DistributionMeta> distribution;    // permutation only
};

}  // namespace triarm
