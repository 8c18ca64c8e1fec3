// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#include "triarm/trial.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include "triarm/kernels.hpp"

namespace triarm {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::too_few_observations: return "TooFewObservations";
    case ErrorCode::non_finite_input: return "NonFiniteInput";
    case ErrorCode::empty_arm: return "EmptyArm";
    case ErrorCode::degenerate_variance: return "DegenerateVariance";
    case ErrorCode::degenerate_permutation: return "DegeneratePermutation";
    case ErrorCode::all_permutations_degenerate: return "AllPermutationsDegenerate";
    case ErrorCode::enumeration_too_large: return "EnumerationTooLarge";
    case ErrorCode::underdispersed_input: return "UnderdispersedInput";
    case ErrorCode::domain_error: return "DomainError";
    case ErrorCode::invalid_family_params: return "InvalidFamilyParams";
    case ErrorCode::allocation_mismatch: return "AllocationMismatch";
    case ErrorCode::file_not_found: return "FileNotFound";
    case ErrorCode::parse_error: return "ParseError";
    case ErrorCode::unknown_selector: return "UnknownSelector";
  }
  return "UnknownError";
}

const char* arm_name(Arm arm) {
  switch (arm) {
    case Arm::E: return "E";
    case Arm::R: return "R";
    case Arm::P: return "P";
  }
  return "?";
}

namespace {

std::string format_issues(const std::vector<ArmIssue>& issues) {
  std::ostringstream os;
  os << "invalid trial:";
  for (const auto& issue : issues) {
    os << ' ' << error_code_name(issue.code) << '(' << arm_name(issue.arm);
    if (issue.index != ArmIssue::npos) os << ", index " << issue.index;
    os << ')';
  }
  return os.str();
}

void check_arm(Arm which, std::span<const double> xs,
               std::vector<ArmIssue>& issues) {
  if (xs.empty()) {
    issues.push_back({which, ErrorCode::empty_arm, ArmIssue::npos});
    return;
  }
  if (xs.size() < 2) {
    issues.push_back({which, ErrorCode::too_few_observations, ArmIssue::npos});
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i])) {
      issues.push_back({which, ErrorCode::non_finite_input, i});
    }
  }
}

}  // namespace

ValidationError::ValidationError(std::vector<ArmIssue> issues)
    : Error(issues.empty() ? ErrorCode::domain_error : issues.front().code,
            format_issues(issues)),
      issues_(std::move(issues)) {}

TrialData::TrialData(std::vector<double> arm_e, std::vector<double> arm_r,
                     std::vector<double> arm_p)
    : n_e_(arm_e.size()), n_r_(arm_r.size()) {
  std::vector<ArmIssue> issues;
  check_arm(Arm::E, arm_e, issues);
  check_arm(Arm::R, arm_r, issues);
  check_arm(Arm::P, arm_p, issues);
  if (!issues.empty()) throw ValidationError(std::move(issues));

  pooled_.reserve(arm_e.size() + arm_r.size() + arm_p.size());
  pooled_.insert(pooled_.end(), arm_e.begin(), arm_e.end());
  pooled_.insert(pooled_.end(), arm_r.begin(), arm_r.end());
  pooled_.insert(pooled_.end(), arm_p.begin(), arm_p.end());
}

std::span<const double> TrialData::arm(Arm which) const {
  const std::span<const double> all(pooled_);
  switch (which) {
    case Arm::E: return all.subspan(0, n_e_);
    case Arm::R: return all.subspan(n_e_, n_r_);
    case Arm::P: return all.subspan(n_e_ + n_r_);
  }
  return {};
}

TrialData validate_trial(std::vector<double> arm_e, std::vector<double> arm_r,
                         std::vector<double> arm_p) {
  return TrialData(std::move(arm_e), std::move(arm_r), std::move(arm_p));
}

ArmSummary summarize_arm(std::span<const double> observations) {
  std::vector<ArmIssue> issues;
  check_arm(Arm::E, observations, issues);
  for (const auto& issue : issues) {
    if (issue.code == ErrorCode::non_finite_input) {
      throw Error(ErrorCode::non_finite_input,
                  "non-finite observation at index " +
                      std::to_string(issue.index));
    }
  }
  if (observations.size() < 2) {
    throw Error(ErrorCode::too_few_observations,
                "need at least 2 observations, got " +
                    std::to_string(observations.size()));
  }
  ArmSummary s;
  s.count = observations.size();
  const double n = static_cast<double>(s.count);
  s.mean = kern::sum(observations.data(), s.count) / n;
  s.variance =
      kern::sum_sq_dev(observations.data(), s.count, s.mean) / (n - 1.0);
  return s;
}

double effect_estimate(const ArmSummary& e, const ArmSummary& r,
                       const ArmSummary& p, double delta) {
  return e.mean - delta * r.mean + (delta - 1.0) * p.mean;
}

const char* test_variant_name(TestVariant v) {
  switch (v) {
    case TestVariant::permutation: return "perm";
    case TestVariant::wald_normal: return "wald-normal";
    case TestVariant::wald_t: return "wald-t";
  }
  return "?";
}

std::optional<TestVariant> parse_test_variant(const std::string& name) {
  if (name == "perm" || name == "permutation") return TestVariant::permutation;
  if (name == "wald-normal") return TestVariant::wald_normal;
  if (name == "wald-t") return TestVariant::wald_t;
  return std::nullopt;
}

void TestConfig::validate() const {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    throw Error(ErrorCode::domain_error, "delta must be finite and > 0");
  }
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::domain_error, "alpha must lie in (0,1)");
  }
  if (permutations < 1) {
    throw Error(ErrorCode::domain_error, "permutations must be >= 1");
  }
}

}  // namespace triarm
