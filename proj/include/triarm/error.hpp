// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace triarm {

enum class ErrorCode {
  too_few_observations,
  non_finite_input,
  empty_arm,
  degenerate_variance,
  degenerate_permutation,
  all_permutations_degenerate,
  enumeration_too_large,
  underdispersed_input,
  domain_error,
  invalid_family_params,
  allocation_mismatch,
  file_not_found,
  parse_error,
  unknown_selector,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

enum class Arm { E, R, P };

const char* arm_name(Arm arm);

/// One violated invariant of a trial arm. `index` is the offending
/// observation for per-element issues, npos otherwise.
struct ArmIssue {
  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  Arm arm;
  ErrorCode code;
  std::size_t index = npos;
};

/// Carries every violated invariant found while validating a trial,
/// not just the first one.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<ArmIssue> issues);

  const std::vector<ArmIssue>& issues() const noexcept { return issues_; }

 private:
  std::vector<ArmIssue> issues_;
};

}  // namespace triarm
