// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#include "triarm/kernels.hpp"

namespace triarm::kern {
namespace {

constexpr std::size_t kPairwiseBase = 32;

double pairwise_sum(const double* x, std::size_t n) {
  if (n <= kPairwiseBase) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += x[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(x, half) + pairwise_sum(x + half, n - half);
}

double pairwise_sum_sq_dev(const double* x, std::size_t n, double mean) {
  if (n <= kPairwiseBase) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double d = x[i] - mean;
      s += d * d;
    }
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum_sq_dev(x, half, mean) +
         pairwise_sum_sq_dev(x + half, n - half, mean);
}

}  // namespace

const Kernels& scalar_kernels() {
  static const Kernels k{"scalar", &pairwise_sum, &pairwise_sum_sq_dev};
  return k;
}

}  // namespace triarm::kern
