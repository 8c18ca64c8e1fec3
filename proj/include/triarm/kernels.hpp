// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <string>
#include <vector>

namespace triarm::kern {

/// Reduction kernels behind every mean/variance in the library.
///
/// Both entry points are pure and deterministic: a given backend returns
/// the same bits for the same input on every call, regardless of thread
/// count. Backends may differ from each other in the last few ulps
/// (different summation trees); the equivalence tests bound that gap.
struct Kernels {
  const char* name;
  double (*sum)(const double* x, std::size_t n);
  // sum of (x[i] - mean)^2
  double (*sum_sq_dev)(const double* x, std::size_t n, double mean);
};

/// Scalar reference backend (pairwise summation).
const Kernels& scalar_kernels();

/// Backend in use. Resolved once: TRIARM_KERNEL env override if set,
/// otherwise the widest instruction set the CPU supports.
const Kernels& active_kernels();

/// Force a backend by name ("scalar", "avx2"). Returns false if the
/// backend is not compiled in or the CPU lacks it.
bool select_kernels(const std::string& name);

/// Names of all backends usable on this machine.
std::vector<std::string> available_kernels();

inline double sum(const double* x, std::size_t n) {
  return active_kernels().sum(x, n);
}

inline double sum_sq_dev(const double* x, std::size_t n, double mean) {
  return active_kernels().sum_sq_dev(x, n, mean);
}

}  // namespace triarm::kern
