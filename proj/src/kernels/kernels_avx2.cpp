// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

// AVX2 variants of the reduction kernels. Compiled with -mavx2 and only
// dispatched to after a runtime CPU check (see kernels_dispatch.cpp), so
// the rest of the project can be built for a baseline ISA.

#if defined(__x86_64__) || defined(_M_X64)

#include <immintrin.h>

#include "triarm/kernels.hpp"

namespace triarm::kern {
namespace {

inline double reduce(__m256d a, __m256d b, __m256d c, __m256d d) {
  const __m256d ab = _mm256_add_pd(a, b);
  const __m256d cd = _mm256_add_pd(c, d);
  const __m256d v = _mm256_add_pd(ab, cd);
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s2 = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s2, _mm_unpackhi_pd(s2, s2)));
}

double avx2_sum(const double* x, std::size_t n) {
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd();
  __m256d a3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
    a1 = _mm256_add_pd(a1, _mm256_loadu_pd(x + i + 4));
    a2 = _mm256_add_pd(a2, _mm256_loadu_pd(x + i + 8));
    a3 = _mm256_add_pd(a3, _mm256_loadu_pd(x + i + 12));
  }
  for (; i + 4 <= n; i += 4) {
    a0 = _mm256_add_pd(a0, _mm256_loadu_pd(x + i));
  }
  double s = reduce(a0, a1, a2, a3);
  for (; i < n; ++i) s += x[i];
  return s;
}

double avx2_sum_sq_dev(const double* x, std::size_t n, double mean) {
  const __m256d m = _mm256_set1_pd(mean);
  __m256d a0 = _mm256_setzero_pd();
  __m256d a1 = _mm256_setzero_pd();
  __m256d a2 = _mm256_setzero_pd();
  __m256d a3 = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 16 <= n; i += 16) {
    const __m256d d0 = _mm256_sub_pd(_mm256_loadu_pd(x + i), m);
    const __m256d d1 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 4), m);
    const __m256d d2 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 8), m);
    const __m256d d3 = _mm256_sub_pd(_mm256_loadu_pd(x + i + 12), m);
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(d0, d0));
    a1 = _mm256_add_pd(a1, _mm256_mul_pd(d1, d1));
    a2 = _mm256_add_pd(a2, _mm256_mul_pd(d2, d2));
    a3 = _mm256_add_pd(a3, _mm256_mul_pd(d3, d3));
  }
  for (; i + 4 <= n; i += 4) {
    const __m256d d = _mm256_sub_pd(_mm256_loadu_pd(x + i), m);
    a0 = _mm256_add_pd(a0, _mm256_mul_pd(d, d));
  }
  double s = reduce(a0, a1, a2, a3);
  for (; i < n; ++i) {
    const double d = x[i] - mean;
    s += d * d;
  }
  return s;
}

}  // namespace

const Kernels& avx2_kernels() {
  static const Kernels k{"avx2", &avx2_sum, &avx2_sum_sq_dev};
  return k;
}

}  // namespace triarm::kern

#endif  // x86-64
