// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "triarm/kernels.hpp"

namespace {

using triarm::kern::Kernels;

// Independent reference: compensated (Kahan) summation in long double.
long double reference_sum(const std::vector<double>& xs) {
  long double s = 0.0L;
  long double c = 0.0L;
  for (double x : xs) {
    const long double y = static_cast<long double>(x) - c;
    const long double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

long double reference_sum_sq_dev(const std::vector<double>& xs, double mean) {
  long double s = 0.0L;
  long double c = 0.0L;
  for (double x : xs) {
    const long double d = static_cast<long double>(x) - mean;
    const long double y = d * d - c;
    const long double t = s + y;
    c = (t - s) - y;
    s = t;
  }
  return s;
}

double rel_gap(long double expected, double got) {
  const long double scale = std::max<long double>(std::fabs(expected), 1.0L);
  return static_cast<double>(std::fabs(expected - got) / scale);
}

void check_backend(const Kernels& k, std::mt19937_64& rng) {
  const std::size_t lengths[] = {2,  3,  5,  15, 16,  17,  31,  32,
                                 33, 63, 64, 100, 257, 1000, 4097};
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> scale_dist(-3.0, 6.0);

  for (std::size_t n : lengths) {
    for (int repeat = 0; repeat < 5; ++repeat) {
      const double scale = std::pow(10.0, scale_dist(rng));
      const double offset = scale * noise(rng);
      std::vector<double> xs(n);
      for (double& x : xs) x = offset + scale * noise(rng);

      const long double want_sum = reference_sum(xs);
      CHECK(rel_gap(want_sum, k.sum(xs.data(), n)) < 1e-13);

      const double mean = static_cast<double>(want_sum) /
                          static_cast<double>(n);
      const long double want_dev = reference_sum_sq_dev(xs, mean);
      CHECK(rel_gap(want_dev, k.sum_sq_dev(xs.data(), n, mean)) < 1e-13);
    }
  }
}

}  // namespace

TEST_CASE("scalar kernels match a compensated long-double reference") {
  std::mt19937_64 rng(20260811);
  check_backend(triarm::kern::scalar_kernels(), rng);
}

TEST_CASE("every available backend matches the reference") {
  for (const std::string& name : triarm::kern::available_kernels()) {
    CAPTURE(name);
    REQUIRE(triarm::kern::select_kernels(name));
    std::mt19937_64 rng(998877);
    check_backend(triarm::kern::active_kernels(), rng);
  }
  // restore the default choice for the rest of the suite
  triarm::kern::select_kernels(triarm::kern::available_kernels().back());
}

TEST_CASE("backends agree with each other to a few ulps") {
  const auto names = triarm::kern::available_kernels();
  if (names.size() < 2) return;  // scalar-only machine

  std::mt19937_64 rng(424242);
  std::normal_distribution<double> noise(5.0, 2.0);
  for (std::size_t n : {2u, 7u, 16u, 33u, 60u, 579u}) {
    std::vector<double> xs(n);
    for (double& x : xs) x = noise(rng);

    std::vector<double> sums;
    std::vector<double> devs;
    for (const auto& name : names) {
      REQUIRE(triarm::kern::select_kernels(name));
      const auto& k = triarm::kern::active_kernels();
      sums.push_back(k.sum(xs.data(), n));
      devs.push_back(k.sum_sq_dev(xs.data(), n, 5.0));
    }
    for (std::size_t i = 1; i < sums.size(); ++i) {
      CHECK(std::fabs(sums[i] - sums[0]) <=
            1e-14 * std::max(1.0, std::fabs(sums[0])));
      CHECK(std::fabs(devs[i] - devs[0]) <=
            1e-14 * std::max(1.0, std::fabs(devs[0])));
    }
  }
  triarm::kern::select_kernels(names.back());
}

TEST_CASE("kernel selection") {
  CHECK(triarm::kern::select_kernels("scalar"));
  CHECK(std::string(triarm::kern::active_kernels().name) == "scalar");
  CHECK_FALSE(triarm::kern::select_kernels("no-such-backend"));
  // unknown names leave the selection unchanged
  CHECK(std::string(triarm::kern::active_kernels().name) == "scalar");
  triarm::kern::select_kernels(triarm::kern::available_kernels().back());
}
