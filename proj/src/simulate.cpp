// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#include "triarm/simulate.hpp"

#include <charconv>
#include <cmath>
#include <mutex>
#include <sstream>
#include <string_view>

#include "triarm/parallel.hpp"
#include "triarm/permutation.hpp"
#include "triarm/rng.hpp"
#include "triarm/wald.hpp"

namespace triarm::sim {

const char* family_name(Family f) {
  switch (f) {
    case Family::normal: return "normal";
    case Family::lognormal_std: return "lognormal-std";
    case Family::chisq_std: return "chisq-std";
    case Family::poisson: return "poisson";
    case Family::negbin: return "negbin";
  }
  return "?";
}

void ArmSpec::validate() const {
  if (!std::isfinite(mu) || !std::isfinite(sigma_sq) || !(sigma_sq > 0.0)) {
    throw Error(ErrorCode::invalid_family_params,
                "arm spec needs finite mu and sigma_sq > 0");
  }
  if (family == Family::poisson || family == Family::negbin) {
    if (!(mu > 0.0)) {
      throw Error(ErrorCode::invalid_family_params,
                  "count families need mu > 0");
    }
    if (!(kappa >= 1.0)) {
      throw Error(ErrorCode::invalid_family_params,
                  "count families need kappa >= 1");
    }
    if (std::fabs(sigma_sq - kappa * mu) > 1e-9 * (1.0 + sigma_sq)) {
      throw Error(ErrorCode::invalid_family_params,
                  "count families need sigma_sq = kappa * mu");
    }
  }
}

std::string Allocation::label() const {
  std::ostringstream os;
  os << e << ':' << r << ':' << p;
  return os.str();
}

std::array<std::size_t, 3> Allocation::sizes_for(std::size_t n) const {
  const unsigned t = total();
  if (t == 0 || e == 0 || r == 0 || p == 0) {
    throw Error(ErrorCode::allocation_mismatch,
                "allocation parts must be positive");
  }
  if (n % t != 0) {
    throw Error(ErrorCode::allocation_mismatch,
                "total sample size " + std::to_string(n) +
                    " is not divisible by allocation " + label());
  }
  const std::size_t unit = n / t;
  return {e * unit, r * unit, p * unit};
}

Allocation parse_allocation(const std::string& text) {
  const auto fail = [&]() -> Error {
    return Error(ErrorCode::parse_error,
                 "allocation must look like E:R:P with positive integers, "
                 "got '" + text + "'");
  };

  unsigned parts[3] = {0, 0, 0};
  std::size_t pos = 0;
  for (int i = 0; i < 3; ++i) {
    const std::size_t next = text.find(':', pos);
    if ((i < 2) != (next != std::string::npos)) throw fail();
    const std::string_view piece =
        std::string_view(text).substr(pos, next - pos);
    const auto [ptr, ec] =
        std::from_chars(piece.data(), piece.data() + piece.size(), parts[i]);
    if (ec != std::errc() || ptr != piece.data() + piece.size() ||
        parts[i] == 0) {
      throw fail();
    }
    pos = next + 1;
  }
  return Allocation{parts[0], parts[1], parts[2]};
}

void ScenarioSpec::validate() const {
  arm_e.validate();
  arm_r.validate();
  arm_p.validate();
  for (std::size_t s : sizes) {
    if (s < 2) {
      throw Error(ErrorCode::invalid_family_params,
                  "every group needs at least 2 subjects");
    }
  }
  if (!(delta > 0.0) || !(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::domain_error, "invalid delta or alpha");
  }
  if (replications < 1 || permutations < 1 || tests.empty()) {
    throw Error(ErrorCode::domain_error,
                "scenario needs replications, permutations and tests");
  }
  const double boundary = boundary_mean(arm_r.mu, arm_p.mu, delta);
  if (std::fabs(arm_e.mu - boundary) > 1e-9 * (1.0 + std::fabs(boundary))) {
    throw Error(ErrorCode::invalid_family_params,
                "level-study scenario must sit on the null boundary: "
                "mu_E = delta*mu_R + (1-delta)*mu_P");
  }
}

double boundary_mean(double mu_r, double mu_p, double delta) {
  return delta * mu_r + (1.0 - delta) * mu_p;
}

std::vector<double> draw_arm(const ArmSpec& spec, std::size_t n,
                             std::mt19937_64& rng) {
  spec.validate();
  std::vector<double> xs(n);
  const double sigma = std::sqrt(spec.sigma_sq);

  switch (spec.family) {
    case Family::normal: {
      std::normal_distribution<double> dist(spec.mu, sigma);
      for (double& x : xs) x = dist(rng);
      break;
    }
    case Family::lognormal_std: {
      // base law lognormal(0,1): mean e^{1/2}, variance e^2 - e
      const double base_mean = std::exp(0.5);
      const double base_sd = std::sqrt(std::exp(2.0) - std::exp(1.0));
      std::lognormal_distribution<double> dist(0.0, 1.0);
      for (double& x : xs) {
        x = (dist(rng) - base_mean) / base_sd * sigma + spec.mu;
      }
      break;
    }
    case Family::chisq_std: {
      // base law chi-squared(2): mean 2, variance 4
      std::chi_squared_distribution<double> dist(2.0);
      for (double& x : xs) {
        x = (dist(rng) - 2.0) / 2.0 * sigma + spec.mu;
      }
      break;
    }
    case Family::poisson: {
      std::poisson_distribution<long long> dist(spec.mu);
      for (double& x : xs) x = static_cast<double>(dist(rng));
      break;
    }
    case Family::negbin: {
      const double phi = (spec.kappa - 1.0) / spec.mu;
      if (phi == 0.0) {  // Poisson limit
        std::poisson_distribution<long long> dist(spec.mu);
        for (double& x : xs) x = static_cast<double>(dist(rng));
        break;
      }
      // gamma-Poisson mixture: X | G ~ Poisson(G), G ~ Gamma(1/phi, mu*phi)
      std::gamma_distribution<double> gamma(1.0 / phi, spec.mu * phi);
      std::poisson_distribution<long long> poisson;
      using poisson_param = std::poisson_distribution<long long>::param_type;
      for (double& x : xs) {
        const double g = gamma(rng);
        x = g > 0.0 ? static_cast<double>(poisson(rng, poisson_param(g))) : 0.0;
      }
      break;
    }
  }
  return xs;
}

SimulationResult run_scenario(const ScenarioSpec& scenario,
                              std::size_t threads) {
  scenario.validate();
  const std::size_t n_tests = scenario.tests.size();

  std::vector<std::uint64_t> rejections(n_tests, 0);
  std::vector<std::uint64_t> skipped(n_tests, 0);
  std::mutex merge_mutex;

  parallel_for_chunks(
      scenario.replications, threads, [&](std::size_t begin, std::size_t end) {
        std::vector<std::uint64_t> local_rej(n_tests, 0);
        std::vector<std::uint64_t> local_skip(n_tests, 0);

        for (std::size_t rep = begin; rep < end; ++rep) {
          const std::uint64_t rep_seed = derive_stream(scenario.seed, rep);
          std::mt19937_64 rng(derive_stream(rep_seed, 0));
          const std::uint64_t perm_seed = derive_stream(rep_seed, 1);

          const TrialData trial(
              draw_arm(scenario.arm_e, scenario.sizes[0], rng),
              draw_arm(scenario.arm_r, scenario.sizes[1], rng),
              draw_arm(scenario.arm_p, scenario.sizes[2], rng));

          for (std::size_t t = 0; t < n_tests; ++t) {
            TestConfig config;
            config.delta = scenario.delta;
            config.alpha = scenario.alpha;
            config.variant = scenario.tests[t];
            config.permutations = scenario.permutations;
            config.seed = perm_seed;
            config.exact_threshold = scenario.exact_threshold;
            config.threads = 1;  // parallelism lives at the replication level
            try {
              if (run_test(trial, config).reject) ++local_rej[t];
            } catch (const Error&) {
              ++local_skip[t];
            }
          }
        }

        std::lock_guard<std::mutex> lock(merge_mutex);
        for (std::size_t t = 0; t < n_tests; ++t) {
          rejections[t] += local_rej[t];
          skipped[t] += local_skip[t];
        }
      });

  SimulationResult result;
  result.scenario = scenario;
  result.replications = scenario.replications;
  const double mc_error =
      std::sqrt(scenario.alpha * (1.0 - scenario.alpha) /
                static_cast<double>(scenario.replications));
  for (std::size_t t = 0; t < n_tests; ++t) {
    TestRate rate;
    rate.test = scenario.tests[t];
    rate.rejections = rejections[t];
    rate.skipped = skipped[t];
    const std::uint64_t used = scenario.replications - skipped[t];
    rate.rate = used ? static_cast<double>(rejections[t]) /
                           static_cast<double>(used)
                     : 0.0;
    rate.mc_error = mc_error;
    result.rates.push_back(rate);
  }
  return result;
}

namespace {

std::string format_number(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

std::string compact_allocation(const Allocation& a) {
  std::ostringstream os;
  os << 'a' << a.e << a.r << a.p;
  return os.str();
}

std::vector<double> default_mu_r() {
  std::vector<double> out;
  for (int i = 1; i <= 10; ++i) out.push_back(0.5 * i);
  return out;
}

std::vector<Allocation> default_allocations() {
  return {{1, 1, 1}, {2, 2, 1}, {3, 2, 1}};
}

}  // namespace

std::vector<ScenarioSpec> continuous_grid(const GridOptions& options) {
  constexpr double kMuP = 5.5;
  constexpr double kDelta = 0.8;
  constexpr std::size_t kTotal = 30;
  const std::array<std::array<double, 3>, 2> variance_patterns{
      {{1.0, 1.0, 1.0}, {1.0, 2.0, 3.0}}};
  const std::array<Family, 3> families{Family::normal, Family::lognormal_std,
                                       Family::chisq_std};

  const auto mu_rs = options.mu_r_values.empty() ? default_mu_r()
                                                 : options.mu_r_values;
  const auto allocations = options.allocations.empty() ? default_allocations()
                                                       : options.allocations;

  std::vector<ScenarioSpec> grid;
  std::uint64_t index = 0;
  for (Family family : families) {
    for (std::size_t v = 0; v < variance_patterns.size(); ++v) {
      for (const Allocation& alloc : allocations) {
        for (double mu_r : mu_rs) {
          ScenarioSpec s;
          const auto& vars = variance_patterns[v];
          s.arm_e = {family, boundary_mean(mu_r, kMuP, kDelta), vars[0], 1.0};
          s.arm_r = {family, mu_r, vars[1], 1.0};
          s.arm_p = {family, kMuP, vars[2], 1.0};
          s.sizes = alloc.sizes_for(kTotal);
          s.delta = kDelta;
          s.tests = options.tests;
          s.replications = options.replications;
          s.permutations = options.permutations;
          s.seed = derive_stream(options.seed, index++);
          std::ostringstream id;
          id << "cont-" << family_name(family) << "-v"
             << (v == 0 ? "111" : "123") << '-' << compact_allocation(alloc)
             << "-muR" << format_number(mu_r);
          s.id = id.str();
          grid.push_back(std::move(s));
        }
      }
    }
  }
  return grid;
}

std::vector<ScenarioSpec> count_grid(const GridOptions& options) {
  constexpr double kMuP = 5.5;
  constexpr double kDelta = 0.8;
  constexpr std::size_t kTotal = 60;
  const std::array<double, 2> kappas{1.0, 3.0};

  const auto mu_rs = options.mu_r_values.empty() ? default_mu_r()
                                                 : options.mu_r_values;
  const auto allocations = options.allocations.empty() ? default_allocations()
                                                       : options.allocations;

  std::vector<ScenarioSpec> grid;
  std::uint64_t index = 0;
  for (double kappa : kappas) {
    const Family family = kappa == 1.0 ? Family::poisson : Family::negbin;
    for (const Allocation& alloc : allocations) {
      for (double mu_r : mu_rs) {
        ScenarioSpec s;
        const double mu_e = boundary_mean(mu_r, kMuP, kDelta);
        s.arm_e = {family, mu_e, kappa * mu_e, kappa};
        s.arm_r = {family, mu_r, kappa * mu_r, kappa};
        s.arm_p = {family, kMuP, kappa * kMuP, kappa};
        s.sizes = alloc.sizes_for(kTotal);
        s.delta = kDelta;
        s.tests = options.tests;
        s.replications = options.replications;
        s.permutations = options.permutations;
        s.seed = derive_stream(options.seed ^ 0x636f756e74ull, index++);
        std::ostringstream id;
        id << "count-" << family_name(family) << "-k" << format_number(kappa)
           << '-' << compact_allocation(alloc) << "-muR"
           << format_number(mu_r);
        s.id = id.str();
        grid.push_back(std::move(s));
      }
    }
  }
  return grid;
}

std::vector<ScenarioSpec> builtin_grids(const GridOptions& options) {
  auto grid = continuous_grid(options);
  auto counts = count_grid(options);
  grid.insert(grid.end(), std::make_move_iterator(counts.begin()),
              std::make_move_iterator(counts.end()));
  return grid;
}

std::vector<SimulationResult> level_vs_n_sweep(
    const ScenarioSpec& base, const Allocation& allocation,
    const std::vector<std::size_t>& n_values, std::size_t threads) {
  std::vector<SimulationResult> results;
  results.reserve(n_values.size());
  for (std::size_t n : n_values) {
    ScenarioSpec s = base;
    s.sizes = allocation.sizes_for(n);
    s.seed = derive_stream(base.seed, n);
    s.id = base.id + "-n" + std::to_string(n);
    results.push_back(run_scenario(s, threads));
  }
  return results;
}

}  // namespace triarm::sim
