// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#include "triarm/special_math.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "triarm/error.hpp"

namespace triarm::smath {

double std_normal_cdf(double x) {
  return 0.5 * std::erfc(-x * M_SQRT1_2);
}

// Wichura's algorithm AS 241 (PPND16): rational approximations on three
// regions of p, accurate to about 1e-16 relative.
double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::domain_error,
                "quantile argument must lie in (0,1), got " +
                    std::to_string(p));
  }

  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q *
           (((((((2509.0809287301226727 * r + 33430.575583588128105) * r +
                 67265.770927008700853) * r + 45921.953931549871457) * r +
               13731.693765509461125) * r + 1971.5909503065514427) * r +
             133.14166789178437745) * r + 3.387132872796366608) /
           (((((((5226.495278852545703 * r + 28729.085735721942674) * r +
                 39307.89580009271061) * r + 21213.794301586595867) * r +
               5394.1960214247511077) * r + 687.1870074920579083) * r +
             42.313330701600911252) * r + 1.0);
  }

  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double val;
  if (r <= 5.0) {
    r -= 1.6;
    val = (((((((7.7454501427834140764e-4 * r + 0.0227238449892691845833) * r +
                0.24178072517745061177) * r + 1.27045825245236838258) * r +
              3.64784832476320460504) * r + 5.7694972214606914055) * r +
            4.6303378461565452959) * r + 1.42343711074968357734) /
          (((((((1.05075007164441684324e-9 * r + 5.475938084995344946e-4) * r +
                0.0151986665636164571966) * r + 0.14810397642748007459) * r +
              0.68976733498510000455) * r + 1.6763848301838038494) * r +
            2.05319162663775882187) * r + 1.0);
  } else {
    r -= 5.0;
    val = (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
                0.0012426609473880784386) * r + 0.026532189526576123093) * r +
              0.29656057182850489123) * r + 1.7848265399172913358) * r +
            5.4637849111641143699) * r + 6.6579046435011037772) /
          (((((((2.04426310338993978564e-15 * r + 1.4215117583164458887e-7) * r +
                1.8463183175100546818e-5) * r + 7.868691311456132591e-4) * r +
              0.0148753612908506148525) * r + 0.13692988092273580531) * r +
            0.59983220655588793769) * r + 1.0);
  }
  return q < 0.0 ? -val : val;
}

namespace {

// Continued fraction for the incomplete beta function (modified Lentz).
double beta_cont_frac(double a, double b, double x) {
  constexpr double kTiny = 1e-300;
  constexpr int kMaxIter = 2000;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::fabs(d) < kTiny) d = kTiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= kMaxIter; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < kTiny) d = kTiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < kTiny) c = kTiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < 3e-16) break;
  }
  return h;
}

double student_t_log_pdf(double t, double nu) {
  return std::lgamma(0.5 * (nu + 1.0)) - std::lgamma(0.5 * nu) -
         0.5 * std::log(nu * M_PI) -
         0.5 * (nu + 1.0) * std::log1p(t * t / nu);
}

}  // namespace

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0) || !(x >= 0.0 && x <= 1.0)) {
    throw Error(ErrorCode::domain_error, "incomplete_beta domain");
  }
  if (x == 0.0) return 0.0;
  if (x == 1.0) return 1.0;
  const double log_front = std::lgamma(a + b) - std::lgamma(a) -
                           std::lgamma(b) + a * std::log(x) +
                           b * std::log1p(-x);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_cont_frac(a, b, x) / a;
  }
  return 1.0 - front * beta_cont_frac(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double nu) {
  if (!(nu > 0.0)) {
    throw Error(ErrorCode::domain_error, "degrees of freedom must be > 0");
  }
  if (t == 0.0) return 0.5;
  const double x = nu / (nu + t * t);
  const double tail = 0.5 * incomplete_beta(0.5 * nu, 0.5, x);
  return t < 0.0 ? tail : 1.0 - tail;
}

double student_t_quantile(double p, double nu) {
  if (!(p > 0.0 && p < 1.0)) {
    throw Error(ErrorCode::domain_error,
                "quantile argument must lie in (0,1), got " +
                    std::to_string(p));
  }
  if (!(nu > 0.0)) {
    throw Error(ErrorCode::domain_error, "degrees of freedom must be > 0");
  }
  if (p == 0.5) return 0.0;
  // Solve on the lower half and mirror.
  const bool upper = p > 0.5;
  const double pl = upper ? 1.0 - p : p;

  // Starting point: normal quantile, inflated for small nu.
  const double z = std_normal_quantile(pl);
  double t = nu > 2.0 ? z * std::sqrt(nu / (nu - 2.0)) : z * (1.0 + 2.0 / nu);
  if (t >= 0.0) t = -1.0;

  // Bracket [lo, hi] with F(lo) <= pl <= F(hi).
  double lo = t;
  double hi = 0.0;
  while (student_t_cdf(lo, nu) > pl) {
    hi = lo;
    lo *= 2.0;
    if (lo < -1e308) break;
  }

  t = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double f = student_t_cdf(t, nu) - pl;
    if (f > 0.0) {
      hi = t;
    } else {
      lo = t;
    }
    const double step = f / std::exp(student_t_log_pdf(t, nu));
    double next = t - step;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);  // bisect
    if (std::fabs(next - t) <= 1e-14 * (1.0 + std::fabs(t))) {
      t = next;
      break;
    }
    t = next;
  }
  return upper ? -t : t;
}

NBParams nb_moment_match(double mean, double variance) {
  if (!(mean > 0.0) || !std::isfinite(mean) || !std::isfinite(variance)) {
    throw Error(ErrorCode::domain_error,
                "moment matching needs a finite mean > 0");
  }
  if (variance < mean) {
    throw Error(ErrorCode::underdispersed_input,
                "variance " + std::to_string(variance) + " < mean " +
                    std::to_string(mean));
  }
  return NBParams{mean, (variance - mean) / (mean * mean)};
}

double nb_pmf(std::uint64_t x, const NBParams& params) {
  const double lambda = params.lambda;
  const double phi = params.phi;
  if (!(lambda > 0.0) || !(phi >= 0.0) || !std::isfinite(lambda) ||
      !std::isfinite(phi)) {
    throw Error(ErrorCode::domain_error, "invalid negative binomial parameters");
  }
  const auto xd = static_cast<double>(x);
  if (phi == 0.0) {  // Poisson limit
    return std::exp(-lambda + xd * std::log(lambda) - std::lgamma(xd + 1.0));
  }
  const double r = 1.0 / phi;
  const double log_p0 = -std::log1p(lambda * phi);       // log 1/(1+lambda*phi)
  const double log_q = std::log(lambda * phi) + log_p0;  // log lambda*phi/(1+lambda*phi)
  return std::exp(std::lgamma(xd + r) - std::lgamma(r) -
                  std::lgamma(xd + 1.0) + r * log_p0 + xd * log_q);
}

std::array<double, 5> nb_expected_counts(double n, double mean,
                                         double variance) {
  const NBParams params = nb_moment_match(mean, variance);
  std::array<double, 5> out{};
  double head = 0.0;
  for (std::uint64_t k = 0; k < 4; ++k) {
    out[k] = nb_pmf(k, params);
    head += out[k];
  }
  out[4] = std::max(0.0, 1.0 - head);
  for (double& v : out) v *= n;
  return out;
}

double round_half_up(double v) { return std::floor(v + 0.5); }

}  // namespace triarm::smath
