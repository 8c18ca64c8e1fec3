// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#include "triarm/io.hpp"

#include <charconv>
#include <fstream>
#include <ostream>
#include <system_error>

namespace triarm::io {

std::string format_double(double v) {
  char buf[64];
  const auto result = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, result.ptr);
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() &&
         (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

[[noreturn]] void parse_fail(const std::string& path, std::size_t line,
                             const std::string& message) {
  throw Error(ErrorCode::parse_error,
              path + ":" + std::to_string(line) + ": " + message);
}

}  // namespace

TrialData read_trial_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::file_not_found, "cannot open " + path);
  }

  std::vector<double> arms[3];
  std::string line;
  std::size_t line_no = 0;

  if (!std::getline(in, line)) {
    parse_fail(path, 1, "missing header 'group,value'");
  }
  ++line_no;
  if (trim(line) != "group,value") {
    parse_fail(path, line_no, "header must be 'group,value'");
  }

  while (std::getline(in, line)) {
    ++line_no;
    const std::string_view row = trim(line);
    if (row.empty()) continue;
    const std::size_t comma = row.find(',');
    if (comma == std::string_view::npos) {
      parse_fail(path, line_no, "expected 'group,value'");
    }
    const std::string_view group = trim(row.substr(0, comma));
    const std::string_view value_text = trim(row.substr(comma + 1));

    int arm_index;
    if (group == "E") {
      arm_index = 0;
    } else if (group == "R") {
      arm_index = 1;
    } else if (group == "P") {
      arm_index = 2;
    } else {
      parse_fail(path, line_no,
                 "group must be E, R or P, got '" + std::string(group) + "'");
    }

    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(
        value_text.data(), value_text.data() + value_text.size(), value);
    if (ec != std::errc() || ptr != value_text.data() + value_text.size()) {
      parse_fail(path, line_no,
                 "cannot parse value '" + std::string(value_text) + "'");
    }
    arms[arm_index].push_back(value);
  }

  return TrialData(std::move(arms[0]), std::move(arms[1]),
                   std::move(arms[2]));
}

std::string simulation_csv_header() {
  return "scenario_id,family_E,family_R,family_P,n_E,n_R,n_P,"
         "mu_E,mu_R,mu_P,var_E,var_R,var_P,kappa,delta,alpha,"
         "test,replications,permutations,seed,rejections,skipped,"
         "alpha_hat,mc_error";
}

void write_simulation_rows(std::ostream& os,
                           const sim::SimulationResult& result) {
  const auto& s = result.scenario;
  for (const auto& rate : result.rates) {
    os << s.id << ',' << sim::family_name(s.arm_e.family) << ','
       << sim::family_name(s.arm_r.family) << ','
       << sim::family_name(s.arm_p.family) << ',' << s.sizes[0] << ','
       << s.sizes[1] << ',' << s.sizes[2] << ',' << format_double(s.arm_e.mu)
       << ',' << format_double(s.arm_r.mu) << ',' << format_double(s.arm_p.mu)
       << ',' << format_double(s.arm_e.sigma_sq) << ','
       << format_double(s.arm_r.sigma_sq) << ','
       << format_double(s.arm_p.sigma_sq) << ','
       << format_double(s.arm_e.kappa) << ',' << format_double(s.delta) << ','
       << format_double(s.alpha) << ',' << test_variant_name(rate.test) << ','
       << result.replications << ',' << s.permutations << ',' << s.seed << ','
       << rate.rejections << ',' << rate.skipped << ','
       << format_double(rate.rate) << ',' << format_double(rate.mc_error)
       << '\n';
  }
}

void write_simulation_csv(std::ostream& os,
                          std::span<const sim::SimulationResult> results) {
  os << simulation_csv_header() << '\n';
  for (const auto& result : results) {
    write_simulation_rows(os, result);
  }
}

}  // namespace triarm::io
