// Copyright 2026 the triarm authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>
#include <span>
#include <string>

#include "triarm/simulate.hpp"
#include "triarm/trial.hpp"

namespace triarm::io {

/// Shortest decimal representation that round-trips to the same double.
std::string format_double(double v);

/// Reads a trial from a CSV file with header `group,value`; group is one
/// of E, R, P. Throws FileNotFound or ParseError (with line number), and
/// ValidationError for invalid arms.
TrialData read_trial_csv(const std::string& path);

/// Column order of the simulation CSV; documented in the README and kept
/// stable.
std::string simulation_csv_header();

/// One CSV row per (scenario, test).
void write_simulation_rows(std::ostream& os, const sim::SimulationResult& result);

void write_simulation_csv(std::ostream& os,
                          std::span<const sim::SimulationResult> results);

}  // namespace triarm::io
