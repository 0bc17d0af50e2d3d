// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "lbsim/harness/runner.hpp"

namespace lbsim {

// Bumped whenever a column is added, dropped or changes meaning.
inline constexpr int kCsvSchemaVersion = 1;

std::vector<std::string> run_csv_header();
std::vector<std::string> aggregate_csv_header();

// One row per run, in the order given.
void write_run_csv(std::ostream& os, const std::vector<RunResult>& results);
// One row per (preset, point), in first-appearance order. CCT statistics
// cover completed runs only; counters cover every run that did not throw.
void write_aggregate_csv(std::ostream& os, const std::vector<RunResult>& results);

std::string csv_escape(const std::string& field);

// Exit status for a batch: 0 only when every run completed.
int batch_exit_code(const std::vector<RunResult>& results);

} // namespace lbsim
