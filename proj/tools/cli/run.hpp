// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cli/config.hpp"

namespace specdet::cli {

// Exit codes of run() and the specdet binary.
enum ExitCode : int { exit_pass = 0, exit_check_failed = 1, exit_config_error = 2, exit_runtime_error = 3 };

struct Check {
  std::string name;
  double value = 0.0;
  // NaN for pass/fail checks without a numeric bound.
  double tolerance = 0.0;
  bool pass = false;
  std::string note;
};

// Cells are preformatted; doubles use %.17g so reruns are byte-identical.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
};

struct ExperimentOutput {
  Table table;
  std::vector<Check> checks;
  std::vector<std::string> methods;
  json results = json::object();
};

struct RunOptions {
  bool use_cache = true;
  // Defaults to SPECDET_CACHE_DIR, else <output>/cache.
  std::optional<std::filesystem::path> cache_dir;
  // Progress and cache warnings; silent when null.
  std::ostream* log = nullptr;
};

struct RunResult {
  int exit_code = exit_pass;
  json summary;
  std::filesystem::path csv_path;
  std::filesystem::path summary_path;
};

// Runs config.experiment and writes <output>/<experiment>.csv and
// <output>/<experiment>.json.  Library errors raised by the experiment
// are recorded in the summary and give exit_runtime_error; ConfigError
// propagates.
RunResult run(const ExperimentConfig& config, const RunOptions& options = {});

std::string format_double(double x);
std::string render_csv(const ExperimentConfig& config, const ExperimentOutput& output);

const char* version_string();

}  // namespace specdet::cli
