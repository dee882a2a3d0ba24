// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

#include "cli/config.hpp"
#include "cli/run.hpp"

namespace {

struct Flags {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<int> cutoff;
  bool no_cache = false;
};

void add_flags(CLI::App* app, Flags& f) {
  app->add_option("--config", f.config, "Experiment config or a previous run summary (JSON)");
  app->add_option("--out", f.out, "Output directory");
  app->add_option("--seed", f.seed, "Seed override");
  app->add_option("--cutoff", f.cutoff, "Basis cutoff N override");
  app->add_flag("--no-cache", f.no_cache, "Bypass the eigenvalue cache");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace specdet::cli;
  CLI::App app{"Spectral determinants of perturbed Laplace and Dirac operators"};
  app.set_version_flag("--version", version_string());
  app.require_subcommand(1);
  Flags flags;
  std::string chosen;
  CLI::App* generic = app.add_subcommand("run", "Run the experiment named in --config");
  add_flags(generic, flags);
  generic->callback([&] { chosen = "run"; });
  for (const auto& name : experiment_names()) {
    CLI::App* sub = app.add_subcommand(name, "Run the " + name + " experiment");
    add_flags(sub, flags);
    sub->callback([&chosen, name] { chosen = name; });
  }
  CLI11_PARSE(app, argc, argv);

  try {
    if (chosen == "run" && flags.config.empty()) throw ConfigError("config", "run needs --config");
    ExperimentConfig config = flags.config.empty() ? default_config(chosen) : load_config(flags.config);
    if (chosen != "run" && config.experiment != chosen)
      throw ConfigError("experiment", "config names '" + config.experiment + "' but the subcommand is " + chosen);
    if (flags.seed) config.seed = *flags.seed;
    if (flags.cutoff) {
      if (*flags.cutoff < 1) throw ConfigError("cutoff", "must be at least 1");
      config.cutoff = *flags.cutoff;
    }
    if (!flags.out.empty()) config.output = flags.out;

    RunOptions options;
    options.use_cache = !flags.no_cache;
    options.log = &std::cerr;
    const RunResult r = run(config, options);
    for (const auto& c : r.summary.at("checks"))
      std::cout << c.at("name").get<std::string>() << ": " << (c.at("pass").get<bool>() ? "PASS" : "FAIL")
                << " value=" << c.at("value").dump() << " tolerance=" << c.at("tolerance").dump() << '\n';
    if (r.summary.contains("error")) std::cout << "error: " << r.summary.at("error").get<std::string>() << '\n';
    std::cout << config.experiment << ": " << (r.exit_code == exit_pass ? "PASS" : "FAIL") << "  "
              << r.csv_path.string() << "  " << r.summary_path.string() << '\n';
    return r.exit_code;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return exit_runtime_error;
  }
}
