// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "specdet/geometry.hpp"
#include "specdet/perturbation.hpp"

namespace specdet::cli {

using json = nlohmann::json;

// Validation failure.  path() is the dotted field path, e.g. geometry.mass
// or perturbation[2].radius.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string path, const std::string& message);
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

const std::vector<std::string>& experiment_names();

// One term of the potential.  type is one of constant, cos, sin,
// coefficient (a single Fourier coefficient re + i im at mode) or bump
// (projected onto |n_i| <= band).
struct PerturbationTerm {
  std::string type;
  Mode mode{0, 0};
  double amplitude = 0.0;
  double re = 0.0;
  double im = 0.0;
  Bump bump;
  int band = 0;
};

PerturbationField build_field(const std::vector<PerturbationTerm>& terms, const Geometry& geometry);

struct ExperimentConfig {
  std::string experiment;
  Geometry geometry;
  std::vector<PerturbationTerm> perturbation;
  int cutoff = 0;
  // Per-experiment method selections, defaults filled in.
  json methods = json::object();
  // Per-experiment tolerances, defaults filled in.
  json tolerances = json::object();
  std::uint64_t seed = 0;
  std::string output = "specdet-out";

  PerturbationField field() const { return build_field(perturbation, geometry); }
};

// Defaults for an experiment; a config only needs to name the experiment.
ExperimentConfig default_config(const std::string& experiment);

ExperimentConfig parse_config(const json& doc);
json to_json(const ExperimentConfig& config);
// Accepts a config document or a run summary (its "config" member).
ExperimentConfig load_config(const std::filesystem::path& path);

// SHA-256 of the canonical serialization without the output directory.
std::string config_hash(const ExperimentConfig& config);

std::string sha256_hex(const void* data, std::size_t size);
inline std::string sha256_hex(const std::string& s) { return sha256_hex(s.data(), s.size()); }

}  // namespace specdet::cli
