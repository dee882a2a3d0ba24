// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "specdet/geometry.hpp"
#include "specdet/operators.hpp"
#include "specdet/perturbation.hpp"

namespace specdet::cli {

// Bumped when the operator assembly or eigen solver changes results.
inline constexpr int builder_version = 2;
inline constexpr std::uint32_t cache_format_version = 1;

// Hex SHA-256 over geometry, the exact field coefficients, operator kind,
// cutoff, the mode ordering version and builder_version.
std::string eigen_cache_key(const Geometry& geometry, const PerturbationField& V, OperatorKind kind, int cutoff,
                            int builder = builder_version);

// One file per key:  magic "SDEC", format version, key, count, count
// complex eigenvalues as raw doubles, then the SHA-256 of everything before
// it.  Writers go through a temporary file and rename, so a reader sees an
// old entry, a new entry or none.
class EigenCache {
 public:
  using Warn = std::function<void(const std::string&)>;

  explicit EigenCache(std::filesystem::path dir, std::uint32_t format_version = cache_format_version,
                      Warn warn = {});

  // Miss on absent, truncated, corrupt or foreign-version entries; the last
  // three are reported through warn.
  std::optional<std::vector<cplx>> get(const std::string& key) const;
  void put(const std::string& key, const std::vector<cplx>& eigenvalues) const;

  std::filesystem::path entry_path(const std::string& key) const;
  const std::filesystem::path& dir() const { return dir_; }

 private:
  std::filesystem::path dir_;
  std::uint32_t version_;
  Warn warn_;
};

// Location from SPECDET_CACHE_DIR, else <fallback>.
std::filesystem::path cache_dir_from_env(const std::filesystem::path& fallback);

}  // namespace specdet::cli
