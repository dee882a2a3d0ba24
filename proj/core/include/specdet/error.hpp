// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace specdet {

enum class ErrorKind {
  invalid_argument,
  aliasing,
  not_invertible,
  cut_violation,
  fit_failure,
  solver_failure,
  route_disagreement,
  divergent,
  io,
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type.  The kind lets
// callers distinguish plumbing errors from numerical diagnostics.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace specdet
