// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/error.hpp"

namespace specdet {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid_argument";
    case ErrorKind::aliasing: return "aliasing";
    case ErrorKind::not_invertible: return "not_invertible";
    case ErrorKind::cut_violation: return "cut_violation";
    case ErrorKind::fit_failure: return "fit_failure";
    case ErrorKind::solver_failure: return "solver_failure";
    case ErrorKind::route_disagreement: return "route_disagreement";
    case ErrorKind::divergent: return "divergent";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(what), kind_(kind) {}

}  // namespace specdet
