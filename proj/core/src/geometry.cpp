// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/geometry.hpp"

#include <cmath>
#include <string>

#include "specdet/error.hpp"

namespace specdet {

const char* to_string(GeometryKind kind) {
  switch (kind) {
    case GeometryKind::circle: return "circle";
    case GeometryKind::torus2: return "torus2";
    case GeometryKind::lattice_torus: return "lattice_torus";
  }
  return "unknown";
}

Geometry Geometry::circle(double length, double mass) {
  Geometry g{GeometryKind::circle, length, mass, 0};
  g.validate();
  return g;
}

Geometry Geometry::torus2(double length, double mass) {
  Geometry g{GeometryKind::torus2, length, mass, 0};
  g.validate();
  return g;
}

Geometry Geometry::lattice_torus(double length, double mass, int size) {
  Geometry g{GeometryKind::lattice_torus, length, mass, size};
  g.validate();
  return g;
}

double Geometry::volume() const {
  return dim() == 1 ? length : length * length;
}

double Geometry::mesh() const {
  if (kind != GeometryKind::lattice_torus) {
    throw Error(ErrorKind::invalid_argument, "geometry: mesh is defined for lattice_torus only");
  }
  return length / lattice_size;
}

void Geometry::validate() const {
  if (!(length > 0) || !std::isfinite(length)) {
    throw Error(ErrorKind::invalid_argument, "geometry.length: must be a positive finite number");
  }
  if (!(mass > 0) || !std::isfinite(mass)) {
    throw Error(ErrorKind::invalid_argument, "geometry.mass: must be > 0 (operator invertibility)");
  }
  if (kind == GeometryKind::lattice_torus && lattice_size < 4) {
    throw Error(ErrorKind::invalid_argument, "geometry.lattice_size: must be >= 4");
  }
}

ModeBasis::ModeBasis(const Geometry& geometry, int cutoff)
    : geometry_(geometry), cutoff_(cutoff) {
  geometry_.validate();
  if (geometry_.kind == GeometryKind::lattice_torus) {
    throw Error(ErrorKind::invalid_argument, "ModeBasis: lattice torus has no Fourier truncation");
  }
  if (cutoff < 1) {
    throw Error(ErrorKind::invalid_argument, "cutoff: must be a positive integer");
  }
  const int w = 2 * cutoff + 1;
  if (dim() == 1) {
    modes_.reserve(w);
    for (int a = -cutoff; a <= cutoff; ++a) modes_.push_back({a, 0});
  } else {
    modes_.reserve(static_cast<std::size_t>(w) * w);
    for (int a = -cutoff; a <= cutoff; ++a)
      for (int b = -cutoff; b <= cutoff; ++b) modes_.push_back({a, b});
  }
  free_.reserve(modes_.size());
  for (const auto& n : modes_) free_.push_back(free_eigenvalue(n));
}

std::optional<std::size_t> ModeBasis::index_of(const Mode& n) const {
  const int N = cutoff_;
  if (std::abs(n[0]) > N) return std::nullopt;
  if (dim() == 1) {
    if (n[1] != 0) return std::nullopt;
    return static_cast<std::size_t>(n[0] + N);
  }
  if (std::abs(n[1]) > N) return std::nullopt;
  return static_cast<std::size_t>(n[0] + N) * (2 * N + 1) + (n[1] + N);
}

double ModeBasis::free_eigenvalue(const Mode& n) const {
  const double k = geometry_.wavenumber();
  const double n2 = double(n[0]) * n[0] + double(n[1]) * n[1];
  return n2 * k * k + geometry_.mass * geometry_.mass;
}

double ModeBasis::cutoff_eigenvalue() const {
  return free_eigenvalue(Mode{cutoff_, 0});
}

}  // namespace specdet
