// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <optional>
#include <vector>

namespace specdet {

using cplx = std::complex<double>;

inline constexpr double pi = 3.14159265358979323846;
inline constexpr double euler_gamma = 0.57721566490153286061;

enum class GeometryKind { circle, torus2, lattice_torus };

const char* to_string(GeometryKind kind);

// Flat model space.  Circle has d = 1, the tori have d = 2.  The lattice
// torus carries the number of sites per side in lattice_size.
struct Geometry {
  GeometryKind kind = GeometryKind::circle;
  double length = 2 * pi;
  double mass = 1.0;
  int lattice_size = 0;

  static Geometry circle(double length, double mass);
  static Geometry torus2(double length, double mass);
  static Geometry lattice_torus(double length, double mass, int size);

  int dim() const { return kind == GeometryKind::circle ? 1 : 2; }
  double volume() const;
  double wavenumber() const { return 2 * pi / length; }
  double mesh() const;

  // Throws Error(invalid_argument) naming the offending field.
  void validate() const;

  friend bool operator==(const Geometry&, const Geometry&) = default;
};

// Fourier mode index.  For d = 1 the second component is always zero.
using Mode = std::array<int, 2>;

inline Mode operator-(const Mode& a, const Mode& b) {
  return {a[0] - b[0], a[1] - b[1]};
}
inline Mode operator+(const Mode& a, const Mode& b) {
  return {a[0] + b[0], a[1] + b[1]};
}
inline Mode operator-(const Mode& a) { return {-a[0], -a[1]}; }

// Galerkin truncation |n_i| <= N of the Fourier basis on a circle or
// 2-torus.  Modes are ordered lexicographically, first component major.
class ModeBasis {
 public:
  // Bumped whenever the mode ordering changes; caches key on it.
  static constexpr int ordering_version = 1;

  ModeBasis(const Geometry& geometry, int cutoff);

  const Geometry& geometry() const { return geometry_; }
  int cutoff() const { return cutoff_; }
  int dim() const { return geometry_.dim(); }
  std::size_t size() const { return modes_.size(); }

  const Mode& mode(std::size_t i) const { return modes_[i]; }
  const std::vector<Mode>& modes() const { return modes_; }
  std::optional<std::size_t> index_of(const Mode& n) const;

  double free_eigenvalue(std::size_t i) const { return free_[i]; }
  const std::vector<double>& free_eigenvalues() const { return free_; }
  // |n|^2 (2 pi / L)^2 + m^2 for an arbitrary mode, inside the box or not.
  double free_eigenvalue(const Mode& n) const;

  // Smallest free eigenvalue on the boundary shell max_i |n_i| = N.  Sets
  // the scale of the truncation error in heat traces.
  double cutoff_eigenvalue() const;

 private:
  Geometry geometry_;
  int cutoff_;
  std::vector<Mode> modes_;
  std::vector<double> free_;
};

}  // namespace specdet
