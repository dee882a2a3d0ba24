// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <map>
#include <vector>

#include "specdet/geometry.hpp"

namespace specdet {

// Smooth compactly supported bump  amplitude * exp(1 - 1/(1 - r^2/R^2))
// for periodic distance r < R from center.
struct Bump {
  std::array<double, 2> center{0.0, 0.0};
  double radius = 1.0;
  double amplitude = 1.0;

  double operator()(const Geometry& g, double x, double y = 0.0) const;
  // Periodic intervals overlap test on the real-space supports.
  bool disjoint_from(const Bump& other, const Geometry& g) const;
};

// Band-limited potential V(x) = sum_n Vhat(n) exp(i k n.x), k = 2 pi / L.
// In the orthonormal Fourier basis the multiplication operator has matrix
// elements Vhat(n - m).
class PerturbationField {
 public:
  explicit PerturbationField(int dim = 1);

  static PerturbationField from_coefficients(int dim, std::map<Mode, cplx> coeffs);
  static PerturbationField constant(int dim, cplx c);
  static PerturbationField cosine(int dim, const Mode& k, double amplitude);
  static PerturbationField sine(int dim, const Mode& k, double amplitude);
  // Projects real-space samples on an n^d grid (row-major, first axis
  // major) onto the modes |n_i| <= band.
  static PerturbationField from_grid(const Geometry& g, const std::vector<double>& samples,
                                     int grid, int band);
  static PerturbationField from_bump(const Geometry& g, const Bump& bump, int band);

  int dim() const { return dim_; }
  const std::map<Mode, cplx>& coefficients() const { return coeffs_; }
  cplx coefficient(const Mode& n) const;
  int bandwidth() const;
  bool is_zero() const { return coeffs_.empty(); }
  // Hermitian symmetry Vhat(-n) = conj(Vhat(n)), i.e. V real valued.
  bool is_real() const;

  cplx mean() const { return coefficient(Mode{0, 0}); }
  cplx integral(const Geometry& g) const { return mean() * g.volume(); }

  cplx evaluate(const Geometry& g, double x, double y = 0.0) const;
  // Real part of V on the n^d grid x_j = j L / n.
  std::vector<double> sample_grid(const Geometry& g, int n) const;
  double min_value(const Geometry& g, int grid = 256) const;

  PerturbationField scaled(cplx s) const;
  PerturbationField operator+(const PerturbationField& other) const;
  PerturbationField operator-(const PerturbationField& other) const;

 private:
  void add(const Mode& n, cplx v);

  int dim_;
  std::map<Mode, cplx> coeffs_;
};

// Integral of a * b over the geometry, exact in Fourier space.
cplx integral_of_product(const PerturbationField& a, const PerturbationField& b,
                         const Geometry& g);

}  // namespace specdet
