// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <vector>

#include "specdet/geometry.hpp"
#include "specdet/perturbation.hpp"

namespace specdet {

enum class OperatorKind { laplace, dirac, dirac_perturbed, dirac_squared };

const char* to_string(OperatorKind kind);

// Dense Galerkin matrix of a perturbed operator in the Fourier basis.
// free_diagonal holds the unperturbed eigenvalues in basis order.
class TruncatedOperator {
 public:
  TruncatedOperator(Eigen::MatrixXcd matrix, ModeBasis basis, OperatorKind kind,
                    Eigen::VectorXcd free_diagonal);

  const Eigen::MatrixXcd& matrix() const { return matrix_; }
  const ModeBasis& basis() const { return basis_; }
  const Geometry& geometry() const { return basis_.geometry(); }
  OperatorKind kind() const { return kind_; }
  const Eigen::VectorXcd& free_diagonal() const { return free_; }
  std::size_t size() const { return basis_.size(); }
  bool hermitian() const { return hermitian_; }
  bool diagonal() const { return diagonal_; }

  // Smallest |free eigenvalue| over the boundary shell of the truncation.
  double cutoff_eigenvalue() const;

 private:
  Eigen::MatrixXcd matrix_;
  ModeBasis basis_;
  OperatorKind kind_;
  Eigen::VectorXcd free_;
  bool hermitian_;
  bool diagonal_;
};

// Matrix Vhat(n - m) of multiplication by V.  Rejects bandwidth > 2N since
// those modes cannot couple any pair inside the box and signal aliasing.
Eigen::MatrixXcd convolution_matrix(const PerturbationField& V, const ModeBasis& basis);

TruncatedOperator build_laplace(const Geometry& geometry, const PerturbationField& V,
                                const ModeBasis& basis);
inline TruncatedOperator free_laplace(const ModeBasis& basis) {
  return build_laplace(basis.geometry(), PerturbationField(basis.dim()), basis);
}

// D = -i d/dx + m on the circle, eigenvalues k n + m.  A = 0 gives kind
// dirac, otherwise dirac_perturbed with matrix D + A.
TruncatedOperator build_dirac(const Geometry& geometry, double m, const PerturbationField& A,
                              const ModeBasis& basis);
// D (D + zA), a Laplace type operator with free part D^2.
TruncatedOperator build_dirac_squared(const Geometry& geometry, double m,
                                      const PerturbationField& A, const ModeBasis& basis,
                                      cplx z = 1.0);
// Eigenvalues k n + m of the free Dirac operator in basis order.
Eigen::VectorXd dirac_free_eigenvalues(const ModeBasis& basis, double m);

// Full spectrum sorted by (real, imag).
std::vector<cplx> eigenvalues(const TruncatedOperator& op);
// Spectrum of a matrix in the mode basis.  Matrices invariant under the
// parity n -> -n are diagonalized blockwise.
std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& A, const ModeBasis& basis);

// P^{-1} V in the mode basis.
Eigen::MatrixXcd green_compose(const TruncatedOperator& op, const PerturbationField& V);

// Five point Laplacian / mesh^2 + m^2 + diag(V) on an n x n periodic grid
// with side length L.  Sites are ordered row-major.  Accepts m >= 0 and
// n >= 2 so the kernel of the massless operator can be inspected.
Eigen::MatrixXd lattice_laplacian(int n, double length, double mass,
                                  const std::vector<double>& V = {});
Eigen::SparseMatrix<double> lattice_laplacian_sparse(int n, double length, double mass,
                                                     const std::vector<double>& V = {});
Eigen::MatrixXd build_lattice_laplace(const Geometry& geometry, const std::vector<double>& V);

}  // namespace specdet
