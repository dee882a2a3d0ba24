// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <vector>

#include "specdet/geometry.hpp"

// Thin LAPACK layer.  Eigen is the container type; factorizations of the
// large dense matrices go through LAPACKE/OpenBLAS.
namespace specdet::linalg {

// Sorted by (real part, imaginary part).
void sort_spectrum(std::vector<cplx>& spectrum);

std::vector<cplx> eigvals_general(const Eigen::MatrixXcd& a);
std::vector<double> eigvals_hermitian(const Eigen::MatrixXcd& a);
std::vector<double> eigvals_symmetric(const Eigen::MatrixXd& a);
// Eigenvalues of a Hermitian positive definite matrix to high relative
// accuracy: Cholesky, then one-sided Jacobi singular values of the factor.
// Small eigenvalues of diag + perturbation come out with relative rather
// than norm-wise error.  Empty when a is not positive definite.
std::vector<double> eigvals_hpd_relative(const Eigen::MatrixXcd& a);

// Picks the cheapest applicable solver: real symmetric, complex Hermitian
// or general.  Result is sorted.
std::vector<cplx> eigvals_auto(const Eigen::MatrixXcd& a);

double hermitian_defect(const Eigen::MatrixXcd& a);
bool is_hermitian(const Eigen::MatrixXcd& a, double tol = 1e-14);
bool is_real(const Eigen::MatrixXcd& a);

struct LogDet {
  cplx log_value{0.0, 0.0};
  bool singular = false;
};

// Partial pivoting LU.  The imaginary part of a real determinant's log is
// pi for negative values.
LogDet logdet_lu(const Eigen::MatrixXcd& a);
LogDet logdet_lu(const Eigen::MatrixXd& a);

// Cholesky log det of an SPD matrix; throws Error(not_invertible) naming the
// failing pivot.
double logdet_cholesky(const Eigen::MatrixXd& a);

// 1-norm condition estimate from an LU factorization.
double condition_estimate(const Eigen::MatrixXcd& a);

}  // namespace specdet::linalg
