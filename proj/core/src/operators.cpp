// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/operators.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <sstream>

#include "specdet/error.hpp"
#include "specdet/linalg.hpp"

namespace specdet {

const char* to_string(OperatorKind kind) {
  switch (kind) {
    case OperatorKind::laplace: return "laplace+V";
    case OperatorKind::dirac: return "dirac";
    case OperatorKind::dirac_perturbed: return "dirac+A";
    case OperatorKind::dirac_squared: return "dirac_squared";
  }
  return "unknown";
}

TruncatedOperator::TruncatedOperator(Eigen::MatrixXcd matrix, ModeBasis basis, OperatorKind kind,
                                     Eigen::VectorXcd free_diagonal)
    : matrix_(std::move(matrix)),
      basis_(std::move(basis)),
      kind_(kind),
      free_(std::move(free_diagonal)) {
  const auto n = static_cast<Eigen::Index>(basis_.size());
  if (matrix_.rows() != n || matrix_.cols() != n || free_.size() != n) {
    throw Error(ErrorKind::invalid_argument, "TruncatedOperator: matrix dimension != basis count");
  }
  hermitian_ = linalg::is_hermitian(matrix_);
  Eigen::MatrixXcd off = matrix_;
  off.diagonal().setZero();
  diagonal_ = n == 0 || off.cwiseAbs().maxCoeff() == 0.0;
}

double TruncatedOperator::cutoff_eigenvalue() const {
  const int N = basis_.cutoff();
  double lo = INFINITY;
  for (std::size_t i = 0; i < basis_.size(); ++i) {
    const Mode& n = basis_.mode(i);
    if (std::max(std::abs(n[0]), std::abs(n[1])) == N) lo = std::min(lo, std::abs(free_[i]));
  }
  return lo;
}

Eigen::MatrixXcd convolution_matrix(const PerturbationField& V, const ModeBasis& basis) {
  if (V.dim() != basis.dim()) {
    throw Error(ErrorKind::invalid_argument, "perturbation dimension does not match the basis");
  }
  const int N = basis.cutoff();
  if (V.bandwidth() > 2 * N) {
    std::ostringstream os;
    os << "perturbation bandwidth " << V.bandwidth() << " exceeds 2N = " << 2 * N
       << " (aliasing); raise the cutoff or band-limit V";
    throw Error(ErrorKind::aliasing, os.str());
  }
  const auto n = static_cast<Eigen::Index>(basis.size());
  Eigen::MatrixXcd M = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Mode& a = basis.mode(static_cast<std::size_t>(i));
    for (const auto& [q, v] : V.coefficients()) {
      if (auto j = basis.index_of(a - q)) M(i, static_cast<Eigen::Index>(*j)) = v;
    }
  }
  return M;
}

TruncatedOperator build_laplace(const Geometry& geometry, const PerturbationField& V,
                                const ModeBasis& basis) {
  geometry.validate();
  if (geometry.kind == GeometryKind::lattice_torus) {
    throw Error(ErrorKind::invalid_argument, "build_laplace: geometry must be circle or torus2");
  }
  if (!(geometry == basis.geometry())) {
    throw Error(ErrorKind::invalid_argument, "build_laplace: basis was built for another geometry");
  }
  Eigen::MatrixXcd M = convolution_matrix(V, basis);
  Eigen::VectorXcd free(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) {
    free(static_cast<Eigen::Index>(i)) = basis.free_eigenvalue(i);
    M(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) += basis.free_eigenvalue(i);
  }
  return TruncatedOperator(std::move(M), basis, OperatorKind::laplace, std::move(free));
}

Eigen::VectorXd dirac_free_eigenvalues(const ModeBasis& basis, double m) {
  const double k = basis.geometry().wavenumber();
  Eigen::VectorXd d(static_cast<Eigen::Index>(basis.size()));
  for (std::size_t i = 0; i < basis.size(); ++i) d(static_cast<Eigen::Index>(i)) = k * basis.mode(i)[0] + m;
  return d;
}

namespace {

void check_dirac(const Geometry& geometry, double m, const ModeBasis& basis) {
  if (geometry.kind != GeometryKind::circle) {
    throw Error(ErrorKind::invalid_argument, "build_dirac: only the circle is supported");
  }
  if (!(geometry == basis.geometry())) {
    throw Error(ErrorKind::invalid_argument, "build_dirac: basis was built for another geometry");
  }
  const double r = m / geometry.wavenumber();
  if (std::abs(r - std::round(r)) < 1e-12) {
    throw Error(ErrorKind::not_invertible,
                "non-invertible base Dirac operator: m / k is an integer, kernel at n = " +
                    std::to_string(-static_cast<long>(std::round(r))));
  }
}

}  // namespace

TruncatedOperator build_dirac(const Geometry& geometry, double m, const PerturbationField& A,
                              const ModeBasis& basis) {
  check_dirac(geometry, m, basis);
  const Eigen::VectorXd d = dirac_free_eigenvalues(basis, m);
  Eigen::MatrixXcd M = convolution_matrix(A, basis);
  M.diagonal() += d.cast<cplx>();
  const auto kind = A.is_zero() ? OperatorKind::dirac : OperatorKind::dirac_perturbed;
  return TruncatedOperator(std::move(M), basis, kind, d.cast<cplx>());
}

TruncatedOperator build_dirac_squared(const Geometry& geometry, double m,
                                      const PerturbationField& A, const ModeBasis& basis,
                                      cplx z) {
  check_dirac(geometry, m, basis);
  const Eigen::VectorXd d = dirac_free_eigenvalues(basis, m);
  // D is diagonal, so the product of truncations is the truncation of the
  // product.
  Eigen::MatrixXcd M = z * convolution_matrix(A, basis);
  M.diagonal() += d.cast<cplx>();
  M = d.cast<cplx>().asDiagonal() * M;
  const Eigen::VectorXcd free = d.cwiseProduct(d).cast<cplx>();
  return TruncatedOperator(std::move(M), basis, OperatorKind::dirac_squared, free);
}

namespace {

// A with A(-n, -m) = A(n, m) commutes with the parity n -> -n and splits
// into blocks on the even and odd combinations e_n +- e_{-n}, halving the
// dense eigenproblem.
// Jacobi on the Cholesky factor costs several times a divide-and-conquer
// solve; above this block size the norm-wise error of the latter is taken.
constexpr Eigen::Index relative_accuracy_limit = 1200;

std::vector<cplx> block_spectrum(const Eigen::MatrixXcd& M) {
  if (M.rows() <= relative_accuracy_limit && linalg::is_hermitian(M, 0.0)) {
    const auto w = linalg::eigvals_hpd_relative(M);
    if (!w.empty()) return std::vector<cplx>(w.begin(), w.end());
  }
  return linalg::eigvals_auto(M);
}

std::optional<std::vector<cplx>> parity_split_spectrum(const Eigen::MatrixXcd& A,
                                                       const ModeBasis& basis) {
  const Eigen::Index n = A.rows();
  std::vector<Eigen::Index> R(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Mode& m = basis.mode(std::size_t(i));
    R[i] = Eigen::Index(*basis.index_of(Mode{-m[0], -m[1]}));
  }
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) {
      if (A(R[i], R[j]) != A(i, j)) return std::nullopt;
    }
  }
  std::vector<Eigen::Index> reps, fixed;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (R[i] == i) fixed.push_back(i);
    else if (i < R[i]) reps.push_back(i);
  }
  const Eigen::Index np = Eigen::Index(reps.size()), nf = Eigen::Index(fixed.size());
  Eigen::MatrixXcd even(np + nf, np + nf), odd(np, np);
  const double r2 = std::sqrt(2.0);
  for (Eigen::Index b = 0; b < np; ++b) {
    for (Eigen::Index a = 0; a < np; ++a) {
      even(a, b) = A(reps[a], reps[b]) + A(reps[a], R[reps[b]]);
      odd(a, b) = A(reps[a], reps[b]) - A(reps[a], R[reps[b]]);
    }
    for (Eigen::Index f = 0; f < nf; ++f) {
      even(np + f, b) = r2 * A(fixed[f], reps[b]);
      even(b, np + f) = r2 * A(reps[b], fixed[f]);
    }
  }
  for (Eigen::Index f = 0; f < nf; ++f) {
    for (Eigen::Index g = 0; g < nf; ++g) even(np + f, np + g) = A(fixed[f], fixed[g]);
  }
  auto s = block_spectrum(even);
  const auto o = block_spectrum(odd);
  s.insert(s.end(), o.begin(), o.end());
  linalg::sort_spectrum(s);
  return s;
}

}  // namespace

std::vector<cplx> eigenvalues(const TruncatedOperator& op) {
  if (op.diagonal()) {
    const Eigen::VectorXcd d = op.matrix().diagonal();
    std::vector<cplx> s(d.data(), d.data() + d.size());
    linalg::sort_spectrum(s);
    return s;
  }
  return eigenvalues(op.matrix(), op.basis());
}

std::vector<cplx> eigenvalues(const Eigen::MatrixXcd& A, const ModeBasis& basis) {
  if (A.rows() != Eigen::Index(basis.size()) || A.cols() != A.rows()) {
    throw Error(ErrorKind::invalid_argument, "eigenvalues: matrix does not match the basis");
  }
  if (A.rows() >= 64) {
    if (auto s = parity_split_spectrum(A, basis)) return *s;
  }
  return block_spectrum(A);
}

Eigen::MatrixXcd green_compose(const TruncatedOperator& op, const PerturbationField& V) {
  const Eigen::MatrixXcd Vm = convolution_matrix(V, op.basis());
  const Eigen::MatrixXcd& P = op.matrix();
  const double scale = std::max(1.0, P.cwiseAbs().maxCoeff());
  if (op.diagonal()) {
    const Eigen::VectorXcd d = P.diagonal();
    const double smallest = d.cwiseAbs().minCoeff();
    if (smallest <= 1e-12 * scale) {
      std::ostringstream os;
      os << "green_compose: operator is not invertible, smallest |eigenvalue| = " << smallest;
      throw Error(ErrorKind::not_invertible, os.str());
    }
    return d.cwiseInverse().asDiagonal() * Vm;
  }
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(P);
  if (!(lu.rcond() > 1e-12)) {
    const auto s = eigenvalues(op);
    double smallest = INFINITY;
    for (const auto& l : s) smallest = std::min(smallest, std::abs(l));
    if (smallest <= 1e-12 * scale) {
      std::ostringstream os;
      os << "green_compose: operator is near singular, smallest |eigenvalue| = " << smallest;
      throw Error(ErrorKind::not_invertible, os.str());
    }
  }
  return lu.solve(Vm);
}

namespace {

void check_lattice_args(int n, double length, double mass, const std::vector<double>& V) {
  if (n < 2) throw Error(ErrorKind::invalid_argument, "lattice: size must be >= 2");
  if (!(length > 0)) throw Error(ErrorKind::invalid_argument, "lattice: length must be > 0");
  if (!(mass >= 0)) throw Error(ErrorKind::invalid_argument, "lattice: mass must be >= 0");
  if (!V.empty() && V.size() != std::size_t(n) * n) {
    throw Error(ErrorKind::invalid_argument, "lattice: V must have n*n samples");
  }
}

template <class Add>
void lattice_stencil(int n, double length, double mass, const std::vector<double>& V, Add add) {
  const double h = length / n;
  const double inv = 1.0 / (h * h);
  auto id = [n](int i, int j) { return ((i + n) % n) * n + ((j + n) % n); };
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const int r = id(i, j);
      add(r, r, 4 * inv + mass * mass + (V.empty() ? 0.0 : V[r]));
      add(r, id(i + 1, j), -inv);
      add(r, id(i - 1, j), -inv);
      add(r, id(i, j + 1), -inv);
      add(r, id(i, j - 1), -inv);
    }
  }
}

}  // namespace

Eigen::MatrixXd lattice_laplacian(int n, double length, double mass, const std::vector<double>& V) {
  check_lattice_args(n, length, mass, V);
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(n * n, n * n);
  lattice_stencil(n, length, mass, V, [&](int r, int c, double v) { M(r, c) += v; });
  return M;
}

Eigen::SparseMatrix<double> lattice_laplacian_sparse(int n, double length, double mass,
                                                     const std::vector<double>& V) {
  check_lattice_args(n, length, mass, V);
  std::vector<Eigen::Triplet<double>> t;
  t.reserve(std::size_t(5) * n * n);
  lattice_stencil(n, length, mass, V, [&](int r, int c, double v) { t.emplace_back(r, c, v); });
  Eigen::SparseMatrix<double> M(n * n, n * n);
  M.setFromTriplets(t.begin(), t.end());
  return M;
}

Eigen::MatrixXd build_lattice_laplace(const Geometry& geometry, const std::vector<double>& V) {
  geometry.validate();
  if (geometry.kind != GeometryKind::lattice_torus) {
    throw Error(ErrorKind::invalid_argument, "build_lattice_laplace: geometry must be lattice_torus");
  }
  return lattice_laplacian(geometry.lattice_size, geometry.length, geometry.mass, V);
}

}  // namespace specdet
