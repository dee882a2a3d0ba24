// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <complex>
#define lapack_complex_float std::complex<float>
#define lapack_complex_double std::complex<double>
#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specdet/error.hpp"
#include "specdet/linalg.hpp"

namespace specdet::linalg {

namespace {

[[noreturn]] void solver_failed(const char* routine, lapack_int info, const Eigen::MatrixXcd& a) {
  std::ostringstream os;
  os << routine << " failed to converge (info=" << info << "), dim=" << a.rows()
     << ", norm1=" << a.cwiseAbs().colwise().sum().maxCoeff();
  try {
    os << ", cond1~" << condition_estimate(a);
  } catch (const std::exception&) {
    os << ", cond1 unavailable";
  }
  throw Error(ErrorKind::solver_failure, os.str());
}

}  // namespace

void sort_spectrum(std::vector<cplx>& s) {
  std::sort(s.begin(), s.end(), [](const cplx& a, const cplx& b) {
    if (a.real() != b.real()) return a.real() < b.real();
    return a.imag() < b.imag();
  });
}

std::vector<cplx> eigvals_general(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n == 0) return {};
  Eigen::MatrixXcd work = a;
  std::vector<cplx> w(n);
  const lapack_int info = LAPACKE_zgeev(LAPACK_COL_MAJOR, 'N', 'N', n, work.data(), n, w.data(),
                                        nullptr, 1, nullptr, 1);
  if (info != 0) solver_failed("zgeev", info, a);
  sort_spectrum(w);
  return w;
}

std::vector<double> eigvals_hermitian(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n == 0) return {};
  Eigen::MatrixXcd work = a;
  std::vector<double> w(n);
  const lapack_int info = LAPACKE_zheevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
  if (info != 0) solver_failed("zheevd", info, a);
  return w;
}

std::vector<double> eigvals_symmetric(const Eigen::MatrixXd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n == 0) return {};
  Eigen::MatrixXd work = a;
  std::vector<double> w(n);
  const lapack_int info = LAPACKE_dsyevd(LAPACK_COL_MAJOR, 'N', 'L', n, work.data(), n, w.data());
  if (info != 0) solver_failed("dsyevd", info, a.cast<cplx>());
  return w;
}

std::vector<double> eigvals_hpd_relative(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n == 0) return {};
  std::vector<double> sva(n), stat(6);
  lapack_int info;
  if (is_real(a)) {
    Eigen::MatrixXd L = a.real();
    if (LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, L.data(), n) != 0) return {};
    L.triangularView<Eigen::StrictlyUpper>().setZero();
    info = LAPACKE_dgesvj(LAPACK_COL_MAJOR, 'L', 'N', 'N', n, n, L.data(), n, sva.data(), 0, nullptr, 1,
                          stat.data());
  } else {
    Eigen::MatrixXcd L = a;
    if (LAPACKE_zpotrf(LAPACK_COL_MAJOR, 'L', n, L.data(), n) != 0) return {};
    L.triangularView<Eigen::StrictlyUpper>().setZero();
    info = LAPACKE_zgesvj(LAPACK_COL_MAJOR, 'L', 'N', 'N', n, n, L.data(), n, sva.data(), 0, nullptr, 1,
                          stat.data());
  }
  if (info != 0) solver_failed("gesvj", info, a);
  // sva holds scaled values when stat[0] != 1.
  std::vector<double> w(n);
  for (lapack_int i = 0; i < n; ++i) w[i] = stat[0] * sva[i] * stat[0] * sva[i];
  std::sort(w.begin(), w.end());
  return w;
}

double hermitian_defect(const Eigen::MatrixXcd& a) {
  if (a.rows() == 0) return 0.0;
  return (a - a.adjoint()).cwiseAbs().maxCoeff();
}

bool is_hermitian(const Eigen::MatrixXcd& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return hermitian_defect(a) <= tol * scale;
}

bool is_real(const Eigen::MatrixXcd& a) {
  return a.imag().cwiseAbs().maxCoeff() == 0.0;
}

std::vector<cplx> eigvals_auto(const Eigen::MatrixXcd& a) {
  std::vector<cplx> out;
  if (a.rows() == 0) return out;
  if (is_hermitian(a)) {
    const auto w = is_real(a) ? eigvals_symmetric(a.real()) : eigvals_hermitian(a);
    out.assign(w.begin(), w.end());
    sort_spectrum(out);
    return out;
  }
  return eigvals_general(a);
}

LogDet logdet_lu(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  LogDet r;
  if (n == 0) return r;
  Eigen::MatrixXcd work = a;
  std::vector<lapack_int> piv(n);
  const lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, work.data(), n, piv.data());
  if (info < 0) throw Error(ErrorKind::solver_failure, "zgetrf: invalid argument");
  if (info > 0) {
    r.singular = true;
    r.log_value = cplx(-INFINITY, 0.0);
    return r;
  }
  int swaps = 0;
  cplx s = 0;
  for (lapack_int i = 0; i < n; ++i) {
    s += std::log(work(i, i));
    if (piv[i] != i + 1) ++swaps;
  }
  if (swaps % 2) s += cplx(0.0, pi);
  r.log_value = s;
  return r;
}

LogDet logdet_lu(const Eigen::MatrixXd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  LogDet r;
  if (n == 0) return r;
  Eigen::MatrixXd work = a;
  std::vector<lapack_int> piv(n);
  const lapack_int info = LAPACKE_dgetrf(LAPACK_COL_MAJOR, n, n, work.data(), n, piv.data());
  if (info < 0) throw Error(ErrorKind::solver_failure, "dgetrf: invalid argument");
  if (info > 0) {
    r.singular = true;
    r.log_value = cplx(-INFINITY, 0.0);
    return r;
  }
  int negatives = 0;
  double s = 0;
  for (lapack_int i = 0; i < n; ++i) {
    const double u = work(i, i);
    s += std::log(std::abs(u));
    if (u < 0) ++negatives;
    if (piv[i] != i + 1) ++negatives;
  }
  r.log_value = cplx(s, negatives % 2 ? pi : 0.0);
  return r;
}

double logdet_cholesky(const Eigen::MatrixXd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n == 0) return 0.0;
  Eigen::MatrixXd work = a;
  const lapack_int info = LAPACKE_dpotrf(LAPACK_COL_MAJOR, 'L', n, work.data(), n);
  if (info > 0) {
    throw Error(ErrorKind::not_invertible,
                "matrix is not positive definite: Cholesky pivot " + std::to_string(info - 1) + " failed");
  }
  if (info < 0) throw Error(ErrorKind::solver_failure, "dpotrf: invalid argument");
  double s = 0;
  for (lapack_int i = 0; i < n; ++i) s += std::log(work(i, i));
  return 2 * s;
}

double condition_estimate(const Eigen::MatrixXcd& a) {
  const lapack_int n = static_cast<lapack_int>(a.rows());
  if (n == 0) return 1.0;
  const double anorm = a.cwiseAbs().colwise().sum().maxCoeff();
  Eigen::MatrixXcd work = a;
  std::vector<lapack_int> piv(n);
  lapack_int info = LAPACKE_zgetrf(LAPACK_COL_MAJOR, n, n, work.data(), n, piv.data());
  if (info > 0) return INFINITY;
  double rcond = 0;
  info = LAPACKE_zgecon(LAPACK_COL_MAJOR, '1', n, work.data(), n, anorm, &rcond);
  if (info != 0 || rcond == 0) return INFINITY;
  return 1.0 / rcond;
}

}  // namespace specdet::linalg
