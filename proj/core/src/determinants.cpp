// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/determinants.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "specdet/entire.hpp"
#include "specdet/error.hpp"
#include "specdet/linalg.hpp"

namespace specdet {

namespace {

constexpr double eps_mach = std::numeric_limits<double>::epsilon();

// Bring an imaginary part into (-pi, pi].
double wrap_angle(double a) {
  a = std::remainder(a, 2 * pi);
  if (a <= -pi) a += 2 * pi;
  return a;
}

double frobenius(const Eigen::MatrixXcd& A) { return A.norm(); }

}  // namespace

const char* to_string(Method m) {
  switch (m) {
    case Method::fredholm: return "fredholm";
    case Method::gk_product: return "gk_product";
    case Method::gk_rp: return "gk_rp";
    case Method::gk_trace_series: return "gk_trace_series";
    case Method::zeta_mellin: return "zeta_mellin";
    case Method::zeta_monodromy: return "zeta_monodromy";
    case Method::lattice_lu: return "lattice_lu";
    case Method::renormalized: return "renormalized";
  }
  return "unknown";
}

DetResult DetResult::from_log(cplx log_value, Method method, double error, int cutoff) {
  DetResult r;
  r.log_value = log_value;
  r.method = method;
  r.error = error;
  r.cutoff = cutoff;
  if (std::isinf(log_value.real()) && log_value.real() < 0) {
    r.is_zero = true;
    r.value = 0.0;
  } else {
    r.value = std::exp(log_value);
  }
  return r;
}

DetResult fredholm_det_from_spectrum(const std::vector<cplx>& mu) {
  cplx s = 0;
  double sens = 0;
  double scale = 0;
  for (const auto& m : mu) scale = std::max(scale, std::abs(m));
  for (const auto& m : mu) {
    const cplx f = 1.0 + m;
    if (std::abs(f) <= 1e-14) {
      DetResult r = DetResult::from_log({-std::numeric_limits<double>::infinity(), 0.0}, Method::fredholm);
      r.is_zero = true;
      return r;
    }
    s += std::log(f);
    sens += 1.0 / std::abs(f);
  }
  return DetResult::from_log(s, Method::fredholm, 10 * eps_mach * std::max(scale, 1.0) * sens);
}

DetResult fredholm_det(const Eigen::MatrixXcd& K) {
  return fredholm_det_from_spectrum(linalg::eigvals_auto(K));
}

DetResult fredholm_det_lu(const Eigen::MatrixXcd& K) {
  const Eigen::Index n = K.rows();
  Eigen::MatrixXcd M = K;
  M.diagonal().array() += 1.0;
  linalg::LogDet ld = linalg::is_real(M) ? linalg::logdet_lu(Eigen::MatrixXd(M.real()))
                                         : linalg::logdet_lu(M);
  DetResult r = DetResult::from_log(ld.log_value, Method::fredholm,
                                    10 * eps_mach * double(n) * (1.0 + frobenius(K)));
  if (ld.singular) r.is_zero = true;
  r.tags.push_back("lu");
  return r;
}

Eigen::MatrixXcd rp_transform(int p, const Eigen::MatrixXcd& A) {
  if (p < 2) throw Error(ErrorKind::invalid_argument, "rp_transform: p must be >= 2");
  const Eigen::Index n = A.rows();
  const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
  Eigen::MatrixXcd S = Eigen::MatrixXcd::Zero(n, n);
  Eigen::MatrixXcd An = I;
  for (int k = 1; k <= p - 1; ++k) {
    An = An * A;
    S += ((k % 2) ? -1.0 : 1.0) / double(k) * An;
  }
  // Eigen's exp() is a scaling and squaring Pade evaluation.
  const Eigen::MatrixXcd E = S.exp();
  return (I + A) * E - I;
}

DetResult gk_det_from_spectrum(int p, const std::vector<cplx>& mu) {
  if (p < 1) throw Error(ErrorKind::invalid_argument, "gk_det: p must be >= 1");
  if (p == 1) {
    DetResult r = fredholm_det_from_spectrum(mu);
    r.method = Method::gk_product;
    return r;
  }
  cplx s = 0;
  double sens = 0;
  double scale = 0;
  for (const auto& m : mu) scale = std::max(scale, std::abs(m));
  for (const auto& m : mu) {
    if (std::abs(1.0 + m) <= 1e-14) {
      DetResult r = DetResult::from_log({-std::numeric_limits<double>::infinity(), 0.0}, Method::gk_product);
      r.is_zero = true;
      return r;
    }
    s += log_weierstrass_factor(p - 1, -m);
    // d/dmu log E_{p-1}(-mu) = (-1)^{p-1} mu^{p-1} / (1 + mu)
    sens += std::pow(std::abs(m), p - 1) / std::abs(1.0 + m);
  }
  return DetResult::from_log(s, Method::gk_product, 10 * eps_mach * std::max(scale, 1.0) * sens);
}

DetResult gk_det_rp(int p, const Eigen::MatrixXcd& A) {
  DetResult r = fredholm_det_lu(rp_transform(p, A));
  r.method = Method::gk_rp;
  r.tags.clear();
  return r;
}

DetResult gk_det(int p, const Eigen::MatrixXcd& A, const GkOptions& options) {
  DetResult r = gk_det_from_spectrum(p, linalg::eigvals_auto(A));
  if (p >= 2 && A.rows() <= options.cross_check_max_dim && !r.is_zero) {
    const DetResult alt = gk_det_rp(p, A);
    const cplx d(alt.log_value.real() - r.log_value.real(),
                 wrap_angle(alt.log_value.imag() - r.log_value.imag()));
    const double disagreement = std::abs(std::exp(d) - 1.0);
    const double tol = std::max(options.route_tolerance, 10 * (r.error + alt.error));
    r.params["route_disagreement"] = disagreement;
    r.tags.push_back("cross_checked:gk_rp");
    if (!(disagreement <= tol)) {
      std::ostringstream os;
      os << "gk_det: product and R_p routes disagree by " << disagreement << " (tol " << tol
         << "); eigen-solver trouble suspected";
      throw Error(ErrorKind::route_disagreement, os.str());
    }
    r.error = std::max(r.error, disagreement);
  }
  return r;
}

cplx gk_log_trace_series(int p, const Eigen::MatrixXcd& A, double tol) {
  if (p < 1) throw Error(ErrorKind::invalid_argument, "gk_log_trace_series: p must be >= 1");
  const auto mu = linalg::eigvals_auto(A);
  double rho = 0;
  for (const auto& m : mu) rho = std::max(rho, std::abs(m));
  if (!(rho < 1.0)) {
    std::ostringstream os;
    os << "series route invalid; use product route (spectral radius " << rho << ")";
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  const double dim = double(A.rows());
  Eigen::MatrixXcd An = A;
  for (int k = 1; k < p; ++k) An = An * A;
  cplx s = 0;
  for (int n = p; n < 100000; ++n) {
    const cplx term = ((n % 2) ? 1.0 : -1.0) * An.trace() / double(n);
    s += term;
    // |Tr A^k| <= dim rho^k up to non-normality; geometric tail.
    const double tail = dim * std::pow(rho, n + 1) / ((n + 1) * (1.0 - rho));
    if (std::abs(term) < tol && tail < tol) break;
    An = An * A;
  }
  return s;
}

SpectralData SpectralData::of(const TruncatedOperator& op) {
  return of(op, eigenvalues(op));
}

SpectralData SpectralData::of(const TruncatedOperator& op, std::vector<cplx> spectrum) {
  SpectralData d;
  d.spectrum = std::move(spectrum);
  d.dim = op.geometry().dim();
  d.length = op.geometry().length;
  d.cutoff_eigenvalue = op.cutoff_eigenvalue();
  d.cutoff = op.basis().cutoff();
  return d;
}

HeatTrace heat_trace(const SpectralData& data, double t, double tol) {
  if (!(t > 0)) throw Error(ErrorKind::invalid_argument, "heat_trace: t must be > 0");
  cplx s = 0;
  for (const auto& l : data.spectrum) s += std::exp(-t * l);
  HeatTrace h;
  h.value = s;
  h.truncation_bound = double(data.spectrum.size()) * std::exp(-t * data.cutoff_eigenvalue);
  h.flagged = h.truncation_bound > tol;
  return h;
}

HeatTrace heat_trace(const TruncatedOperator& op, double t, double tol) {
  return heat_trace(SpectralData::of(op), t, tol);
}

double free_circle_zeta_det(double length, double mass) {
  const double s = std::sinh(0.5 * mass * length);
  return 4 * s * s;
}

double lattice_logdet(const Eigen::MatrixXd& M) {
  if (M.rows() != M.cols()) throw Error(ErrorKind::invalid_argument, "lattice_logdet: matrix must be square");
  if ((M - M.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(1.0, M.cwiseAbs().maxCoeff())) {
    throw Error(ErrorKind::invalid_argument, "lattice_logdet: matrix is not symmetric");
  }
  Eigen::LDLT<Eigen::MatrixXd> ldlt(M);
  const Eigen::VectorXd D = ldlt.vectorD();
  double s = 0;
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    if (!(D(i) > 0)) {
      std::ostringstream os;
      os << "lattice_logdet: matrix is not positive definite, pivot " << i << " = " << D(i);
      throw Error(ErrorKind::not_invertible, os.str());
    }
    s += std::log(D(i));
  }
  return s;
}

double lattice_logdet(const Eigen::SparseMatrix<double>& M) {
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(M);
  if (ldlt.info() != Eigen::Success) {
    throw Error(ErrorKind::not_invertible, "lattice_logdet: sparse LDL^T factorization failed");
  }
  const Eigen::VectorXd D = ldlt.vectorD();
  double s = 0;
  for (Eigen::Index i = 0; i < D.size(); ++i) {
    if (!(D(i) > 0)) {
      std::ostringstream os;
      os << "lattice_logdet: matrix is not positive definite, pivot " << i << " = " << D(i);
      throw Error(ErrorKind::not_invertible, os.str());
    }
    s += std::log(D(i));
  }
  return s;
}

}  // namespace specdet
