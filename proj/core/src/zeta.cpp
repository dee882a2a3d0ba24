// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <cmath>
#include <sstream>

#include "specdet/determinants.hpp"
#include "specdet/entire.hpp"
#include "specdet/error.hpp"
#include "specdet/special.hpp"

namespace specdet {

namespace {

// exp(-L^2/(4t)) winding corrections are invisible to a power fit below
// e^{-35}.
constexpr double winding_exponent = 35.0;
constexpr double truncation_target = 1e-12;

struct MellinPieces {
  cplx zeta_prime;
  double rel_residual;
  std::vector<cplx> coeffs;
};

// zeta'(0) with t^{d/2} H(t) fitted by ncoef powers of t on [tmin, tmid]
// and the Mellin split at t0.  Integer powers of t only: flat closed
// manifolds have no half-integer heat invariants.
MellinPieces mellin_zeta_prime(const SpectralData& data, double theta, double tmin, double tmid,
                               double t0, int ncoef, int npts) {
  const int d = data.dim;
  // Chebyshev basis in u = alpha s + beta, s = t / tmid, converted to powers
  // of s afterwards.  A monomial design matrix here is ill conditioned
  // enough to make log det visibly noisy under small parameter changes.
  const auto ts = geometric_grid(tmin, tmid, npts);
  const double s0 = tmin / tmid;
  const double alpha = 2 / (1 - s0), beta = -(1 + s0) / (1 - s0);
  Eigen::MatrixXd X(npts, ncoef);
  Eigen::VectorXcd y(npts);
  for (int i = 0; i < npts; ++i) {
    const double t = ts[i];
    cplx h = 0;
    for (const auto& l : data.spectrum) h += std::exp(-t * l);
    y(i) = std::pow(t, 0.5 * d) * h;
    const double u = alpha * t / tmid + beta;
    X(i, 0) = 1.0;
    if (ncoef > 1) X(i, 1) = u;
    for (int j = 2; j < ncoef; ++j) X(i, j) = 2 * u * X(i, j - 1) - X(i, j - 2);
  }
  const Eigen::HouseholderQR<Eigen::MatrixXd> qr(X);
  const Eigen::VectorXcd b = qr.solve(y.real()).cast<cplx>() + cplx(0, 1) * qr.solve(y.imag()).cast<cplx>();
  MellinPieces out;
  out.rel_residual = (X.cast<cplx>() * b - y).norm() / std::max(y.norm(), 1e-300);

  // Monomial coefficients in s of each T_k(u(s)).
  using Poly = std::vector<long double>;
  std::vector<Poly> T(ncoef, Poly(ncoef, 0.0L));
  T[0][0] = 1;
  if (ncoef > 1) {
    T[1][0] = beta;
    T[1][1] = alpha;
  }
  for (int k = 2; k < ncoef; ++k) {
    for (int j = 0; j < ncoef; ++j) {
      long double v = 2 * beta * T[k - 1][j] - T[k - 2][j];
      if (j > 0) v += 2 * alpha * T[k - 1][j - 1];
      T[k][j] = v;
    }
  }
  Eigen::VectorXcd c(ncoef);
  for (int j = 0; j < ncoef; ++j) {
    long double re = 0, im = 0;
    for (int k = j; k < ncoef; ++k) {
      re += T[k][j] * (long double)b(k).real();
      im += T[k][j] * (long double)b(k).imag();
    }
    c(j) = cplx(double(re), double(im));
  }

  cplx zp = 0;
  for (const auto& l : data.spectrum) zp += expint_e1_cut(t0 * l, theta);
  for (int j = 0; j < ncoef; ++j) {
    const cplx a = c(j) / std::pow(tmid, j);
    out.coeffs.push_back(a);
    const double alpha = j - 0.5 * d;
    if (alpha == 0.0) {
      zp += a * (euler_gamma + std::log(t0));
    } else {
      zp += a * std::pow(t0, alpha) / alpha;
    }
  }
  out.zeta_prime = zp;
  return out;
}

}  // namespace

DetResult zeta_det_mellin(const TruncatedOperator& op, const ZetaConfig& cfg) {
  return zeta_det_mellin(SpectralData::of(op), cfg);
}

DetResult zeta_det_mellin(const SpectralData& data, const ZetaConfig& cfg) {
  const double theta = cfg.cut_angle;
  if (!(theta >= 1e-3 && theta <= 2 * pi - 1e-3)) {
    throw Error(ErrorKind::invalid_argument, "zeta: cut angle must lie in [1e-3, 2pi - 1e-3]");
  }
  if (data.spectrum.empty()) throw Error(ErrorKind::invalid_argument, "zeta: empty spectrum");
  if (cfg.heat_coefficients < 2) throw Error(ErrorKind::invalid_argument, "zeta: need >= 2 heat coefficients");

  double scale = 0;
  for (const auto& l : data.spectrum) scale = std::max(scale, std::abs(l));
  for (std::size_t k = 0; k < data.spectrum.size(); ++k) {
    const cplx l = data.spectrum[k];
    if (std::abs(l) <= 1e-12 * scale) {
      std::ostringstream os;
      os << "zeta: operator is not invertible, eigenvalue " << k << " = " << l;
      throw Error(ErrorKind::not_invertible, os.str());
    }
    if (angle_to_ray(l, theta) < 1e-3) {
      std::ostringstream os;
      os << "zeta: eigenvalue " << k << " = " << l << " lies on the spectral cut theta = " << theta;
      throw Error(ErrorKind::cut_violation, os.str());
    }
  }

  const double count = double(data.spectrum.size());
  double tmin, tmid;
  if (cfg.fit_window) {
    tmin = cfg.fit_window->first;
    tmid = cfg.fit_window->second;
  } else {
    tmin = (std::log(1.0 / truncation_target) + std::log(count)) / data.cutoff_eigenvalue;
    tmid = std::min(64 * tmin, data.length * data.length / (4 * winding_exponent));
  }
  if (!(tmin > 0) || !(tmid > 1.5 * tmin)) {
    std::ostringstream os;
    os << "zeta: heat-coefficient fit window [" << tmin << ", " << tmid
       << "] is too narrow; increase N or shrink fit window";
    throw Error(ErrorKind::fit_failure, os.str());
  }
  const double t0 = cfg.split_point.value_or(tmin);
  if (!(t0 >= tmin * (1 - 1e-12) && t0 <= tmid)) {
    throw Error(ErrorKind::invalid_argument, "zeta: split point must lie inside the fit window");
  }

  const int nc = cfg.heat_coefficients;
  const MellinPieces main = mellin_zeta_prime(data, theta, tmin, tmid, t0, nc, cfg.fit_points);
  if (!(main.rel_residual <= cfg.fit_tolerance)) {
    std::ostringstream os;
    os << "zeta: heat-coefficient fit residual " << main.rel_residual << " above threshold "
       << cfg.fit_tolerance << "; increase N or shrink fit window";
    throw Error(ErrorKind::fit_failure, os.str());
  }

  const double trunc = count * std::exp(-t0 * data.cutoff_eigenvalue) /
                       std::max(t0 * data.cutoff_eigenvalue, 1.0);
  double error = trunc;
  if (cfg.estimate_error) {
    // Stability of the analytic continuation under fewer coefficients and a
    // smaller window.
    const MellinPieces fewer = mellin_zeta_prime(data, theta, tmin, tmid, t0, std::max(2, nc - 2), cfg.fit_points);
    const double tmid2 = tmin + 0.75 * (tmid - tmin);
    const MellinPieces narrow = mellin_zeta_prime(data, theta, tmin, tmid2, t0, nc, cfg.fit_points);
    error += std::abs(fewer.zeta_prime - main.zeta_prime) + std::abs(narrow.zeta_prime - main.zeta_prime);
  }

  DetResult r = DetResult::from_log(-main.zeta_prime, Method::zeta_mellin, error, data.cutoff);
  r.params["cut_angle"] = theta;
  r.params["t_min"] = tmin;
  r.params["t_mid"] = tmid;
  r.params["t_split"] = t0;
  r.params["heat_coefficients"] = nc;
  r.params["fit_residual"] = main.rel_residual;
  r.params["truncation_bound"] = trunc;
  for (int j = 0; j < nc && j < 4; ++j) r.params["a" + std::to_string(j)] = main.coeffs[j].real();
  return r;
}

}  // namespace specdet
