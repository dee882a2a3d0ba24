// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/factorization.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "specdet/error.hpp"
#include "specdet/operators.hpp"

namespace specdet {

namespace {

// --- Free weights and closed-walk tails ------------------------------------

ModeWeight free_weight(const ModeBasis& basis, FreeOperator free, double m) {
  if (free == FreeOperator::laplace) {
    return [basis](const Mode& n) { return cplx(1.0 / basis.free_eigenvalue(n)); };
  }
  const double k = basis.geometry().wavenumber();
  return [k, m](const Mode& n) { return cplx(1.0 / (k * n[0] + m)); };
}

struct TailTrace {
  cplx value;
  double error = 0.0;
};

// Walks leaving the box of basis, summed over outer boxes B, 2B, 4B.  The
// tail beyond B behaves as B^{-alpha} with alpha = k ord - d (ord 2 for
// Laplace, 1 for Dirac); the powers alpha and alpha + 1 are eliminated.
TailTrace walk_tail(const PerturbationField& V, const ModeBasis& basis, int k, FreeOperator free,
                    double m) {
  const int d = basis.dim();
  const int N = basis.cutoff();
  const int ord = free == FreeOperator::laplace ? 2 : 1;
  const int alpha = k * ord - d;
  if (alpha <= 0) {
    std::ostringstream os;
    os << "trace of (P^{-1} V)^" << k << " diverges in d = " << d;
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  if (V.is_zero()) return {};
  const auto g = free_weight(basis, free, m);
  const int band = std::max(V.bandwidth(), 1);
  int B = std::max(2 * N, N + 4 * band);
  if (d == 1) B = std::max(B, free == FreeOperator::dirac ? 4096 : 512);

  const cplx t0 = walk_trace(V, g, d, B, k, N);
  const cplx t1 = walk_trace(V, g, d, 2 * B, k, N);
  const double floor = 1e-16 * std::max(1.0, std::abs(t1));
  if (std::abs(t1 - t0) <= floor) return {t1, std::abs(t1 - t0)};
  const cplx t2 = walk_trace(V, g, d, 4 * B, k, N);
  // T(B) = T - c1 B^{-a} - c2 B^{-a-1} through the three boxes.
  const double r1 = std::pow(2.0, alpha);
  const cplx e1 = (r1 * t1 - t0) / (r1 - 1);
  const cplx e2 = (r1 * t2 - t1) / (r1 - 1);
  const double r2 = std::pow(2.0, alpha + 1);
  const cplx e = (r2 * e2 - e1) / (r2 - 1);
  return {e, std::abs(e - e2) + floor};
}

bool is_admissibility_error(const Error& e) {
  return e.kind() == ErrorKind::cut_violation || e.kind() == ErrorKind::not_invertible;
}

std::vector<cplx> default_grid() {
  std::vector<cplx> z;
  for (int i = 0; i <= 10; ++i) z.emplace_back(-1.0 + 0.2 * i, 0.0);
  return z;
}

double relative(cplx a, cplx oracle) {
  const double diff = std::abs(a - oracle);
  if (diff == 0.0) return 0.0;
  return diff / std::max(std::abs(oracle), 1e-300);
}

bool strictly_decreasing(const std::vector<double>& e) {
  for (std::size_t i = 1; i < e.size(); ++i) {
    if (!(e[i] < e[i - 1])) return false;
  }
  return true;
}

}  // namespace

// --- log det routes ----------------------------------------------------------

LogDetFunction zeta_logdet(const ModeBasis& basis, const ZetaConfig& cfg) {
  return [basis, cfg](const PerturbationField& W) {
    return zeta_det_mellin(build_laplace(basis.geometry(), W, basis), cfg);
  };
}

LogDetFunction dirac_zeta_logdet(double m, const ModeBasis& basis, const ZetaConfig& cfg) {
  return [m, basis, cfg](const PerturbationField& W) {
    return zeta_det_mellin(build_dirac_squared(basis.geometry(), m, W, basis), cfg);
  };
}

LogDetFunction gk_logdet(const ModeBasis& basis, int p, bool tail_correction) {
  return [basis, p, tail_correction](const PerturbationField& W) {
    GkRay::Options o;
    o.tail_correction = tail_correction;
    return GkRay(W, basis, p, o)(1.0);
  };
}

LogDetFunction renormalized_logdet(const ModeBasis& basis, const RenormOptions& options, double shift) {
  return [basis, options, shift](const PerturbationField& W) {
    if (W.is_zero()) return DetResult::from_log(0.0, Method::renormalized);
    DetResult r = renormalized_det(W, basis.geometry(), basis, options).det;
    if (shift != 0.0) {
      r = [&] {
        DetResult s = DetResult::from_log(r.log_value + shift * W.integral(basis.geometry()), r.method,
                                          r.error, r.cutoff);
        s.params = r.params;
        s.tags = r.tags;
        s.params["rg_shift"] = shift;
        return s;
      }();
    }
    return r;
  };
}

LogDetFunction with_local_shift(LogDetFunction logdet, const Geometry& geometry, double c1, double c2) {
  return [logdet = std::move(logdet), geometry, c1, c2](const PerturbationField& W) {
    const DetResult r = logdet(W);
    cplx shift = c1 * W.integral(geometry);
    if (c2 != 0.0) shift += c2 * integral_of_product(W, W, geometry);
    DetResult s = DetResult::from_log(r.log_value + shift, r.method, r.error, r.cutoff);
    s.params = r.params;
    s.tags = r.tags;
    s.tags.push_back("local_shift");
    return s;
  };
}

// --- GkRay ---------------------------------------------------------------------

GkRay::GkRay(const PerturbationField& V, const ModeBasis& basis, int p) : GkRay(V, basis, p, Options{}) {}

GkRay::GkRay(const PerturbationField& V, const ModeBasis& basis, int p, const Options& options) : p_(p) {
  if (p < 1) throw Error(ErrorKind::invalid_argument, "GkRay: p must be >= 1");
  if (V.dim() != basis.dim()) throw Error(ErrorKind::invalid_argument, "GkRay: field dimension mismatch");
  if (options.free == FreeOperator::dirac && basis.dim() != 1) {
    throw Error(ErrorKind::invalid_argument, "GkRay: the Dirac operator lives on the circle");
  }
  if (V.is_zero()) return;

  const Eigen::MatrixXcd C = convolution_matrix(V, basis);
  if (options.free == FreeOperator::laplace) {
    // P^{-1/2} V P^{-1/2} has the spectrum of P^{-1} V and stays Hermitian
    // for real V.
    Eigen::VectorXd s(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) s(Eigen::Index(i)) = 1.0 / std::sqrt(basis.free_eigenvalue(i));
    mu_ = eigenvalues(s.asDiagonal() * C * s.asDiagonal(), basis);
  } else {
    const Eigen::VectorXd d = dirac_free_eigenvalues(basis, options.dirac_mass);
    if (d.cwiseAbs().minCoeff() < 1e-12) {
      throw Error(ErrorKind::not_invertible, "GkRay: Dirac operator is not invertible (integer mass)");
    }
    mu_ = eigenvalues(d.cwiseInverse().asDiagonal() * C, basis);
  }

  if (!options.tail_correction) return;
  // Odd orders can vanish identically, so stop after two small terms.
  const double R = std::max(options.max_abs_z, 1e-300);
  int small = 0;
  tail_converged_ = false;
  for (int k = p; k <= options.max_order; ++k) {
    const TailTrace t = walk_tail(V, basis, k, options.free, options.dirac_mass);
    tail_.push_back(t.value);
    tail_err_.push_back(t.error);
    const double term = std::abs(t.value) * std::pow(R, k) / k;
    small = term <= options.tolerance ? small + 1 : 0;
    if (small == 2) {
      tail_converged_ = true;
      break;
    }
  }
}

DetResult GkRay::operator()(cplx z) const {
  std::vector<cplx> zm(mu_.size());
  for (std::size_t i = 0; i < mu_.size(); ++i) zm[i] = z * mu_[i];
  DetResult box = gk_det_from_spectrum(p_, zm);
  if (tail_.empty()) return box;
  cplx s = 0;
  double err = box.error;
  for (std::size_t j = 0; j < tail_.size(); ++j) {
    const int k = p_ + int(j);
    const cplx zk = std::pow(z, k);
    s += ((k % 2) ? 1.0 : -1.0) * zk * tail_[j] / double(k);
    err += std::abs(zk) * tail_err_[j] / k;
  }
  if (box.is_zero) return box;
  DetResult r = DetResult::from_log(box.log_value + s, box.method, err, box.cutoff);
  r.params = box.params;
  r.tags = box.tags;
  r.tags.push_back("tail_corrected");
  if (!tail_converged_) r.tags.push_back("tail_unconverged");
  r.params["tail_orders"] = double(tail_.size());
  return r;
}

std::pair<cplx, double> green_power_trace(const PerturbationField& V, const ModeBasis& basis, int k,
                                          bool with_tail, FreeOperator free, double dirac_mass) {
  if (k < 1) throw Error(ErrorKind::invalid_argument, "green_power_trace: k must be >= 1");
  const auto g = free_weight(basis, free, dirac_mass);
  cplx t = walk_trace(V, g, basis.dim(), basis.cutoff(), k);
  if (!with_tail) return {t, 0.0};
  const TailTrace tail = walk_tail(V, basis, k, free, dirac_mass);
  return {t + tail.value, tail.error};
}

// --- Polynomial fits ------------------------------------------------------------

cplx PolynomialInZ::operator()(cplx z) const {
  cplx v = 0;
  for (auto it = coefficients.rbegin(); it != coefficients.rend(); ++it) v = v * z + *it;
  return v;
}

PolynomialInZ fit_polynomial(const std::vector<cplx>& grid, const std::vector<cplx>& values,
                             const std::vector<double>& sigma, int max_degree, double threshold) {
  const Eigen::Index n = Eigen::Index(grid.size());
  if (values.size() != grid.size()) throw Error(ErrorKind::invalid_argument, "fit_polynomial: size mismatch");
  if (!sigma.empty() && sigma.size() != grid.size()) {
    throw Error(ErrorKind::invalid_argument, "fit_polynomial: sigma size mismatch");
  }
  if (max_degree < 0 || n < max_degree + 2) {
    throw Error(ErrorKind::invalid_argument, "fit_polynomial: need at least degree + 2 grid points");
  }
  const Eigen::Index m = max_degree + 1;
  double zscale = 0, yscale = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    zscale = std::max(zscale, std::abs(grid[i]));
    yscale = std::max(yscale, std::abs(values[i]));
  }
  if (zscale == 0) zscale = 1;
  const double noise_floor = 1e-15 * std::max(yscale, 1e-300);

  Eigen::MatrixXcd X(n, m);
  Eigen::VectorXcd y(n);
  Eigen::VectorXd w(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double s = sigma.empty() ? 1.0 : std::max(sigma[i], noise_floor);
    w(i) = 1.0 / s;
    cplx zj = 1.0;
    for (Eigen::Index j = 0; j < m; ++j) {
      X(i, j) = zj * w(i);
      zj *= grid[i] / zscale;
    }
    y(i) = values[i] * w(i);
  }
  const Eigen::JacobiSVD<Eigen::MatrixXcd> svd(X, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const Eigen::VectorXcd c = svd.solve(y);
  const Eigen::VectorXcd r = X * c - y;
  const double dof = double(n - m);
  double s2 = r.squaredNorm() / dof;
  if (sigma.empty()) {
    s2 = std::max(s2, noise_floor * noise_floor);
  } else {
    s2 = std::max(s2, 1.0);
  }
  // (X^H X)^{-1} = V S^{-2} V^H.
  const Eigen::VectorXd sv = svd.singularValues();
  const Eigen::MatrixXcd& Vm = svd.matrixV();

  PolynomialInZ out;
  out.grid = grid;
  out.values = values;
  out.sigma = sigma;
  for (Eigen::Index j = 0; j < m; ++j) {
    double var = 0;
    for (Eigen::Index k = 0; k < sv.size(); ++k) var += std::norm(Vm(j, k)) / (sv(k) * sv(k));
    const double scale = std::pow(zscale, double(j));
    out.coefficients.push_back(c(j) / scale);
    out.std_errors.push_back(std::sqrt(var * s2) / scale);
  }
  out.degree = 0;
  for (Eigen::Index j = m - 1; j >= 0; --j) {
    if (std::abs(out.coefficients[j]) > threshold * out.std_errors[j]) {
      out.degree = int(j);
      break;
    }
  }
  double rss = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double e = std::abs(out(grid[i]) - values[i]);
    out.residuals.push_back(e);
    rss += e * e;
  }
  out.residual = std::sqrt(rss / double(n));
  return out;
}

namespace {

PolynomialInZ q_fit_impl(const LogDetFunction& logdet, const PerturbationField& V, const ModeBasis& basis,
                         const FactorizationOptions& options, FreeOperator free, double m) {
  const int d = basis.dim();
  const bool dirac = free == FreeOperator::dirac;
  const int p = options.p > 0 ? options.p : (dirac ? d + 1 : d / 2 + 1);
  const int allowed = options.allowed_degree >= 0 ? options.allowed_degree : (dirac ? d : d / 2);
  const auto grid = options.z_grid.empty() ? default_grid() : options.z_grid;

  double zmax = 0;
  for (const auto& z : grid) zmax = std::max(zmax, std::abs(z));
  GkRay::Options ro;
  ro.free = free;
  ro.dirac_mass = m;
  ro.tail_correction = options.tail_correction;
  ro.max_abs_z = std::max(zmax, 1e-300);
  const GkRay ray(V, basis, p, ro);
  const DetResult base = logdet(PerturbationField(d));

  std::vector<cplx> zs, gs, skipped;
  std::vector<double> sig;
  for (const auto& z : grid) {
    DetResult r, q;
    try {
      r = logdet(V.scaled(z));
      q = ray(z);
    } catch (const Error& e) {
      if (!is_admissibility_error(e)) throw;
      skipped.push_back(z);
      continue;
    }
    if (r.is_zero || q.is_zero) {
      skipped.push_back(z);
      continue;
    }
    cplx g = r.log_value - base.log_value - q.log_value;
    // Keep the imaginary part continuous along the grid.
    if (!gs.empty()) g -= cplx(0, 2 * pi) * std::round((g.imag() - gs.back().imag()) / (2 * pi));
    zs.push_back(z);
    gs.push_back(g);
    sig.push_back(r.error + base.error + q.error);
  }
  if (int(zs.size()) < allowed + 2) {
    throw Error(ErrorKind::cut_violation, "q_polynomial_fit: too few cut-admissible grid points");
  }
  PolynomialInZ main = fit_polynomial(zs, gs, sig, allowed, options.threshold);
  const int probe_degree = std::min(allowed + 2, int(zs.size()) - 2);
  if (probe_degree > allowed) {
    main.degree = fit_polynomial(zs, gs, sig, probe_degree, options.threshold).degree;
  }
  main.skipped = skipped;
  if (main.degree > allowed || !(main.residual <= options.tolerance)) {
    std::ostringstream os;
    os << "factorization: ";
    if (main.degree > allowed) {
      os << "fitted degree " << main.degree << " exceeds " << allowed;
    } else {
      os << "residual " << main.residual << " above tolerance " << options.tolerance << " at degree " << allowed;
    }
    os << "; profile:";
    for (std::size_t i = 0; i < zs.size(); ++i) os << " z=" << zs[i].real() << ":" << main.residuals[i];
    throw Error(ErrorKind::fit_failure, os.str());
  }
  return main;
}

}  // namespace

PolynomialInZ q_polynomial_fit(const LogDetFunction& logdet, const PerturbationField& V, const ModeBasis& basis,
                               const FactorizationOptions& options) {
  return q_fit_impl(logdet, V, basis, options, FreeOperator::laplace, 0.0);
}

PolynomialInZ q_polynomial_fit(const PerturbationField& V, const ModeBasis& basis,
                               const FactorizationOptions& options) {
  return q_fit_impl(zeta_logdet(basis), V, basis, options, FreeOperator::laplace, 0.0);
}

PolynomialInZ q_polynomial_fit_dirac(const PerturbationField& A, double m, const ModeBasis& basis,
                                     const FactorizationOptions& options) {
  if (basis.dim() != 1) throw Error(ErrorKind::invalid_argument, "q_polynomial_fit_dirac: circle only");
  return q_fit_impl(dirac_zeta_logdet(m, basis), A, basis, options, FreeOperator::dirac, m);
}

// --- Gateaux differentials ---------------------------------------------------

DirectionSet DirectionSet::from_bumps(const Geometry& geometry, const std::vector<Bump>& bumps, int band) {
  DirectionSet s;
  s.bumps = bumps;
  for (const auto& b : bumps) s.directions.push_back(PerturbationField::from_bump(geometry, b, band));
  s.support_disjoint = true;
  for (std::size_t i = 0; i < bumps.size(); ++i) {
    for (std::size_t j = i + 1; j < bumps.size(); ++j) {
      if (!bumps[i].disjoint_from(bumps[j], geometry)) s.support_disjoint = false;
    }
  }
  return s;
}

DirectionSet DirectionSet::repeated(const PerturbationField& V, int n) {
  DirectionSet s;
  s.directions.assign(std::size_t(std::max(n, 0)), V);
  return s;
}

std::vector<double> default_steps(int dim, int order) {
  if (dim >= 2) return {4e-2, 2e-2, 1e-2};
  if (order >= 3) return {2e-2, 1e-2, 5e-3};
  return {1e-2, 5e-3, 2.5e-3};
}

GateauxEstimate gateaux_diff(const TupleFunction& f, int n, const GateauxOptions& options) {
  if (n < 1 || n > 4) throw Error(ErrorKind::invalid_argument, "gateaux_diff: order must be in 1..4");
  const std::vector<double> steps = options.steps.empty() ? default_steps(1, n) : options.steps;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    if (!(steps[i] > 0) || (i > 0 && !(steps[i] < steps[i - 1]))) {
      throw Error(ErrorKind::invalid_argument, "gateaux_diff: steps must be positive and decreasing");
    }
  }
  GateauxEstimate out;
  out.steps = steps;
  for (double h : steps) {
    cplx acc = 0;
    std::vector<double> t(std::size_t(n), 0.0);
    for (int mask = 0; mask < (1 << n); ++mask) {
      int sign = 1;
      for (int i = 0; i < n; ++i) {
        const bool minus = mask & (1 << i);
        t[std::size_t(i)] = minus ? -h : h;
        if (minus) sign = -sign;
      }
      cplx v;
      try {
        v = f(t);
      } catch (const Error& e) {
        if (!is_admissibility_error(e)) throw;
        std::ostringstream os;
        os << "gateaux_diff: evaluation point t = (";
        for (int i = 0; i < n; ++i) os << (i ? ", " : "") << t[std::size_t(i)];
        os << ") is not admissible: " << e.what();
        throw Error(e.kind(), os.str());
      }
      ++out.evaluations;
      acc += double(sign) * v;
    }
    out.per_step.push_back(acc / std::pow(2 * h, n));
  }
  // Neville tableau in h^2.
  std::vector<cplx> row = out.per_step;
  cplx prev = row.back();
  for (std::size_t level = 1; level < steps.size(); ++level) {
    std::vector<cplx> next;
    for (std::size_t i = 0; i + level < steps.size(); ++i) {
      const double r = std::pow(steps[i] / steps[i + level], 2);
      next.push_back(row[i + 1] + (row[i + 1] - row[i]) / (r - 1));
    }
    prev = row.back();
    row = next;
  }
  out.value = row.front();
  out.error = steps.size() > 1 ? std::abs(out.value - prev) : 0.0;
  return out;
}

GateauxEstimate gateaux_diff(const LogDetFunction& logdet, const PerturbationField& base, const DirectionSet& dirs,
                             const GateauxOptions& options) {
  const int n = int(dirs.directions.size());
  // Identical directions form one group; the field only depends on the sum
  // of the group's parameters, which keys the cache.
  std::vector<int> group(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    group[std::size_t(i)] = i;
    for (int j = 0; j < i; ++j) {
      if (dirs.directions[std::size_t(j)].coefficients() == dirs.directions[std::size_t(i)].coefficients()) {
        group[std::size_t(i)] = group[std::size_t(j)];
        break;
      }
    }
  }
  std::map<std::vector<long long>, cplx> cache;
  auto f = [&](const std::vector<double>& t) -> cplx {
    std::vector<double> sums(std::size_t(n), 0.0);
    for (int i = 0; i < n; ++i) sums[std::size_t(group[std::size_t(i)])] += t[std::size_t(i)];
    std::vector<long long> key;
    for (double s : sums) key.push_back(std::llround(std::ldexp(s, 40)));
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    PerturbationField W = base;
    for (int i = 0; i < n; ++i) {
      if (group[std::size_t(i)] == i && sums[std::size_t(i)] != 0.0) {
        W = W + dirs.directions[std::size_t(i)].scaled(sums[std::size_t(i)]);
      }
    }
    const cplx v = logdet(W).log_value;
    cache[key] = v;
    return v;
  };
  GateauxOptions o = options;
  if (o.steps.empty()) o.steps = default_steps(base.dim(), n);
  GateauxEstimate g = gateaux_diff(TupleFunction(f), n, o);
  g.evaluations = int(cache.size());
  return g;
}

// --- Derivative checks ---------------------------------------------------------

TraceIdentityReport trace_identity_check(const LogDetFunction& logdet, const PerturbationField& V,
                                         const ModeBasis& basis, int n, const TraceIdentityOptions& options) {
  const int d = basis.dim();
  if (n <= d / 2) {
    std::ostringstream os;
    os << "trace_identity_check: need n > [d/2] = " << d / 2;
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  GateauxOptions fo = options.fd;
  if (fo.steps.empty()) fo.steps = default_steps(d, n);
  const GateauxEstimate g = gateaux_diff(logdet, PerturbationField(d), DirectionSet::repeated(V, n), fo);

  double fact = 1;
  for (int i = 2; i < n; ++i) fact *= i;
  const double factor = ((n - 1) % 2 ? -1.0 : 1.0) / fact;

  TraceIdentityReport r;
  r.order = n;
  r.cutoff = basis.cutoff();
  r.steps = g.steps;
  r.derivative = factor * g.value;
  r.fd_error = std::abs(factor) * g.error;
  r.box_trace = green_power_trace(V, basis, n, false).first;
  r.oracle = options.tail_correction ? green_power_trace(V, basis, n, true).first : r.box_trace;
  r.relative_error = relative(r.derivative, r.oracle);
  for (const auto& v : g.per_step) r.step_errors.push_back(relative(factor * v, r.oracle));
  r.monotone = strictly_decreasing(r.step_errors);
  return r;
}

TraceIdentityReport trace_identity_check(const PerturbationField& V, const ModeBasis& basis, int n,
                                         const TraceIdentityOptions& options) {
  return trace_identity_check(zeta_logdet(basis), V, basis, n, options);
}

DisjointSupportReport disjoint_support_check(const LogDetFunction& logdet, const PerturbationField& base,
                                             const DirectionSet& dirs, const ModeBasis& basis,
                                             const GateauxOptions& options) {
  if (dirs.directions.size() != 2) {
    throw Error(ErrorKind::invalid_argument, "disjoint_support_check: need exactly two directions");
  }
  GateauxOptions fo = options;
  if (fo.steps.empty()) fo.steps = default_steps(basis.dim(), 2);
  const GateauxEstimate g = gateaux_diff(logdet, base, dirs, fo);

  const TruncatedOperator P = build_laplace(basis.geometry(), base, basis);
  const Eigen::MatrixXcd X1 = green_compose(P, dirs.directions[0]);
  const Eigen::MatrixXcd X2 = green_compose(P, dirs.directions[1]);

  DisjointSupportReport r;
  r.order = 2;
  r.cutoff = basis.cutoff();
  r.steps = g.steps;
  r.support_disjoint = dirs.support_disjoint;
  r.derivative = g.value;
  r.fd_error = g.error;
  r.oracle = -X1.cwiseProduct(X2.transpose()).sum();
  r.relative_error = relative(r.derivative, r.oracle);
  for (const auto& v : g.per_step) r.step_errors.push_back(relative(v, r.oracle));
  r.monotone = strictly_decreasing(r.step_errors);
  return r;
}

DisjointSupportReport disjoint_support_check(const PerturbationField& base, const DirectionSet& dirs,
                                             const ModeBasis& basis, const GateauxOptions& options) {
  return disjoint_support_check(zeta_logdet(basis), base, dirs, basis, options);
}

// --- Product representation and growth ---------------------------------------

WeierstrassReport weierstrass_representation_check(const PerturbationField& V, const ModeBasis& basis, int p) {
  if (p < 1) throw Error(ErrorKind::invalid_argument, "weierstrass_representation_check: p must be >= 1");
  WeierstrassReport r;
  r.factor_order = p - 1;
  const Eigen::MatrixXcd K = green_compose(free_laplace(basis), V);

  const GkRay::Options no_tail{FreeOperator::laplace, 0.5, false};
  const GkRay ray(V, basis, p, no_tail);
  const auto& mu = ray.spectrum();
  double mmax = 0;
  for (const auto& x : mu) mmax = std::max(mmax, std::abs(x));
  std::vector<cplx> zeros;
  for (const auto& x : mu) {
    if (std::abs(x) > 1e-13 * mmax) zeros.push_back(-1.0 / x);
  }
  r.zeros = zeros.size();

  // P^{-1} V = P^{-1/2} S P^{1/2}: the eigenvector condition is at most
  // cond(P^{1/2}) cond(eigenvectors of S), and S is normal for real V.
  const auto& lam = basis.free_eigenvalues();
  const double lmax = *std::max_element(lam.begin(), lam.end());
  const double lmin = *std::min_element(lam.begin(), lam.end());
  r.eigenvector_condition = std::sqrt(lmax / lmin);
  if (!V.is_real() && !V.is_zero()) {
    Eigen::VectorXd s(basis.size());
    for (std::size_t i = 0; i < basis.size(); ++i) s(Eigen::Index(i)) = 1.0 / std::sqrt(lam[i]);
    const Eigen::MatrixXcd S = s.asDiagonal() * convolution_matrix(V, basis) * s.asDiagonal();
    const Eigen::ComplexEigenSolver<Eigen::MatrixXcd> es(S);
    const Eigen::JacobiSVD<Eigen::MatrixXcd> sv(es.eigenvectors());
    const auto& w = sv.singularValues();
    r.eigenvector_condition *= w(0) / w(w.size() - 1);
  }
  r.degraded = !(r.eigenvector_condition < 1e10);

  HadamardData h;
  h.zeros = ZeroSequence::make(zeros, 0, true);
  h.factor_order = p - 1;
  r.product_log = hadamard_eval(h, 1.0, 1e-12).log_value;
  r.gk_log = gk_det(p, K).log_value;
  r.relative_error = std::abs(std::exp(r.product_log - r.gk_log) - 1.0);
  return r;
}

GrowthReport growth_bound_check(const PerturbationField& V, const ModeBasis& basis, int p) {
  const int d = basis.dim();
  const GkRay::Options no_tail{FreeOperator::laplace, 0.5, false};
  const GkRay ray(V, basis, p, no_tail);
  const auto& mu = ray.spectrum();
  double mmin = INFINITY, mmax = 0;
  for (const auto& x : mu) {
    mmax = std::max(mmax, std::abs(x));
  }
  for (const auto& x : mu) {
    if (std::abs(x) > 1e-13 * mmax) mmin = std::min(mmin, std::abs(x));
  }
  if (!(mmax > 0)) throw Error(ErrorKind::invalid_argument, "growth_bound_check: V = 0 has no growth to measure");

  GrowthReport r;
  // Stay well inside the radius where the truncation holds all zeros that
  // matter: |z| below a twentieth of the largest box zero.
  const double rhi = 0.05 / mmin;
  r.radii = geometric_grid(rhi * 1e-3, rhi, 24);
  r.angles = {pi / 4, pi / 2, 3 * pi / 4, 5 * pi / 4, 3 * pi / 2, 7 * pi / 4};
  auto log_abs = [&](cplx z) {
    double s = 0;
    for (const auto& x : mu) s += log_weierstrass_factor(p - 1, -z * x).real();
    return s;
  };
  r.estimate = estimate_order_log(log_abs, r.angles, r.radii);
  r.lower_bound = d / 2 + 1;
  r.upper_bound = d / 2 + 1;
  const double slack = d == 1 ? 0.15 : 0.2;
  r.within_window = r.estimate.order >= r.lower_bound - slack && r.estimate.order <= r.upper_bound + slack;
  return r;
}

}  // namespace specdet
