// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/heat_renorm.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specdet/error.hpp"
#include "specdet/operators.hpp"

namespace specdet {

namespace {

double parse_power(const std::string& s, const std::string& tag) {
  try {
    const auto slash = s.find('/');
    if (slash == std::string::npos) return std::stod(s);
    const double num = std::stod(s.substr(0, slash));
    const double den = std::stod(s.substr(slash + 1));
    if (den != 2.0) throw std::invalid_argument("den");
    return num / den;
  } catch (const std::exception&) {
    throw Error(ErrorKind::invalid_argument, "basis term '" + tag + "': bad exponent");
  }
}

}  // namespace

BasisTerm BasisTerm::parse(const std::string& tag) {
  BasisTerm t;
  t.tag = tag;
  std::string s = tag;
  const std::string log_suffix = "*log_eps";
  if (s == "const") return t;
  if (s == "log_eps") {
    t.log_power = 1;
    return t;
  }
  if (s.size() > log_suffix.size() && s.compare(s.size() - log_suffix.size(), log_suffix.size(), log_suffix) == 0) {
    t.log_power = 1;
    s = s.substr(0, s.size() - log_suffix.size());
  }
  if (s == "eps") {
    t.power = 1;
  } else if (s.rfind("eps^", 0) == 0) {
    t.power = parse_power(s.substr(4), tag);
  } else {
    throw Error(ErrorKind::invalid_argument, "basis term '" + tag + "' not recognized");
  }
  if (t.power == 0 && t.log_power == 0) t.tag = "const";
  return t;
}

double BasisTerm::operator()(double eps) const {
  double v = power == 0 ? 1.0 : std::pow(eps, power);
  if (log_power) v *= std::log(eps);
  return v;
}

const std::vector<std::string>& default_counterterm_basis() {
  static const std::vector<std::string> b{"eps^-1", "eps^-1/2", "log_eps", "const", "eps^1/2", "eps"};
  return b;
}

double AsymptoticFit::coefficient(const std::string& tag) const {
  auto it = coefficients.find(tag);
  return it == coefficients.end() ? 0.0 : it->second;
}

double AsymptoticFit::standard_error(const std::string& tag) const {
  auto it = std_errors.find(tag);
  return it == std_errors.end() ? 0.0 : it->second;
}

cplx AsymptoticFit::evaluate(double eps) const {
  cplx s = 0;
  for (const auto& tag : basis) {
    const double f = BasisTerm::parse(tag)(eps);
    s += cplx(coefficient(tag), imag_coefficients.count(tag) ? imag_coefficients.at(tag) : 0.0) * f;
  }
  return s;
}

cplx AsymptoticFit::singular_part(double eps) const {
  cplx s = 0;
  for (const auto& tag : basis) {
    const BasisTerm t = BasisTerm::parse(tag);
    if (!t.singular()) continue;
    s += cplx(coefficient(tag), imag_coefficients.count(tag) ? imag_coefficients.at(tag) : 0.0) * t(eps);
  }
  return s;
}

namespace {

struct LsqResult {
  Eigen::VectorXd coef;
  Eigen::VectorXd se;
  double rms = 0.0;
  double condition = 0.0;
};

// Column-scaled least squares through an SVD, returning the coefficient
// covariance from the residual variance.
LsqResult lsq(const Eigen::MatrixXd& X, const Eigen::VectorXd& y, const Eigen::VectorXd& w,
              bool known_sigma) {
  const Eigen::Index n = X.rows(), k = X.cols();
  Eigen::MatrixXd Xw = w.asDiagonal() * X;
  Eigen::VectorXd yw = w.asDiagonal() * y;
  Eigen::VectorXd scale(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    scale(j) = Xw.col(j).norm();
    if (scale(j) == 0) scale(j) = 1;
    Xw.col(j) /= scale(j);
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Xw, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  LsqResult r;
  r.condition = sv(k - 1) > 0 ? sv(0) / sv(k - 1) : INFINITY;
  const Eigen::VectorXd cs = svd.solve(yw);
  r.coef = cs.cwiseQuotient(scale);
  const Eigen::VectorXd res = X * r.coef - y;
  r.rms = std::sqrt(res.squaredNorm() / double(n));
  const double dof = double(n - k);
  const double chi2 = (Xw * cs - yw).squaredNorm();
  // Floor at roundoff so exact data still yields finite significance.
  double s2 = dof > 0 ? chi2 / dof : 0.0;
  if (known_sigma) s2 = std::max(s2, 1.0);
  const double floor = 1e-15 * std::max(1.0, yw.cwiseAbs().maxCoeff());
  s2 = std::max(s2, floor * floor);
  const Eigen::MatrixXd Vm = svd.matrixV();
  r.se.resize(k);
  for (Eigen::Index j = 0; j < k; ++j) {
    double v = 0;
    for (Eigen::Index i = 0; i < k; ++i) v += Vm(j, i) * Vm(j, i) / (sv(i) * sv(i));
    r.se(j) = std::sqrt(s2 * v) / scale(j);
  }
  return r;
}

}  // namespace

AsymptoticFit counterterm_extract(const std::map<double, cplx>& samples, const FitOptions& options) {
  const std::size_t n = samples.size();
  if (n < 8) throw Error(ErrorKind::invalid_argument, "counterterm_extract: need >= 8 eps samples");
  std::vector<double> eps;
  Eigen::VectorXd yr(n), yi(n);
  {
    std::size_t i = 0;
    for (const auto& [e, v] : samples) {
      if (!(e > 0)) throw Error(ErrorKind::invalid_argument, "counterterm_extract: eps must be positive");
      eps.push_back(e);
      yr(i) = v.real();
      yi(i) = v.imag();
      ++i;
    }
  }
  if (std::log10(eps.back() / eps.front()) < options.min_span_decades - 1e-9) {
    std::ostringstream os;
    os << "counterterm_extract: eps grid must span >= " << options.min_span_decades << " decades";
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  const double mean_gap = std::log(eps.back() / eps.front()) / double(n - 1);
  for (std::size_t i = 1; i < n; ++i) {
    const double g = std::log(eps[i] / eps[i - 1]);
    if (g > 3 * mean_gap) {
      throw Error(ErrorKind::invalid_argument, "counterterm_extract: eps grid is not log spaced");
    }
  }
  if (options.basis.empty() || options.basis.size() >= n) {
    throw Error(ErrorKind::invalid_argument, "counterterm_extract: basis size must be in [1, samples)");
  }
  Eigen::VectorXd w = Eigen::VectorXd::Ones(n);
  const bool known_sigma = !options.sigma.empty();
  if (known_sigma) {
    if (options.sigma.size() != n) throw Error(ErrorKind::invalid_argument, "counterterm_extract: sigma size mismatch");
    for (std::size_t i = 0; i < n; ++i) {
      if (!(options.sigma[i] > 0)) throw Error(ErrorKind::invalid_argument, "counterterm_extract: sigma must be positive");
      w(i) = 1.0 / options.sigma[i];
    }
  }

  std::vector<BasisTerm> terms;
  for (const auto& tag : options.basis) terms.push_back(BasisTerm::parse(tag));
  auto design = [&](const std::vector<BasisTerm>& ts) {
    Eigen::MatrixXd X(n, ts.size());
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < ts.size(); ++j) X(i, j) = ts[j](eps[i]);
    return X;
  };

  AsymptoticFit fit;
  fit.grid = eps;
  LsqResult r = lsq(design(terms), yr, w, known_sigma);
  fit.condition = r.condition;
  if (!(r.condition <= options.max_condition)) {
    std::ostringstream os;
    os << "counterterm_extract: design matrix condition " << r.condition
       << " exceeds " << options.max_condition << "; use a wider eps span or fewer basis terms";
    throw Error(ErrorKind::fit_failure, os.str());
  }
  std::vector<BasisTerm> probe;
  for (const auto& tag : options.probe) probe.push_back(BasisTerm::parse(tag));
  // Reported error per coefficient: fit covariance plus the shift under the
  // probe terms.  Elimination uses the fit covariance alone.
  Eigen::VectorXd sys;
  auto total_errors = [&]() {
    sys = Eigen::VectorXd::Zero(Eigen::Index(terms.size()));
    if (!probe.empty() && terms.size() + probe.size() + 1 < n) {
      std::vector<BasisTerm> big = terms;
      big.insert(big.end(), probe.begin(), probe.end());
      const LsqResult rp = lsq(design(big), yr, w, known_sigma);
      if (rp.condition <= options.max_condition) {
        for (std::size_t j = 0; j < terms.size(); ++j) sys(Eigen::Index(j)) = std::abs(rp.coef(j) - r.coef(j));
      }
    }
    Eigen::VectorXd tot(sys.size());
    for (Eigen::Index j = 0; j < sys.size(); ++j) tot(j) = std::hypot(r.se(j), sys(j));
    return tot;
  };
  while (terms.size() > 1) {
    int worst = -1;
    double worst_ratio = options.zero_threshold;
    for (std::size_t j = 0; j < terms.size(); ++j) {
      if (terms[j].tag == "const") continue;
      const double ratio = std::abs(r.coef(j)) / r.se(j);
      if (ratio < worst_ratio) {
        worst_ratio = ratio;
        worst = int(j);
      }
    }
    if (worst < 0) break;
    fit.zeroed.push_back(terms[worst].tag);
    terms.erase(terms.begin() + worst);
    r = lsq(design(terms), yr, w, known_sigma);
  }
  const Eigen::VectorXd tot = total_errors();
  const LsqResult ri = lsq(design(terms), yi, w, known_sigma);
  for (std::size_t j = 0; j < terms.size(); ++j) {
    fit.basis.push_back(terms[j].tag);
    fit.coefficients[terms[j].tag] = r.coef(j);
    fit.std_errors[terms[j].tag] = tot(j);
    fit.systematic[terms[j].tag] = sys(j);
    fit.imag_coefficients[terms[j].tag] = ri.coef(j);
  }
  for (const auto& z : fit.zeroed) {
    fit.coefficients[z] = 0.0;
    fit.imag_coefficients[z] = 0.0;
  }
  fit.residual = std::hypot(r.rms, ri.rms);
  return fit;
}

Eigen::VectorXd regularized_green(const ModeBasis& basis, double eps) {
  if (!(eps > 0)) throw Error(ErrorKind::invalid_argument, "regularized_green: eps must be positive");
  Eigen::VectorXd g(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double l = basis.free_eigenvalue(i);
    g(i) = std::exp(-2 * eps * l) / l;
  }
  return g;
}

cplx regularized_trace(const PerturbationField& V, double eps, const ModeBasis& basis) {
  return V.mean() * regularized_green(basis, eps).sum();
}

DetResult regularized_fredholm(const PerturbationField& V, double eps, const ModeBasis& basis,
                               const Geometry& geometry, const RegularizedOptions& options) {
  if (!(geometry == basis.geometry())) {
    throw Error(ErrorKind::invalid_argument, "regularized_fredholm: basis built on a different geometry");
  }
  const Eigen::VectorXd g = regularized_green(basis, eps);
  DetResult r;
  if (V.is_zero()) {
    r = DetResult::from_log(0.0, Method::fredholm);
  } else if (V.bandwidth() == 0) {
    std::vector<cplx> mu(g.size());
    for (Eigen::Index i = 0; i < g.size(); ++i) mu[i] = V.mean() * g(i);
    r = fredholm_det_from_spectrum(mu);
  } else {
    const Eigen::MatrixXcd K = g.cast<cplx>().asDiagonal() * convolution_matrix(V, basis);
    r = fredholm_det_lu(K);
  }
  r.cutoff = basis.cutoff();
  r.params["eps"] = eps;
  if (!options.tail_correction || V.is_zero()) return r;

  // Outer box where e^{-2 eps lambda} / lambda drops below 1e-17.
  const double k0 = geometry.wavenumber();
  const double lmax = 40.0 / (2 * eps);
  const int N = basis.cutoff();
  const int B = std::max(N + 2 * std::max(V.bandwidth(), 1),
                         int(std::ceil(std::sqrt(std::max(lmax - geometry.mass * geometry.mass, 0.0)) / k0)));
  const ModeWeight gw = [&](const Mode& n) -> cplx {
    const double l = basis.free_eigenvalue(n);
    return std::exp(-2 * eps * l) / l;
  };
  cplx corr = 0;
  double last = 0, prev = INFINITY;
  int order = 0;
  bool converged = false;
  const double tol = options.tolerance * std::max(1.0, std::abs(r.log_value));
  // Two small terms in a row: odd orders vanish for fields with only even
  // closed walks.
  for (int k = 1; k <= options.max_order; ++k) {
    if (walk_trace_cost(V, geometry.dim(), B, k, N) > options.max_cost) break;
    const cplx t = walk_trace(V, gw, geometry.dim(), B, k, N) / double(k);
    corr += (k % 2 ? 1.0 : -1.0) * t;
    prev = last;
    last = std::abs(t);
    order = k;
    if (k >= 2 && last <= tol && prev <= tol) {
      converged = true;
      break;
    }
  }
  last = std::max(last, prev);
  const double err = r.error + (converged ? last : std::max(last, 1e-8));
  DetResult out = DetResult::from_log(r.log_value + corr, r.method, err, N);
  out.tags = r.tags;
  out.tags.push_back("tail_corrected");
  if (!converged) out.tags.push_back("tail_unconverged");
  out.params = r.params;
  out.params["tail_box"] = B;
  out.params["tail_orders"] = order;
  out.params["tail_correction"] = std::abs(corr);
  return out;
}

std::vector<std::string> renormalization_probe(int dim) {
  if (dim == 1) return {"eps^7/2", "eps^4"};
  return {"eps^4", "eps^4*log_eps"};
}

std::vector<std::string> renormalization_basis(int dim) {
  if (dim == 1) return {"const", "eps^1/2", "eps", "eps^3/2", "eps^2", "eps^5/2", "eps^3"};
  return {"log_eps", "const", "eps", "eps*log_eps", "eps^2", "eps^2*log_eps", "eps^3", "eps^3*log_eps"};
}

double richardson_to_zero(const std::vector<double>& eps, const std::vector<double>& f,
                          const std::vector<std::string>& terms) {
  const std::size_t k = terms.size() + 1;
  if (eps.size() < k || f.size() != eps.size()) {
    throw Error(ErrorKind::invalid_argument, "richardson_to_zero: need terms.size() + 1 samples");
  }
  std::vector<BasisTerm> ts;
  for (const auto& t : terms) ts.push_back(BasisTerm::parse(t));
  Eigen::MatrixXd A(k, k);
  Eigen::VectorXd b(k);
  for (std::size_t i = 0; i < k; ++i) {
    A(i, 0) = 1.0;
    for (std::size_t j = 0; j < ts.size(); ++j) A(i, j + 1) = ts[j](eps[i]);
    b(i) = f[i];
  }
  return A.fullPivLu().solve(b)(0);
}

RenormalizedDet renormalized_det(const PerturbationField& V, const Geometry& geometry,
                                 const ModeBasis& basis, const RenormOptions& options) {
  const int d = geometry.dim();
  if (geometry.kind == GeometryKind::lattice_torus) {
    throw Error(ErrorKind::invalid_argument, "renormalized_det: continuum geometry required");
  }
  RenormalizedDet out;
  for (double e : options.eps_grid) {
    out.samples[e] = regularized_fredholm(V, e, basis, geometry, options.regularization).log_value;
  }

  FitOptions fo;
  fo.basis = options.basis.empty() ? renormalization_basis(d) : options.basis;
  if (options.basis.empty()) fo.probe = renormalization_probe(d);
  out.fit = counterterm_extract(out.samples, fo);

  // Power divergences should be absent for d <= 2.  Refit with them added
  // and report a diagnostic if they carry real weight.
  std::vector<std::string> diag{"eps^-1", "eps^-1/2"};
  for (const auto& t : fo.basis) {
    if (std::find(diag.begin(), diag.end(), t) == diag.end()) diag.push_back(t);
  }
  const std::size_t max_terms = out.samples.size() - 2;
  while (diag.size() > max_terms) diag.pop_back();
  bool checked = false;
  try {
    FitOptions fd;
    fd.basis = diag;
    const AsymptoticFit dfit = counterterm_extract(out.samples, fd);
    checked = true;
    const double lo = out.samples.begin()->first, hi = out.samples.rbegin()->first;
    double log_scale = std::abs(out.fit.coefficient("log_eps")) * std::log(hi / lo);
    double spread = 0;
    for (const auto& [e, v] : out.samples) spread = std::max(spread, std::abs(v - out.samples.begin()->second));
    log_scale = std::max(log_scale, spread);
    for (const char* tag : {"eps^-1", "eps^-1/2"}) {
      const double c = dfit.coefficient(tag);
      if (c == 0.0) continue;
      const BasisTerm t = BasisTerm::parse(tag);
      const double weight = std::abs(c) * std::abs(t(lo) - t(hi));
      if (weight > options.divergence_fraction * log_scale + 1e-10) {
        std::ostringstream os;
        os << "renormalized_det: power divergence " << tag << " with coefficient " << c
           << " in dimension " << d << "; only log eps divergences are expected";
        throw Error(ErrorKind::divergent, os.str());
      }
    }
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::fit_failure) throw;
  }

  AsymptoticFit singular;
  singular.grid = out.fit.grid;
  singular.condition = out.fit.condition;
  singular.residual = out.fit.residual;
  for (const auto& tag : out.fit.basis) {
    if (!BasisTerm::parse(tag).singular()) continue;
    singular.basis.push_back(tag);
    singular.coefficients[tag] = out.fit.coefficient(tag);
    singular.std_errors[tag] = out.fit.standard_error(tag);
    singular.imag_coefficients[tag] = out.fit.imag_coefficients.at(tag);
  }
  if (!singular.basis.empty()) {
    out.counterterm.orders[1] = singular;
    out.counterterm.local_integral[1] = V.integral(geometry);
  }

  const cplx limit(out.fit.coefficient("const"), out.fit.imag_coefficients.at("const"));
  const double err = out.fit.standard_error("const") + out.fit.residual;
  out.det = DetResult::from_log(limit, Method::renormalized, err, basis.cutoff());
  out.det.tags.push_back("renormalized");
  if (!checked) out.det.tags.push_back("divergence_check_skipped");

  std::vector<double> e3, r3;
  for (const auto& [e, v] : out.samples) {
    if (e3.size() == 3) break;
    e3.push_back(e);
    r3.push_back((v - singular.singular_part(e)).real());
  }
  const std::vector<std::string> lead = d == 1 ? std::vector<std::string>{"eps^1/2", "eps"}
                                               : std::vector<std::string>{"eps*log_eps", "eps"};
  const double rich = richardson_to_zero(e3, r3, lead);
  out.det.params["richardson"] = rich;
  out.det.params["richardson_gap"] = std::abs(rich - limit.real());
  out.det.params["fit_residual"] = out.fit.residual;
  out.det.params["log_eps"] = out.fit.coefficient("log_eps");
  out.det.params["log_eps_se"] = out.fit.standard_error("log_eps");
  return out;
}

}  // namespace specdet
