// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/gff.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "specdet/error.hpp"
#include "specdet/operators.hpp"
#include "specdet/rng.hpp"

namespace specdet {

namespace {

constexpr double spectral_margin = 0.05;

std::vector<Eigen::Index> reflection(const ModeBasis& basis) {
  std::vector<Eigen::Index> R(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Mode& m = basis.mode(i);
    R[i] = Eigen::Index(*basis.index_of(Mode{-m[0], -m[1]}));
  }
  return R;
}

MCEstimate estimate_of(const std::vector<double>& x, std::uint64_t seed) {
  const SampleMoments m = sample_moments(x);
  MCEstimate e;
  e.mean = m.mean;
  e.std_error = m.std_error;
  e.samples = m.count;
  e.seed = seed;
  return e;
}

void check_mc_args(const PerturbationField& V, double eps, std::size_t samples, const ModeBasis& basis,
                   const char* who) {
  std::ostringstream os;
  os << who << ": ";
  if (V.dim() != basis.dim()) {
    os << "field dimension does not match the basis";
  } else if (!V.is_real()) {
    os << "V must be real valued";
  } else if (!(eps >= 0)) {
    os << "eps must be >= 0";
  } else if (samples < 100) {
    os << "need at least 100 samples";
  } else {
    return;
  }
  throw Error(ErrorKind::invalid_argument, os.str());
}

// Spectrum of T = e^{-eps Delta} Delta^{-1/2} V Delta^{-1/2} e^{-eps Delta},
// which shares its determinant with e^{-eps Delta} Delta^{-1} e^{-eps Delta} V.
std::vector<cplx> smeared_spectrum(const PerturbationField& V, double eps, const ModeBasis& basis,
                                   double& min_eigenvalue, const char* who) {
  Eigen::VectorXd s(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double l = basis.free_eigenvalue(i);
    s(Eigen::Index(i)) = std::exp(-eps * l) / std::sqrt(l);
  }
  const Eigen::MatrixXcd T = s.asDiagonal() * convolution_matrix(V, basis) * s.asDiagonal();
  const auto mu = eigenvalues(T, basis);
  min_eigenvalue = 0;
  for (const auto& x : mu) min_eigenvalue = std::min(min_eigenvalue, x.real());
  if (!(min_eigenvalue > -1 + spectral_margin)) {
    std::ostringstream os;
    os << who << ": partition function divergent for this V, eps = " << eps
       << " (smallest eigenvalue of the smeared operator " << min_eigenvalue << ")";
    throw Error(ErrorKind::invalid_argument, os.str());
  }
  return mu;
}

void finish(PartitionResult& r) {
  r.reference_value = std::exp(-0.5 * r.reference.log_value.real());
  const double diff = std::abs(r.estimate.mean - r.reference_value);
  r.deviation_sigmas = diff == 0 ? 0.0 : diff / r.estimate.std_error;
  r.pass = diff <= 3 * r.estimate.std_error;
}

// Energies of the smeared samples for each eps, streams 0..K-1.
std::vector<std::vector<double>> sample_energies(const PerturbationField& V, const std::vector<double>& eps,
                                                 std::size_t samples, std::uint64_t seed,
                                                 const ModeBasis& basis) {
  const QuadraticForm form(V, basis);
  std::vector<std::vector<double>> out(eps.size(), std::vector<double>(samples));
  std::vector<std::vector<double>> damp(eps.size(), std::vector<double>(basis.size()));
  for (std::size_t e = 0; e < eps.size(); ++e) {
    for (std::size_t i = 0; i < basis.size(); ++i) {
      const double l = basis.free_eigenvalue(i);
      damp[e][i] = std::exp(-eps[e] * l) / std::sqrt(l);
    }
  }
  std::vector<cplx> phi(basis.size());
  for (std::size_t k = 0; k < samples; ++k) {
    const GFFSample s = sample_gff(basis, seed, k);
    for (std::size_t e = 0; e < eps.size(); ++e) {
      for (std::size_t i = 0; i < basis.size(); ++i) phi[i] = s.coefficients[i] * damp[e][i];
      out[e][k] = form(phi).real();
    }
  }
  return out;
}

}  // namespace

std::vector<cplx> GFFSample::field() const {
  std::vector<cplx> f(coefficients.size());
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = coefficients[i] / std::sqrt(basis->free_eigenvalue(i));
  return f;
}

GFFSample sample_gff(const ModeBasis& basis, std::uint64_t seed, std::uint64_t stream) {
  GFFSample s;
  s.seed = seed;
  s.stream = stream;
  s.basis = &basis;
  s.coefficients.assign(basis.size(), 0.0);
  CounterStream rng(seed, stream);
  const auto R = reflection(basis);
  const double r2 = std::sqrt(0.5);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const auto j = std::size_t(R[i]);
    if (j == i) {
      s.coefficients[i] = rng.normal();
    } else if (i < j) {
      const double a = rng.normal();
      const double b = rng.normal();
      s.coefficients[i] = cplx(a, b) * r2;
      s.coefficients[j] = cplx(a, -b) * r2;
    }
  }
  return s;
}

std::vector<cplx> smear(const GFFSample& phi, double eps) {
  if (!(eps >= 0)) throw Error(ErrorKind::invalid_argument, "smear: eps must be >= 0");
  std::vector<cplx> f = phi.field();
  for (std::size_t i = 0; i < f.size(); ++i) f[i] *= std::exp(-eps * phi.basis->free_eigenvalue(i));
  return f;
}

QuadraticForm::QuadraticForm(const PerturbationField& V, const ModeBasis& basis) {
  if (V.dim() != basis.dim()) {
    throw Error(ErrorKind::invalid_argument, "quadratic_energy: field dimension does not match the basis");
  }
  for (const auto& [q, v] : V.coefficients()) {
    values_.push_back(v);
    std::vector<int> idx(basis.size(), -1);
    for (std::size_t a = 0; a < basis.size(); ++a) {
      if (auto j = basis.index_of(basis.mode(a) - q)) idx[a] = int(*j);
    }
    shifted_.push_back(std::move(idx));
  }
}

cplx QuadraticForm::operator()(const std::vector<cplx>& phi) const {
  cplx s = 0;
  for (std::size_t q = 0; q < values_.size(); ++q) {
    const auto& idx = shifted_[q];
    cplx t = 0;
    for (std::size_t a = 0; a < phi.size(); ++a) {
      if (idx[a] >= 0) t += std::conj(phi[a]) * phi[std::size_t(idx[a])];
    }
    s += values_[q] * t;
  }
  return s;
}

cplx quadratic_energy(const std::vector<cplx>& phi_hat, const PerturbationField& V, const ModeBasis& basis) {
  if (phi_hat.size() != basis.size()) {
    throw Error(ErrorKind::invalid_argument, "quadratic_energy: coefficient vector does not match the basis");
  }
  return QuadraticForm(V, basis)(phi_hat);
}

PartitionResult mc_partition(const PerturbationField& V, double eps, std::size_t samples, std::uint64_t seed,
                             const ModeBasis& basis) {
  check_mc_args(V, eps, samples, basis, "mc_partition");
  PartitionResult r;
  r.epsilon = eps;
  const auto mu = smeared_spectrum(V, eps, basis, r.min_eigenvalue, "mc_partition");
  r.reference = fredholm_det_from_spectrum(mu);
  const auto energy = sample_energies(V, {eps}, samples, seed, basis).front();
  std::vector<double> w(samples);
  for (std::size_t k = 0; k < samples; ++k) w[k] = std::exp(-0.5 * energy[k]);
  r.estimate = estimate_of(w, seed);
  finish(r);
  return r;
}

PartitionResult mc_partition_renormalized(const PerturbationField& V, double eps, std::size_t samples,
                                          std::uint64_t seed, const ModeBasis& basis) {
  check_mc_args(V, eps, samples, basis, "mc_partition_renormalized");
  if (basis.dim() != 2) {
    throw Error(ErrorKind::invalid_argument, "mc_partition_renormalized: the Wick counterterm is set up for d = 2");
  }
  PartitionResult r;
  r.epsilon = eps;
  const auto mu = smeared_spectrum(V, eps, basis, r.min_eigenvalue, "mc_partition_renormalized");
  r.reference = gk_det_from_spectrum(2, mu);
  r.counterterm = 0.5 * regularized_trace(V, eps, basis).real();
  const auto energy = sample_energies(V, {eps}, samples, seed, basis).front();
  std::vector<double> w(samples);
  for (std::size_t k = 0; k < samples; ++k) w[k] = std::exp(-0.5 * energy[k] + r.counterterm);
  r.estimate = estimate_of(w, seed);
  finish(r);
  return r;
}

GffEpsScan gff_log_eps_scan(const PerturbationField& V, const std::vector<double>& eps, std::size_t samples,
                            std::uint64_t seed, const ModeBasis& basis) {
  for (double e : eps) check_mc_args(V, e, samples, basis, "gff_log_eps_scan");
  if (eps.size() < 8) throw Error(ErrorKind::invalid_argument, "gff_log_eps_scan: need at least 8 eps values");
  const auto energy = sample_energies(V, eps, samples, seed, basis);
  GffEpsScan scan;
  std::map<double, cplx> plain, renorm;
  std::vector<double> sp, sr;
  for (std::size_t e = 0; e < eps.size(); ++e) {
    const double ct = 0.5 * regularized_trace(V, eps[e], basis).real();
    std::vector<double> wp(samples), wr(samples);
    for (std::size_t k = 0; k < samples; ++k) {
      wp[k] = std::exp(-0.5 * energy[e][k]);
      wr[k] = std::exp(-0.5 * energy[e][k] + ct);
    }
    GffScanRow row;
    row.eps = eps[e];
    row.plain = estimate_of(wp, seed);
    row.renormalized = estimate_of(wr, seed);
    row.plain_log_mean = std::log(row.plain.mean);
    row.renormalized_log_mean = std::log(row.renormalized.mean);
    plain[eps[e]] = row.plain_log_mean;
    renorm[eps[e]] = row.renormalized_log_mean;
    scan.rows.push_back(row);
  }
  // Samples in the map's (ascending eps) order.
  std::sort(scan.rows.begin(), scan.rows.end(), [](const auto& a, const auto& b) { return a.eps < b.eps; });
  for (const auto& row : scan.rows) {
    sp.push_back(row.plain.std_error / row.plain.mean);
    sr.push_back(row.renormalized.std_error / row.renormalized.mean);
  }
  FitOptions fo;
  fo.basis = {"log_eps", "const", "eps*log_eps", "eps"};
  // The box cuts the smearing off below eps ~ 1 / lambda_cutoff, so the
  // ladder cannot span the usual two decades.
  fo.min_span_decades = 0.5;
  // log_eps and eps*log_eps are nearly collinear over such a ladder, so
  // backward elimination would keep whichever the noise favours.  The
  // decision uses the full design.
  fo.zero_threshold = 0.0;
  fo.sigma = sp;
  scan.plain_fit = counterterm_extract(plain, fo);
  fo.sigma = sr;
  scan.renormalized_fit = counterterm_extract(renorm, fo);
  auto has_log = [](const AsymptoticFit& f) {
    return std::find(f.basis.begin(), f.basis.end(), "log_eps") != f.basis.end() &&
           std::abs(f.coefficient("log_eps")) > 3 * f.standard_error("log_eps");
  };
  scan.plain_has_log = has_log(scan.plain_fit);
  scan.renormalized_has_log = has_log(scan.renormalized_fit);
  return scan;
}

DgffResult dgff_ratio(const PerturbationField& V, const Geometry& geometry, const DgffOptions& options) {
  geometry.validate();
  if (geometry.kind != GeometryKind::torus2 || V.dim() != 2) {
    throw Error(ErrorKind::invalid_argument, "dgff_ratio: needs a field on the 2-torus");
  }
  double vmax = 0;
  for (const auto& [n, v] : V.coefficients()) vmax = std::max(vmax, std::abs(v));
  if (std::abs(V.mean()) > 1e-12 * std::max(vmax, 1.0)) {
    throw Error(ErrorKind::invalid_argument, "dgff_ratio: V must have zero mean");
  }
  if (options.sizes.empty()) throw Error(ErrorKind::invalid_argument, "dgff_ratio: no lattice sizes");
  for (std::size_t i = 0; i < options.sizes.size(); ++i) {
    if (options.sizes[i] < 2 * V.bandwidth() + 1 || (i > 0 && options.sizes[i] <= options.sizes[i - 1])) {
      throw Error(ErrorKind::invalid_argument,
                  "dgff_ratio: sizes must increase and resolve the field's bandwidth");
    }
  }

  DgffResult r;
  const ModeBasis basis(geometry, options.continuum_cutoff);
  const DetResult num = zeta_det_mellin(build_laplace(geometry, V, basis), options.zeta);
  const DetResult den = zeta_det_mellin(build_laplace(geometry, PerturbationField(2), basis), options.zeta);
  r.continuum = DetResult::from_log(num.log_value - den.log_value, Method::zeta_mellin, num.error + den.error,
                                    basis.cutoff());
  r.continuum_log_ratio = r.continuum.log_value.real();

  std::vector<double> h2, tableau;
  for (int n : options.sizes) {
    DgffRow row;
    row.size = n;
    row.mesh = geometry.length / n;
    const auto samples = V.sample_grid(geometry, n);
    const double a = lattice_logdet(lattice_laplacian_sparse(n, geometry.length, geometry.mass, samples));
    const double b = lattice_logdet(lattice_laplacian_sparse(n, geometry.length, geometry.mass));
    row.log_ratio = a - b;
    row.error = std::abs(row.log_ratio - r.continuum_log_ratio);
    // Neville: tableau[j] holds the extrapolation over the last j + 1 sizes.
    h2.push_back(row.mesh * row.mesh);
    std::vector<double> next{row.log_ratio};
    for (std::size_t j = 0; j < tableau.size(); ++j) {
      const double hi = h2[h2.size() - 2 - j], lo = h2.back();
      next.push_back(next[j] + (next[j] - tableau[j]) * lo / (hi - lo));
    }
    tableau = next;
    row.extrapolated = tableau.back();
    r.rows.push_back(row);
  }
  r.extrapolated_log_ratio = r.rows.back().extrapolated;
  r.relative_error = std::abs(std::expm1(r.extrapolated_log_ratio - r.continuum_log_ratio));
  r.monotone = true;
  for (std::size_t i = 2; i < r.rows.size(); ++i) {
    if (!(r.rows[i].error < r.rows[i - 1].error)) r.monotone = false;
  }
  return r;
}

}  // namespace specdet
