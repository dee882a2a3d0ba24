// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <map>
#include <string>
#include <vector>

#include "specdet/determinants.hpp"
#include "specdet/geometry.hpp"
#include "specdet/perturbation.hpp"

namespace specdet {

// One function of eps in a fit basis.  Tags: "const", "log_eps", "eps",
// "eps^a" with a an integer or a half integer written "k/2", and any power
// followed by "*log_eps", e.g. "eps^-1/2", "eps^3/2", "eps^2*log_eps".
struct BasisTerm {
  std::string tag;
  double power = 0.0;
  int log_power = 0;

  static BasisTerm parse(const std::string& tag);
  double operator()(double eps) const;
  bool singular() const { return power < 0 || (power == 0 && log_power > 0); }
};

// {eps^-1, eps^-1/2, log_eps, const, eps^1/2, eps}.
const std::vector<std::string>& default_counterterm_basis();

struct AsymptoticFit {
  std::vector<std::string> basis;  // terms kept after elimination
  std::map<std::string, double> coefficients;
  // Statistical and truncation errors combined in quadrature.
  std::map<std::string, double> std_errors;
  // Shift of each coefficient when the probe terms join the basis.
  std::map<std::string, double> systematic;
  std::map<std::string, double> imag_coefficients;
  std::vector<std::string> zeroed;
  double residual = 0.0;  // RMS over the grid
  double condition = 0.0;
  std::vector<double> grid;

  double coefficient(const std::string& tag) const;
  double standard_error(const std::string& tag) const;
  cplx evaluate(double eps) const;
  // Sum of the singular terms (negative powers and pure log) at eps.
  cplx singular_part(double eps) const;
};

struct FitOptions {
  std::vector<std::string> basis = default_counterterm_basis();
  double zero_threshold = 3.0;
  double max_condition = 1e10;
  double min_span_decades = 2.0;
  // Optional per-sample standard deviations (same order as the samples).
  std::vector<double> sigma;
  // Next-order terms used only to estimate the truncation error of the
  // basis.  Skipped when the enlarged design is ill conditioned.
  std::vector<std::string> probe;
};

// Least squares of the real part of the samples on the basis, with
// backward elimination of coefficients below zero_threshold fit-covariance
// standard errors ("const" is never dropped).  The imaginary part is fitted on the
// surviving terms.
AsymptoticFit counterterm_extract(const std::map<double, cplx>& samples, const FitOptions& options = {});

// e^{-2 eps lambda} / lambda on the free spectrum of the basis.
Eigen::VectorXd regularized_green(const ModeBasis& basis, double eps);

struct RegularizedOptions {
  // Adds the walks leaving the basis box (see walk_trace) up to the box where
  // e^{-2 eps lambda} underflows, so the result does not depend on N.
  bool tail_correction = true;
  int max_order = 12;
  double tolerance = 1e-14;
  double max_cost = 2e9;
};

// det_F(Id + e^{-2 eps Delta} Delta^{-1} V).
DetResult regularized_fredholm(const PerturbationField& V, double eps, const ModeBasis& basis,
                               const Geometry& geometry, const RegularizedOptions& options = {});

// Tr(e^{-2 eps Delta} Delta^{-1} V) = Vhat(0) sum_n e^{-2 eps lambda_n} / lambda_n.
cplx regularized_trace(const PerturbationField& V, double eps, const ModeBasis& basis);

// Q_eps split by monomial order: orders[n] holds the singular part
// subtracted at order n and local_integral[n] the value of int V^n, so the
// coefficient multiplying the local functional is their ratio.
struct CounterTerm {
  std::map<int, AsymptoticFit> orders;
  std::map<int, cplx> local_integral;
  bool empty() const { return orders.empty(); }
};

struct RenormalizedDet {
  DetResult det;
  CounterTerm counterterm;
  AsymptoticFit fit;
  std::map<double, cplx> samples;
};

struct RenormOptions {
  std::vector<double> eps_grid;
  // Overrides the dimension default when non-empty.
  std::vector<std::string> basis;
  RegularizedOptions regularization;
  // Power divergences are reported as errors once they carry more than
  // this fraction of the log-type variation over the grid.
  double divergence_fraction = 1e-2;
};

std::vector<std::string> renormalization_basis(int dim);
// The next two orders after renormalization_basis(dim).
std::vector<std::string> renormalization_probe(int dim);

// Singular part of log det_F(Id + e^{-2 eps Delta} Delta^{-1} V) fitted and
// subtracted; the remainder's eps -> 0 limit (the fitted constant) is the
// renormalized log determinant.
RenormalizedDet renormalized_det(const PerturbationField& V, const Geometry& geometry,
                                 const ModeBasis& basis, const RenormOptions& options);

// Richardson extrapolation to eps = 0 from the first terms.size() + 1
// samples f(eps_i), eliminating the given basis terms.
double richardson_to_zero(const std::vector<double>& eps, const std::vector<double>& f,
                          const std::vector<std::string>& terms);

}  // namespace specdet
