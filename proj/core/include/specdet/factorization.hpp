// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <string>
#include <vector>

#include "specdet/determinants.hpp"
#include "specdet/entire.hpp"
#include "specdet/heat_renorm.hpp"

namespace specdet {

// log det of P + W as a function of the perturbation W.  The checks below
// run against any such route: zeta, Gohberg-Krein or renormalized.
using LogDetFunction = std::function<DetResult(const PerturbationField&)>;

// log det_zeta(Delta + W) on the truncation.
LogDetFunction zeta_logdet(const ModeBasis& basis, const ZetaConfig& cfg = {});
// log det_zeta(D (D + W)) for the circle Dirac operator D = -i d/dx + m.
LogDetFunction dirac_zeta_logdet(double m, const ModeBasis& basis, const ZetaConfig& cfg = {});
// log det_p(Id + Delta^{-1} W), optionally with the closed-walk tail beyond
// the box.
LogDetFunction gk_logdet(const ModeBasis& basis, int p, bool tail_correction = true);
// log(e^{shift int W} Rdet(W)) with Rdet from renormalized_det.
LogDetFunction renormalized_logdet(const ModeBasis& basis, const RenormOptions& options,
                                   double shift = 0.0);
// logdet(W) + c1 int W + c2 int W^2: a local polynomial functional added to
// a route.  The quadratic part has D^2 = 2 c2 int V1 V2.
LogDetFunction with_local_shift(LogDetFunction logdet, const Geometry& geometry, double c1,
                                double c2 = 0.0);

// Free part P of the ray z -> log det_p(Id + z P^{-1} V).
enum class FreeOperator { laplace, dirac };

// log det_p(Id + z P^{-1} V) along a ray.  One spectrum of P^{-1} V on the
// box serves every z; the traces Tr((P^{-1} V)^k) of walks leaving the box
// are summed in growing outer boxes and Richardson extrapolated, then
// added as the series sum_k (-1)^{k+1} z^k D_k / k for k >= p.
class GkRay {
 public:
  struct Options {
    FreeOperator free = FreeOperator::laplace;
    double dirac_mass = 0.5;
    bool tail_correction = true;
    // Largest |z| the tail series must serve.
    double max_abs_z = 1.0;
    double tolerance = 1e-14;
    int max_order = 24;
  };

  GkRay(const PerturbationField& V, const ModeBasis& basis, int p);
  GkRay(const PerturbationField& V, const ModeBasis& basis, int p, const Options& options);

  DetResult operator()(cplx z) const;
  int p() const { return p_; }
  // Eigenvalues of P^{-1} V on the box.
  const std::vector<cplx>& spectrum() const { return mu_; }
  // D_k for k = p, p + 1, ...; their Richardson uncertainty in tail_errors.
  const std::vector<cplx>& tail_traces() const { return tail_; }
  const std::vector<double>& tail_errors() const { return tail_err_; }

 private:
  int p_;
  std::vector<cplx> mu_;
  std::vector<cplx> tail_;
  std::vector<double> tail_err_;
  bool tail_converged_ = true;
};

// Tr((P^{-1} V)^k) over the modes of basis, plus the walks leaving it when
// with_tail is set.  Second member: Richardson uncertainty of the tail.
std::pair<cplx, double> green_power_trace(const PerturbationField& V, const ModeBasis& basis, int k,
                                          bool with_tail, FreeOperator free = FreeOperator::laplace,
                                          double dirac_mass = 0.5);

// --- Polynomial ambiguity -------------------------------------------------

struct PolynomialInZ {
  std::vector<cplx> coefficients;  // ascending degree
  std::vector<double> std_errors;
  // Highest coefficient above threshold times its standard error.
  int degree = 0;
  // RMS of the fit of this degree over the grid.
  double residual = 0.0;
  std::vector<cplx> grid;
  std::vector<cplx> values;
  std::vector<double> sigma;
  std::vector<double> residuals;
  // Grid points dropped by the cut-admissibility screen.
  std::vector<cplx> skipped;

  cplx operator()(cplx z) const;
};

// Weighted least squares in powers of z up to max_degree.  sigma may be
// empty (unit weights, scale from the residual).
PolynomialInZ fit_polynomial(const std::vector<cplx>& grid, const std::vector<cplx>& values,
                             const std::vector<double>& sigma, int max_degree,
                             double threshold = 3.0);

struct FactorizationOptions {
  // Defaults to 11 points on [-1, 1].
  std::vector<cplx> z_grid;
  // Gohberg-Krein index; 0 picks [d/2] + 1 (Laplace) or d + 1 (Dirac).
  int p = 0;
  // Largest degree the factorization allows; -1 picks [d/2] or d.
  int allowed_degree = -1;
  double tolerance = 1e-4;
  bool tail_correction = true;
  double threshold = 3.0;
};

// Fit of g(z) = log det(P + zV) - log det(P) - log det_p(Id + z P^{-1} V)
// with log det taken from logdet.  Throws fit_failure with the residual
// profile when the allowed degree does not reproduce g within tolerance.
PolynomialInZ q_polynomial_fit(const LogDetFunction& logdet, const PerturbationField& V,
                               const ModeBasis& basis, const FactorizationOptions& options = {});
// Zeta route on Delta + zV.
PolynomialInZ q_polynomial_fit(const PerturbationField& V, const ModeBasis& basis,
                               const FactorizationOptions& options = {});
// Zeta route on D (D + zA) against det_p(Id + z D^{-1} A).
PolynomialInZ q_polynomial_fit_dirac(const PerturbationField& A, double m, const ModeBasis& basis,
                                     const FactorizationOptions& options = {});

// --- Gateaux differentials ------------------------------------------------

struct DirectionSet {
  std::vector<PerturbationField> directions;
  // Set when the generating bumps have pairwise disjoint real-space
  // supports.  Band projection spreads the fields beyond them.
  bool support_disjoint = false;
  std::vector<Bump> bumps;

  static DirectionSet from_bumps(const Geometry& geometry, const std::vector<Bump>& bumps, int band);
  static DirectionSet repeated(const PerturbationField& V, int n);
};

struct GateauxOptions {
  // Step ladder for Richardson in h^2; empty picks a default.
  std::vector<double> steps;
};

struct GateauxEstimate {
  cplx value;
  // |last extrapolation - previous level|.
  double error = 0.0;
  std::vector<double> steps;
  // Central differences before extrapolation, one per step.
  std::vector<cplx> per_step;
  int evaluations = 0;
};

// Mixed partial d^n f / dt_1 ... dt_n at t = 0 from tensor-product central
// differences.
using TupleFunction = std::function<cplx(const std::vector<double>&)>;
GateauxEstimate gateaux_diff(const TupleFunction& f, int n, const GateauxOptions& options = {});
// D^n logdet(base; V_1, ..., V_n).  Repeated directions share evaluations.
GateauxEstimate gateaux_diff(const LogDetFunction& logdet, const PerturbationField& base,
                             const DirectionSet& dirs, const GateauxOptions& options = {});

// Default step ladders: {1e-2, 5e-3, 2.5e-3} for second differences in
// d = 1, doubled for third and higher, {4e-2, 2e-2, 1e-2} in d = 2 where
// the Mellin evaluation noise is larger.
std::vector<double> default_steps(int dim, int order);

struct DerivativeReport {
  int order = 0;
  cplx derivative;
  cplx oracle;
  double relative_error = 0.0;
  double fd_error = 0.0;
  std::vector<double> steps;
  // Relative error of each unextrapolated difference.
  std::vector<double> step_errors;
  // step_errors decrease along the ladder.
  bool monotone = false;
  int cutoff = 0;
};

struct TraceIdentityReport : DerivativeReport {
  // Tr((P^{-1}V)^n) on the box alone; oracle adds the tail when enabled.
  cplx box_trace;
};

struct TraceIdentityOptions {
  GateauxOptions fd;
  bool tail_correction = true;
};

// (-1)^{n-1}/(n-1)! d^n/dz^n log det(P + zV) at 0 against Tr((P^{-1}V)^n),
// for n > [d/2].
TraceIdentityReport trace_identity_check(const LogDetFunction& logdet, const PerturbationField& V,
                                         const ModeBasis& basis, int n,
                                         const TraceIdentityOptions& options = {});
TraceIdentityReport trace_identity_check(const PerturbationField& V, const ModeBasis& basis, int n,
                                         const TraceIdentityOptions& options = {});

struct DisjointSupportReport : DerivativeReport {
  bool support_disjoint = false;
};

// D^2 log det(P + base; V_1, V_2) against -Tr((P + base)^{-1} V_1 (P + base)^{-1} V_2).
DisjointSupportReport disjoint_support_check(const LogDetFunction& logdet, const PerturbationField& base,
                                             const DirectionSet& dirs, const ModeBasis& basis,
                                             const GateauxOptions& options = {});
DisjointSupportReport disjoint_support_check(const PerturbationField& base, const DirectionSet& dirs,
                                             const ModeBasis& basis, const GateauxOptions& options = {});

// --- Product representation and growth ------------------------------------

struct WeierstrassReport {
  cplx product_log;
  cplx gk_log;
  double relative_error = 0.0;
  std::size_t zeros = 0;
  int factor_order = 0;
  // Condition number of the eigenvector matrix of Delta^{-1} V.
  double eigenvector_condition = 1.0;
  bool degraded = false;
};

// prod_n E_{p-1}(1/lambda_n) over lambda_n = -1/mu_n, mu_n the nonzero
// eigenvalues of Delta^{-1} V, against gk_det(p, Delta^{-1} V).
WeierstrassReport weierstrass_representation_check(const PerturbationField& V, const ModeBasis& basis,
                                                   int p);

struct GrowthReport {
  OrderEstimate estimate;
  double lower_bound = 0.0;
  double upper_bound = 0.0;
  bool within_window = false;
  std::vector<double> angles;
  std::vector<double> radii;
};

// Order of z -> det_p(Id + z Delta^{-1} V) on the truncation, with the
// window [ [d/2] + 1, [d/2] + 1 ] the product representation predicts.
GrowthReport growth_bound_check(const PerturbationField& V, const ModeBasis& basis, int p);

}  // namespace specdet
