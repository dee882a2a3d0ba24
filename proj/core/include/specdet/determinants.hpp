// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "specdet/geometry.hpp"
#include "specdet/operators.hpp"
#include "specdet/perturbation.hpp"

namespace specdet {

enum class Method {
  fredholm,
  gk_product,
  gk_rp,
  gk_trace_series,
  zeta_mellin,
  zeta_monodromy,
  lattice_lu,
  renormalized,
};

const char* to_string(Method m);

// error bounds |log_value - exact|, which is also the relative error of
// value to first order.
struct DetResult {
  cplx value{1.0, 0.0};
  cplx log_value{0.0, 0.0};
  Method method = Method::fredholm;
  double error = 0.0;
  int cutoff = 0;
  bool is_zero = false;
  std::map<std::string, double> params;
  std::vector<std::string> tags;

  static DetResult from_log(cplx log_value, Method method, double error = 0.0, int cutoff = 0);
};

// --- Fredholm and Gohberg-Krein determinants -------------------------------

// det_F(Id + K) = prod (1 + lambda_k(K)).
DetResult fredholm_det(const Eigen::MatrixXcd& K);
DetResult fredholm_det_from_spectrum(const std::vector<cplx>& mu);
// Same determinant through an LU factorization of Id + K.
DetResult fredholm_det_lu(const Eigen::MatrixXcd& K);

// R_p(A) = (Id + A) exp(sum_{n=1}^{p-1} (-1)^n A^n / n) - Id.
Eigen::MatrixXcd rp_transform(int p, const Eigen::MatrixXcd& A);

struct GkOptions {
  // The R_p route needs a dense matrix exponential; above this dimension
  // only the product route runs.
  Eigen::Index cross_check_max_dim = 1200;
  double route_tolerance = 1e-8;
};

// det_p(Id + A) = prod_k E_{p-1}(-lambda_k(A)).
DetResult gk_det(int p, const Eigen::MatrixXcd& A, const GkOptions& options = {});
DetResult gk_det_from_spectrum(int p, const std::vector<cplx>& mu);
// det_F(Id + R_p(A)).
DetResult gk_det_rp(int p, const Eigen::MatrixXcd& A);

// log det_p(Id + A) = sum_{n>=p} (-1)^{n+1} Tr(A^n) / n.
cplx gk_log_trace_series(int p, const Eigen::MatrixXcd& A, double tol);

// --- Closed-walk traces ----------------------------------------------------

// Tr((G V)^k) with G = diag g(n) on the modes max_i |n_i| <= box: the trace
// of the k-th power of the box-truncated matrix, summed as closed walks
// n_0 -> n_1 -> ... -> n_0 with steps in the support of Vhat.  With
// inner >= 0 only walks that leave the inner box are kept, which is the
// difference of the traces on the two boxes without cancellation.
using ModeWeight = std::function<cplx(const Mode&)>;
cplx walk_trace(const PerturbationField& V, const ModeWeight& g, int dim, int box, int k, int inner = -1);
// Number of walk prefixes walk_trace would visit, an upper bound.
double walk_trace_cost(const PerturbationField& V, int dim, int box, int k, int inner = -1);

// --- Heat traces and zeta determinants -------------------------------------

struct HeatTrace {
  cplx value;
  double truncation_bound = 0.0;
  bool flagged = false;
};

// Spectrum plus the geometric data the Mellin route needs.
struct SpectralData {
  std::vector<cplx> spectrum;
  int dim = 1;
  double length = 2 * pi;
  double cutoff_eigenvalue = 0.0;
  int cutoff = 0;

  static SpectralData of(const TruncatedOperator& op);
  static SpectralData of(const TruncatedOperator& op, std::vector<cplx> spectrum);
};

HeatTrace heat_trace(const TruncatedOperator& op, double t, double tol = 1e-12);
HeatTrace heat_trace(const SpectralData& data, double t, double tol = 1e-12);

struct ZetaConfig {
  double cut_angle = pi;
  // Lower end of the Mellin split; defaults to the bottom of the fit window.
  std::optional<double> split_point;
  int heat_coefficients = 10;
  std::optional<std::pair<double, double>> fit_window;
  int fit_points = 120;
  double fit_tolerance = 1e-8;
  bool estimate_error = true;
};

DetResult zeta_det_mellin(const TruncatedOperator& op, const ZetaConfig& cfg = {});
DetResult zeta_det_mellin(const SpectralData& data, const ZetaConfig& cfg = {});

// det_zeta(-d^2/dx^2 + m^2) on a circle of length L: 4 sinh^2(m L / 2).
double free_circle_zeta_det(double length, double mass);

// det_zeta(Delta + W) from the monodromy of -y'' + (m^2 + W) y = 0.
DetResult zeta_det_monodromy(const PerturbationField& W, double m, const Geometry& geometry,
                             double tol = 1e-12);

// --- Lattice ---------------------------------------------------------------

// Pivoted LDL^T log det of an SPD matrix.
double lattice_logdet(const Eigen::MatrixXd& M);
// Sparse variant with a fill reducing ordering, for the larger lattices.
double lattice_logdet(const Eigen::SparseMatrix<double>& M);

}  // namespace specdet
