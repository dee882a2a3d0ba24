// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <vector>

#include "specdet/determinants.hpp"
#include "specdet/geometry.hpp"
#include "specdet/heat_renorm.hpp"
#include "specdet/perturbation.hpp"

namespace specdet {

// One draw of the Gaussian free field phi = sum_n c_n lambda_n^{-1/2} e_n
// with e_n = e^{i k n.x} / sqrt(vol).  c_0 is standard normal, c_n =
// (a + ib) / sqrt(2) for the representative of each pair {n, -n} and
// c_{-n} = conj(c_n).
struct GFFSample {
  std::vector<cplx> coefficients;  // c_n in basis order
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  const ModeBasis* basis = nullptr;

  // phi_hat(n) = c_n / sqrt(lambda_n).
  std::vector<cplx> field() const;
};

// Stream `stream` of the counter based generator keyed by seed.  The
// referenced basis must outlive the sample.
GFFSample sample_gff(const ModeBasis& basis, std::uint64_t seed, std::uint64_t stream = 0);

// Coefficients of e^{-eps Delta} phi.
std::vector<cplx> smear(const GFFSample& phi, double eps);

// int conj(phi) V phi dv = sum_{a,b} conj(phi_hat(a)) Vhat(a - b) phi_hat(b)
// over the box, with the convolution held as a sparse shift table.
class QuadraticForm {
 public:
  QuadraticForm(const PerturbationField& V, const ModeBasis& basis);
  cplx operator()(const std::vector<cplx>& phi_hat) const;

 private:
  std::vector<cplx> values_;
  // shifted_[q][a]: index of a - q, or -1 outside the box.
  std::vector<std::vector<int>> shifted_;
};

cplx quadratic_energy(const std::vector<cplx>& phi_hat, const PerturbationField& V, const ModeBasis& basis);

struct MCEstimate {
  double mean = 0.0;
  // Sample standard deviation / sqrt(samples).
  double std_error = 0.0;
  std::size_t samples = 0;
  std::uint64_t seed = 0;
};

struct PartitionResult {
  MCEstimate estimate;
  // log det_F(Id + T) (plain) or log det_2(Id + T) (renormalized) for
  // T = e^{-eps Delta} Delta^{-1} e^{-eps Delta} V.
  DetResult reference;
  // exp(-reference.log_value / 2).
  double reference_value = 1.0;
  double deviation_sigmas = 0.0;
  bool pass = false;
  double epsilon = 0.0;
  // Smallest eigenvalue of T; the integrand needs > -1.
  double min_eigenvalue = 0.0;
  // Counterterm E[energy] / 2 removed per sample (renormalized only).
  double counterterm = 0.0;
};

// E[exp(-energy(phi_eps) / 2)] over samples drawn from streams 0..K-1,
// against det_F(Id + T)^{-1/2}.  V must be real; rejects fields with an
// eigenvalue of T at or below -1 + 0.05.
PartitionResult mc_partition(const PerturbationField& V, double eps, std::size_t samples, std::uint64_t seed,
                             const ModeBasis& basis);
// d = 2: E[exp(-(energy - E[energy]) / 2)] against det_2(Id + T)^{-1/2}.
PartitionResult mc_partition_renormalized(const PerturbationField& V, double eps, std::size_t samples,
                                          std::uint64_t seed, const ModeBasis& basis);

struct GffScanRow {
  double eps = 0.0;
  MCEstimate plain;
  MCEstimate renormalized;
  double plain_log_mean = 0.0;
  double renormalized_log_mean = 0.0;
};

struct GffEpsScan {
  std::vector<GffScanRow> rows;
  AsymptoticFit plain_fit;
  AsymptoticFit renormalized_fit;
  // |log_eps coefficient| above three standard errors.
  bool plain_has_log = false;
  bool renormalized_has_log = false;
};

// Both log-means over an eps ladder with common random numbers: sample k
// uses stream k at every eps.  Fitted on {log_eps, const, eps*log_eps, eps}
// without elimination.
GffEpsScan gff_log_eps_scan(const PerturbationField& V, const std::vector<double>& eps, std::size_t samples,
                            std::uint64_t seed, const ModeBasis& basis);

struct DgffOptions {
  std::vector<int> sizes{16, 32, 64, 128};
  // Basis cutoff of the continuum zeta reference.
  int continuum_cutoff = 32;
  ZetaConfig zeta;
};

struct DgffRow {
  int size = 0;
  double mesh = 0.0;
  double log_ratio = 0.0;
  // Neville extrapolation in mesh^2 over the sizes up to this one.
  double extrapolated = 0.0;
  double error = 0.0;  // |log_ratio - continuum|
};

struct DgffResult {
  std::vector<DgffRow> rows;
  double extrapolated_log_ratio = 0.0;
  double continuum_log_ratio = 0.0;
  DetResult continuum;
  // |exp(extrapolated - continuum) - 1|.
  double relative_error = 0.0;
  // Raw errors decrease from the second size on.
  bool monotone = false;
};

// log det(Delta_h + m^2 + V) - log det(Delta_h + m^2) on n x n periodic
// lattices against log det_zeta(Delta + V) - log det_zeta(Delta).  V must
// have zero mean; m is the geometry's mass.
DgffResult dgff_ratio(const PerturbationField& V, const Geometry& geometry, const DgffOptions& options = {});

}  // namespace specdet
