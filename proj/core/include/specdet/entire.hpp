// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <functional>
#include <vector>

#include "specdet/geometry.hpp"

namespace specdet {

// Divisor of an entire function.  Zeros are stored with multiplicity as
// repeated entries, sorted by nondecreasing modulus; the zero at the origin
// is carried separately as origin_order.  complete marks a finite divisor
// whose stored list is exhaustive.
struct ZeroSequence {
  std::vector<cplx> zeros;
  int origin_order = 0;
  bool complete = false;

  static ZeroSequence make(std::vector<cplx> zeros, int origin_order = 0, bool complete = false);
  void validate() const;
};

// f(z) = z^m exp(P(z)) prod_n E_p(z / a_n).  exponent_poly holds the
// ascending coefficients of P.
struct HadamardData {
  ZeroSequence zeros;
  int factor_order = 0;
  std::vector<cplx> exponent_poly;
};

struct HadamardValue {
  cplx value;
  cplx log_value;
  // Bound on |log f| contributed by the zeros that were not stored.
  double tail_bound = 0.0;
};

struct ExponentEstimate {
  double value = 0.0;
  double uncertainty = 0.0;
};

struct OrderEstimate {
  double order = 0.0;
  double uncertainty = 0.0;
  double best_angle = 0.0;
  std::vector<double> per_ray;  // NaN for rays without usable growth data
  std::vector<double> radii_used;
};

// E_p(z) = (1 - z) exp(z + z^2/2 + ... + z^p/p).
cplx weierstrass_factor(int p, cplx z);
// log E_p(z); for |z| < 1/2 summed as -sum_{k>p} z^k / k.
cplx log_weierstrass_factor(int p, cplx z);

HadamardValue hadamard_eval(const HadamardData& data, cplx z, double tol);

// Convergence exponent from the slope of log n versus log |a_n|.
ExponentEstimate critical_exponent(const ZeroSequence& zeros);

// Order from log log|f| versus log r on the largest two decades of radii,
// maximized over rays.  The log variant takes log|f| directly so large
// values never overflow.
OrderEstimate estimate_order(const std::function<cplx(cplx)>& f,
                             const std::vector<double>& angles,
                             const std::vector<double>& radii);
OrderEstimate estimate_order_log(const std::function<double(cplx)>& log_abs_f,
                                 const std::vector<double>& angles,
                                 const std::vector<double>& radii);

std::vector<double> geometric_grid(double first, double last, int count);

}  // namespace specdet
