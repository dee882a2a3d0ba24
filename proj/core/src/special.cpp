// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include "specdet/special.hpp"

#include <cmath>
#include <limits>

#include "specdet/error.hpp"

namespace specdet {

double arg_cut(cplx z, double theta) {
  double a = std::arg(z);  // (-pi, pi]
  while (a > theta) a -= 2 * pi;
  while (a <= theta - 2 * pi) a += 2 * pi;
  return a;
}

cplx log_cut(cplx z, double theta) {
  return {std::log(std::abs(z)), arg_cut(z, theta)};
}

double angle_to_ray(cplx z, double theta) {
  const double a = arg_cut(z, theta);
  return std::min(theta - a, a - (theta - 2 * pi));
}

namespace {

cplx ein_series(cplx z) {
  cplx term = z;  // (-1)^{k+1} z^k / k!
  cplx sum = z;
  for (int k = 2; k < 2000; ++k) {
    term *= -z / double(k);
    const cplx add = term / double(k);
    sum += add;
    if (std::abs(add) <= 1e-17 * std::abs(sum)) break;
  }
  return sum;
}

// Modified Lentz evaluation of the continued fraction for E1, valid off the
// negative real axis.
cplx e1_continued_fraction(cplx z) {
  const double tiny = 1e-300;
  cplx b = z + 1.0;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  for (int i = 1; i < 20000; ++i) {
    const double an = -double(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const cplx del = c * d;
    h *= del;
    if (std::abs(del - 1.0) < 1e-16) return h * std::exp(-z);
  }
  throw Error(ErrorKind::solver_failure, "expint_e1: continued fraction did not converge");
}

bool use_series(cplx z) {
  const double r = std::abs(z);
  if (r <= 2.0) return true;
  if (z.real() > 0) return false;
  // Left half plane: the series has no cancellation near the negative axis.
  return std::abs(z.imag()) < 0.25 * r && r < 600;
}

}  // namespace

cplx ein(cplx z) {
  if (use_series(z)) return ein_series(z);
  return expint_e1(z) + euler_gamma + std::log(z);
}

cplx expint_e1(cplx z) {
  if (z == cplx(0.0)) return {std::numeric_limits<double>::infinity(), 0.0};
  if (use_series(z)) return -euler_gamma - std::log(z) + ein_series(z);
  return e1_continued_fraction(z);
}

cplx expint_e1_cut(cplx z, double theta) {
  return expint_e1(z) + std::log(z) - log_cut(z, theta);
}

}  // namespace specdet
