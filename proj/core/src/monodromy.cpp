// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <array>
#include <boost/numeric/odeint.hpp>
#include <cmath>
#include <vector>

#include "specdet/determinants.hpp"
#include "specdet/error.hpp"

namespace specdet {

namespace {

using State = std::array<double, 4>;  // (y1, y1', y2, y2')

struct Term {
  double k;  // wavenumber times mode
  cplx c;
};

struct Rhs {
  double m2;
  std::vector<Term> terms;

  double W(double x) const {
    double s = 0;
    for (const auto& t : terms) s += (t.c * std::polar(1.0, t.k * x)).real();
    return s;
  }
  void operator()(const State& s, State& ds, double x) const {
    const double q = m2 + W(x);
    ds[0] = s[1];
    ds[1] = q * s[0];
    ds[2] = s[3];
    ds[3] = q * s[2];
  }
};

struct StepLimit {
  std::size_t steps = 0;
  void operator()(const State&, double) {
    if (++steps > 50'000'000) {
      throw Error(ErrorKind::solver_failure, "zeta_det_monodromy: ODE step-size underflow");
    }
  }
};

// Tr M - 2 for the period map of y'' = (m^2 + W) y.
double trace_minus_two(const Rhs& rhs, double length, double tol) {
  namespace odeint = boost::numeric::odeint;
  State s{1.0, 0.0, 0.0, 1.0};
  auto stepper = odeint::make_controlled(tol, tol, odeint::runge_kutta_fehlberg78<State>());
  odeint::integrate_adaptive(stepper, rhs, s, 0.0, length, length / 64, StepLimit{});
  return s[0] + s[3] - 2.0;
}

}  // namespace

DetResult zeta_det_monodromy(const PerturbationField& W, double m, const Geometry& geometry, double tol) {
  geometry.validate();
  if (geometry.kind != GeometryKind::circle) {
    throw Error(ErrorKind::invalid_argument, "zeta_det_monodromy: geometry must be a circle");
  }
  if (!W.is_real()) throw Error(ErrorKind::invalid_argument, "zeta_det_monodromy: W must be real");
  if (!(m > 0)) throw Error(ErrorKind::invalid_argument, "zeta_det_monodromy: mass must be > 0");

  Rhs rhs{m * m, {}};
  for (const auto& [n, c] : W.coefficients()) rhs.terms.push_back({geometry.wavenumber() * n[0], c});
  Rhs free{m * m, {}};

  // det(M - I) = 2 - Tr M for a unimodular period map, and the free value
  // 2 - 2 cosh(mL) = -4 sinh^2(mL/2) fixes the normalization.
  const double num = trace_minus_two(rhs, geometry.length, tol);
  const double den = trace_minus_two(free, geometry.length, tol);
  const double ratio = num / den;
  const double coarse = trace_minus_two(rhs, geometry.length, tol * 100) / den;

  const double free_det = free_circle_zeta_det(geometry.length, m);
  const cplx logv = ratio > 0 ? cplx(std::log(ratio * free_det), 0.0)
                              : cplx(std::log(-ratio * free_det), pi);
  DetResult r = DetResult::from_log(logv, Method::zeta_monodromy,
                                    std::abs(coarse - ratio) / std::abs(ratio) + 10 * tol);
  r.params["ratio"] = ratio;
  r.params["free_det"] = free_det;
  r.params["tolerance"] = tol;
  return r;
}

}  // namespace specdet
