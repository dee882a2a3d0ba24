// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <boost/math/special_functions/zeta.hpp>
#include <cmath>

#include "specdet/determinants.hpp"
#include "specdet/error.hpp"
#include "specdet/special.hpp"

using namespace specdet;

namespace {

// log det_zeta(-d^2/dx^2 + m^2) on the circle of length 2 pi from the
// binomial expansion of sum_n (n^2 + m^2)^{-s} in Riemann zeta values,
// valid for m < 1.
double free_circle_logdet_series(long double m) {
  long double s = 2 * std::log(m) + 2 * std::log(2 * 3.14159265358979323846264338327950288L);
  long double mk = 1;
  for (int k = 1; k < 200; ++k) {
    mk *= m * m;
    const long double t = mk * boost::math::zeta<long double>(2.0L * k) / k;
    s -= 2 * ((k % 2) ? -t : t);
    if (t < 1e-22L) break;
  }
  return double(s);
}

// sum_n exp(-t (n^2 + m^2)) through the Poisson-dual theta series.
double free_circle_heat_poisson(double t, double m) {
  double s = 0;
  for (int k = -20; k <= 20; ++k) s += std::exp(-pi * pi * k * k / t);
  return std::sqrt(pi / t) * s * std::exp(-t * m * m);
}

}  // namespace

TEST(Special, ExpIntegralKnownValues) {
  EXPECT_NEAR(expint_e1(1.0).real(), 0.21938393439552027, 1e-15);
  EXPECT_NEAR(expint_e1(10.0).real(), 4.156968929685324e-06, 1e-19);
  EXPECT_NEAR(expint_e1(0.01).real(), 4.037929576538114, 1e-13);
  // E1(-x) = -Ei(x) - i pi on the principal branch (upper side).
  const cplx v = expint_e1(cplx(-2.0, 0.0));
  EXPECT_NEAR(v.real(), -4.954234356001890, 1e-12);
  EXPECT_NEAR(std::abs(v.imag()), pi, 1e-12);
  // Series and continued fraction agree across the switch radius.
  for (int k = 0; k < 16; ++k) {
    const cplx z = std::polar(2.0, 2 * pi * k / 16 * 0.49);
    const cplx a = expint_e1(z);
    const cplx b = -euler_gamma - std::log(z) + ein(z);
    EXPECT_LT(std::abs(a - b), 1e-13);
  }
  const cplx w(3.0, 4.0);
  EXPECT_LT(std::abs(expint_e1(w) - (-euler_gamma - std::log(w) + ein(w))), 1e-12);
}

TEST(Special, CutLogarithm) {
  EXPECT_NEAR(arg_cut(cplx(-1.0, 1e-9), pi), pi, 1e-8);
  EXPECT_NEAR(arg_cut(cplx(-1.0, -1e-9), pi), -pi, 1e-8);
  EXPECT_NEAR(arg_cut(cplx(0.0, 1.0), pi / 4), -1.5 * pi, 1e-15);
  EXPECT_NEAR(angle_to_ray(cplx(1.0, 0.0), pi / 2), pi / 2, 1e-15);
  EXPECT_NEAR(angle_to_ray(cplx(-1.0, 0.0), pi), 0.0, 1e-15);
}

TEST(HeatTrace, ThetaFunctionOracle) {
  const ModeBasis b(Geometry::circle(2 * pi, 1.0), 64);
  const auto h = heat_trace(free_laplace(b), 1.0);
  EXPECT_NEAR(h.value.real(), free_circle_heat_poisson(1.0, 1.0), 1e-12);
  EXPECT_FALSE(h.flagged);
  EXPECT_LT(h.truncation_bound, 1e-12);
}

TEST(HeatTrace, LargeTimeGapDominance) {
  const ModeBasis b(Geometry::circle(2 * pi, 1.0), 16);
  const double t = 30.0;
  const auto h = heat_trace(free_laplace(b), t);
  EXPECT_NEAR(h.value.real() / std::exp(-t), 1.0, 1e-12);
}

TEST(HeatTrace, SmallTimeWeylTerm) {
  const double m = 0.7;
  const ModeBasis b(Geometry::circle(2 * pi, m), 512);
  const auto op = free_laplace(b);
  for (double t : {0.02, 0.005, 0.001}) {
    const auto h = heat_trace(op, t);
    EXPECT_NEAR(std::sqrt(t) * std::exp(t * m * m) * h.value.real(), std::sqrt(pi), 1e-10);
  }
  // Too small for the truncation: flagged, not fatal.
  EXPECT_TRUE(heat_trace(op, 1e-5).flagged);
}

TEST(ZetaMellin, FreeCircleClosedForm) {
  const double m = 0.5;
  const Geometry geo = Geometry::circle(2 * pi, m);
  const auto r = zeta_det_mellin(free_laplace(ModeBasis(geo, 512)));
  const double closed = free_circle_zeta_det(2 * pi, m);
  EXPECT_NEAR(closed, 21.1839, 1e-4);
  EXPECT_NEAR(free_circle_logdet_series(m), std::log(closed), 1e-13);
  EXPECT_LT(std::abs(r.value.real() - closed) / closed, 1e-6);
  EXPECT_LT(std::abs(r.log_value.real() - std::log(closed)), r.error + 1e-12);
  EXPECT_LT(r.error, 1e-6);
  EXPECT_EQ(r.method, Method::zeta_mellin);
  EXPECT_EQ(r.cutoff, 512);
  // Leading heat coefficient of t^{1/2} H(t) is L / sqrt(4 pi).
  EXPECT_NEAR(r.params.at("a0"), std::sqrt(pi), 1e-8);
}

TEST(ZetaMellin, SplitPointIndependence) {
  const Geometry geo = Geometry::circle(2 * pi, 0.8);
  const auto op = build_laplace(geo, PerturbationField::cosine(1, {1, 0}, 0.6), ModeBasis(geo, 256));
  const auto data = SpectralData::of(op);
  const auto a = zeta_det_mellin(data);
  ZetaConfig cfg;
  cfg.split_point = 2 * a.params.at("t_min");
  const auto b = zeta_det_mellin(data, cfg);
  EXPECT_LT(std::abs(a.log_value - b.log_value), 1e-10);
}

TEST(ZetaMellin, CutIndependenceForComplexSpectrum) {
  const Geometry geo = Geometry::circle(2 * pi, 1.0);
  const auto V = PerturbationField::cosine(1, {1, 0}, 1.0).scaled(cplx(0.3, 0.2)) +
                 PerturbationField::sine(1, {2, 0}, 0.1).scaled(cplx(0.0, 1.0));
  const auto op = build_laplace(geo, V, ModeBasis(geo, 128));
  ASSERT_FALSE(op.hermitian());
  const auto data = SpectralData::of(op);
  std::vector<cplx> logs;
  for (double theta : {pi / 2, pi, 1.5 * pi}) {
    ZetaConfig cfg;
    cfg.cut_angle = theta;
    logs.push_back(zeta_det_mellin(data, cfg).log_value);
  }
  EXPECT_LT(std::abs(std::exp(logs[0] - logs[1]) - 1.0), 1e-8);
  EXPECT_LT(std::abs(std::exp(logs[2] - logs[1]) - 1.0), 1e-8);
}

TEST(ZetaMellin, SpectralShiftMatchesResolventTrace) {
  // d/dc log det(Delta + c) = sum 1/lambda in d = 1, with the tail beyond N
  // summed as 2/(k^2 N) + O(N^-2) by Euler-Maclaurin.
  const double m = 1.0, c = 1e-3;
  const Geometry geo = Geometry::circle(2 * pi, m);
  const int N = 256;
  const ModeBasis b(geo, N);
  const auto up = zeta_det_mellin(build_laplace(geo, PerturbationField::constant(1, c), b));
  const auto dn = zeta_det_mellin(build_laplace(geo, PerturbationField::constant(1, -c), b));
  const double fd = (up.log_value - dn.log_value).real() / (2 * c);
  double s = 0;
  for (double l : b.free_eigenvalues()) s += 1.0 / l;
  s += 2.0 / (N + 0.5);
  EXPECT_NEAR(fd, s, 1e-4 * s);
  EXPECT_NEAR(fd, pi / std::tanh(pi * m) / m, 1e-4 * s);
}

TEST(ZetaMellin, RejectsEigenvalueOnCut) {
  const Geometry geo = Geometry::circle(2 * pi, 1.0);
  // Delta - 2.5: the constant mode has eigenvalue -1.5 on the negative axis.
  const auto op = build_laplace(geo, PerturbationField::constant(1, -2.5), ModeBasis(geo, 64));
  try {
    zeta_det_mellin(op);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::cut_violation);
    EXPECT_NE(std::string(e.what()).find("-1.5"), std::string::npos);
  }
  ZetaConfig cfg;
  cfg.cut_angle = pi / 2;
  const auto r = zeta_det_mellin(op, cfg);
  // One negative eigenvalue: det = -|det| on this branch.
  EXPECT_LT(r.value.real(), 0.0);
}

TEST(ZetaMellin, PoorFitWindowIsReported) {
  const Geometry geo = Geometry::circle(2 * pi, 1.0);
  ZetaConfig cfg;
  cfg.fit_window = std::make_pair(0.5, 4.0);
  cfg.heat_coefficients = 3;
  try {
    zeta_det_mellin(free_laplace(ModeBasis(geo, 64)), cfg);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::fit_failure);
    EXPECT_NE(std::string(e.what()).find("increase N or shrink fit window"), std::string::npos);
  }
}

TEST(Monodromy, FreeAndConstantPotentials) {
  const Geometry geo = Geometry::circle(2 * pi, 1.0);
  const double m = 0.8;
  const auto r0 = zeta_det_monodromy(PerturbationField(1), m, geo);
  EXPECT_NEAR(r0.params.at("ratio"), 1.0, 1e-12);
  EXPECT_NEAR(r0.value.real(), free_circle_zeta_det(2 * pi, m), 1e-9 * r0.value.real());
  const double c = 0.6;
  const auto rc = zeta_det_monodromy(PerturbationField::constant(1, c), m, geo);
  const double s1 = std::sinh(pi * std::sqrt(m * m + c)), s0 = std::sinh(pi * m);
  EXPECT_NEAR(rc.params.at("ratio"), s1 * s1 / (s0 * s0), 1e-10 * s1 * s1 / (s0 * s0));
}

TEST(Monodromy, AgreesWithMellinRatio) {
  const double m = 1.0;
  const Geometry geo = Geometry::circle(2 * pi, m);
  const auto V = PerturbationField::cosine(1, {1, 0}, 1.0);
  const ModeBasis b(geo, 512);
  const auto num = zeta_det_mellin(build_laplace(geo, V, b));
  const auto den = zeta_det_mellin(free_laplace(b));
  const double mellin_ratio = std::exp((num.log_value - den.log_value).real());
  const auto mono = zeta_det_monodromy(V, m, geo);
  EXPECT_NEAR(mellin_ratio / mono.params.at("ratio"), 1.0, 1e-5);
}
