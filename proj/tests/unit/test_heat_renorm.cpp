// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <cmath>
#include <random>

#include "specdet/error.hpp"
#include "specdet/heat_renorm.hpp"

using namespace specdet;

namespace {

std::vector<double> log_grid(double a, double b, int n) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) g.push_back(a * std::pow(b / a, double(i) / (n - 1)));
  return g;
}

Geometry torus() { return Geometry::torus2(2 * pi, 1.0); }

// theta(t)^2 - pi / t for theta(t) = sum_n exp(-t n^2), through the Poisson
// dual below t = 3.
double theta_sq_minus_weyl(double t) {
  double s = 0;
  if (t < 3) {
    for (int k = -30; k <= 30; ++k) s += std::exp(-pi * pi * k * k / t);
    return pi / t * (s * s - 1);
  }
  for (int n = -60; n <= 60; ++n) s += std::exp(-t * n * n);
  return s * s - pi / t;
}

// log det_2(Id + c Delta^{-1}) on T^2 (L = 2 pi, m = 1), Richardson in the
// box size with the 1/N^2 tail.
double torus_log_det2_constant(double c) {
  auto at = [&](int N) {
    long double s = 0;
    for (double l : ModeBasis(torus(), N).free_eigenvalues()) {
      const double x = c / l;
      s += std::log1p(x) - x;
    }
    return double(s);
  };
  return (4 * at(400) - at(200)) / 3;
}

// Finite part of sum_n e^{-2 eps lambda_n}/lambda_n + pi log eps as eps -> 0:
// pi (-gamma - log 2) + int_0^inf e^{-t} (theta^2 - pi/t) dt.
double torus_green_trace_finite_part() {
  boost::math::quadrature::exp_sinh<double> q;
  const double C = q.integrate([](double t) { return std::exp(-t) * theta_sq_minus_weyl(t); });
  return pi * (-euler_gamma - std::log(2.0)) + C;
}

}  // namespace

TEST(BasisTerm, ParsesTags) {
  EXPECT_DOUBLE_EQ(BasisTerm::parse("eps^-1/2")(4.0), 0.5);
  EXPECT_DOUBLE_EQ(BasisTerm::parse("eps^-1")(4.0), 0.25);
  EXPECT_DOUBLE_EQ(BasisTerm::parse("eps")(3.0), 3.0);
  EXPECT_DOUBLE_EQ(BasisTerm::parse("const")(3.0), 1.0);
  EXPECT_DOUBLE_EQ(BasisTerm::parse("log_eps")(std::exp(2.0)), 2.0);
  EXPECT_NEAR(BasisTerm::parse("eps^3/2*log_eps")(4.0), 8.0 * std::log(4.0), 1e-14);
  EXPECT_TRUE(BasisTerm::parse("eps^-1/2").singular());
  EXPECT_TRUE(BasisTerm::parse("log_eps").singular());
  EXPECT_FALSE(BasisTerm::parse("eps*log_eps").singular());
  EXPECT_THROW(BasisTerm::parse("eps^1/3"), Error);
  EXPECT_THROW(BasisTerm::parse("delta"), Error);
}

TEST(RegularizedGreen, Examples) {
  const ModeBasis b(Geometry::circle(2 * pi, 1.0), 8);
  const auto g = regularized_green(b, 0.5);
  EXPECT_NEAR(g(*b.index_of({0, 0})), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(g(*b.index_of({0, 0})), 0.367879, 1e-6);
  EXPECT_LT(regularized_green(b, 800.0).maxCoeff(), 1e-300);
  EXPECT_THROW(regularized_green(b, 0.0), Error);
}

TEST(RegularizedGreen, TraceIsIntegratedHeatTrace) {
  // e^{-2 eps Delta} Delta^{-1} = int_{2 eps}^inf e^{-t Delta} dt.
  const ModeBasis b(torus(), 24);
  const auto data = SpectralData::of(free_laplace(b));
  for (double eps : {0.01, 0.1, 0.5}) {
    boost::math::quadrature::exp_sinh<double> q;
    const double integral = q.integrate(
        [&](double s) { return heat_trace(data, 2 * eps + s, 1e-15).value.real(); });
    EXPECT_NEAR(regularized_green(b, eps).sum(), integral, 1e-10 * integral) << "eps=" << eps;
  }
}

TEST(CountertermExtract, ExactBasisMembers) {
  std::map<double, cplx> constant, logs;
  for (double e : log_grid(1e-3, 1e-1, 12)) {
    constant[e] = 2.5;
    logs[e] = std::log(e);
  }
  const auto fc = counterterm_extract(constant);
  EXPECT_NEAR(fc.coefficient("const"), 2.5, 1e-12);
  for (const auto& t : default_counterterm_basis()) {
    if (t != "const") EXPECT_EQ(fc.coefficient(t), 0.0) << t;
  }
  const auto fl = counterterm_extract(logs);
  EXPECT_NEAR(fl.coefficient("log_eps"), 1.0, 1e-10);
  for (const auto& t : default_counterterm_basis()) {
    if (t != "log_eps") EXPECT_NEAR(fl.coefficient(t), 0.0, 1e-10) << t;
  }
  EXPECT_LT(fl.residual, 1e-12);
}

TEST(CountertermExtract, NoisyDataWithKnownSigma) {
  std::mt19937_64 rng(8);
  std::normal_distribution<double> noise(0.0, 1e-6);
  std::map<double, cplx> s;
  const auto grid = log_grid(1e-3, 1e-1, 20);
  for (double e : grid) s[e] = -2.0 * std::log(e) + 1.0 + 0.3 * e + noise(rng);
  FitOptions o;
  o.sigma.assign(grid.size(), 1e-6);
  const auto f = counterterm_extract(s, o);
  EXPECT_NEAR(f.coefficient("log_eps"), -2.0, 3 * f.standard_error("log_eps") + 1e-12);
  EXPECT_NEAR(f.coefficient("const"), 1.0, 3 * f.standard_error("const") + 1e-12);
  EXPECT_EQ(f.coefficient("eps^-1"), 0.0);
  EXPECT_EQ(f.coefficient("eps^-1/2"), 0.0);
  EXPECT_GE(f.residual, 0.0);
}

TEST(CountertermExtract, RejectsBadGridsAndDesigns) {
  std::map<double, cplx> few, narrow, ok;
  for (double e : log_grid(1e-3, 1e-1, 6)) few[e] = 1.0;
  for (double e : log_grid(1e-2, 1e-1, 10)) narrow[e] = 1.0;
  for (double e : log_grid(1e-3, 1e-1, 10)) ok[e] = 1.0;
  EXPECT_THROW(counterterm_extract(few), Error);
  EXPECT_THROW(counterterm_extract(narrow), Error);
  FitOptions dup;
  dup.basis = {"const", "eps", "eps^1", "log_eps"};
  try {
    counterterm_extract(ok, dup);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::fit_failure);
    EXPECT_NE(std::string(e.what()).find("wider eps span"), std::string::npos);
  }
}

TEST(CountertermExtract, GreenTraceLogCoefficient) {
  // Tr(e^{-2 eps Delta} Delta^{-1} V) for V = c on T^2 at N = 64, default
  // basis: log eps coefficient -(4 pi)^{-1} int V.
  const ModeBasis b(torus(), 64);
  const auto V = PerturbationField::constant(2, 0.5);
  std::map<double, cplx> s;
  for (double e : log_grid(5e-4, 5e-2, 16)) s[e] = regularized_trace(V, e, b);
  const auto f = counterterm_extract(s);
  const double expected = -V.integral(torus()).real() / (4 * pi);
  EXPECT_NEAR(f.coefficient("log_eps"), expected, 0.01 * std::abs(expected));
}

TEST(RegularizedFredholm, ZeroFieldAndTailIndependence) {
  const Geometry g = torus();
  EXPECT_EQ(regularized_fredholm(PerturbationField(2), 0.1, ModeBasis(g, 4), g).value, cplx(1.0));
  const auto V = PerturbationField::cosine(2, {1, 0}, 1.0) + PerturbationField::cosine(2, {0, 1}, 1.0);
  const auto a = regularized_fredholm(V, 0.01, ModeBasis(g, 8), g);
  const auto b = regularized_fredholm(V, 0.01, ModeBasis(g, 16), g);
  RegularizedOptions raw;
  raw.tail_correction = false;
  const auto c = regularized_fredholm(V, 0.01, ModeBasis(g, 24), g, raw);
  EXPECT_LT(std::abs(a.log_value - b.log_value), 1e-12);
  EXPECT_LT(std::abs(b.log_value - c.log_value), 1e-12);
  // Without the correction the small box is visibly off.
  const auto d = regularized_fredholm(V, 0.01, ModeBasis(g, 8), g, raw);
  EXPECT_GT(std::abs(d.log_value - c.log_value), 1e-5);
  EXPECT_THROW(regularized_fredholm(V, 0.01, ModeBasis(Geometry::torus2(2 * pi, 2.0), 4), g), Error);
}

TEST(RenormalizedDet, OneDimensionalHasNoCounterterm) {
  const Geometry g = Geometry::circle(2 * pi, 1.0);
  const auto V = PerturbationField::constant(1, 0.3) + PerturbationField::cosine(1, {1, 0}, 0.5);
  RenormOptions o;
  o.eps_grid = log_grid(2e-4, 2e-2, 16);
  const auto r = renormalized_det(V, g, ModeBasis(g, 16), o);
  EXPECT_TRUE(r.counterterm.empty());
  // det_F(Id + Delta^{-1} V) at N = 1024 with the order-1 tail
  // 0.3 sum_{|n| > N} 1/(n^2 + 1) added in closed form.
  const ModeBasis big(g, 1024);
  double tail = 0;
  for (double l : big.free_eigenvalues()) tail += 1.0 / l;
  tail = pi / std::tanh(pi) - tail;
  const cplx exact = fredholm_det_lu(green_compose(free_laplace(big), V)).log_value + 0.3 * tail;
  EXPECT_NEAR(r.det.log_value.real(), exact.real(), 1e-6);
  EXPECT_EQ(r.det.method, Method::renormalized);
  EXPECT_EQ(r.det.tags.at(0), "renormalized");
}

TEST(RenormalizedDet, ConstantFieldOnTorus) {
  const Geometry g = torus();
  const double c = 0.5;
  RenormOptions o;
  o.eps_grid = log_grid(2e-4, 2e-2, 16);
  const auto r = renormalized_det(PerturbationField::constant(2, c), g, ModeBasis(g, 8), o);
  const double expected = -c * g.volume() / (4 * pi);
  EXPECT_NEAR(r.fit.coefficient("log_eps"), expected, 1e-6);
  ASSERT_EQ(r.counterterm.orders.count(1), 1u);
  EXPECT_NEAR(r.counterterm.orders.at(1).coefficient("log_eps") / r.counterterm.local_integral.at(1).real(),
              -1.0 / (4 * pi), 1e-7);
  const double oracle = torus_log_det2_constant(c) + c * torus_green_trace_finite_part();
  EXPECT_NEAR(r.det.log_value.real(), oracle, 1e-6);
  EXPECT_LT(r.det.params.at("richardson_gap"), 1e-5);
}

TEST(RenormalizedDet, SubtractedLogIsLinearAlongRays) {
  // log Rdet(zV) - log det_2(Id + z Delta^{-1} V) is linear in z.
  const Geometry g = torus();
  RenormOptions o;
  o.eps_grid = log_grid(2e-4, 2e-2, 12);
  std::vector<double> zs{0.25, 0.5, 0.75, 1.0}, q;
  for (double z : zs) {
    const double c = 0.5 * z;
    q.push_back(renormalized_det(PerturbationField::constant(2, c), g, ModeBasis(g, 8), o).det.log_value.real() -
                torus_log_det2_constant(c));
  }
  const double slope = (q[3] - q[0]) / (zs[3] - zs[0]);
  for (std::size_t i = 0; i < zs.size(); ++i) {
    EXPECT_NEAR(q[i], q[0] + slope * (zs[i] - zs[0]), 1e-4);
  }
  EXPECT_NEAR(slope, 0.5 * torus_green_trace_finite_part(), 1e-4);
}

TEST(RenormalizedDet, MeanZeroFieldNeedsNoCounterterm) {
  const Geometry g = torus();
  const ModeBasis b(g, 12);
  const auto V = PerturbationField::cosine(2, {1, 0}, 1.0) + PerturbationField::cosine(2, {0, 1}, 1.0);
  RenormOptions o;
  o.eps_grid = log_grid(1e-4, 1e-2, 16);
  const auto r1 = renormalized_det(V, g, b, o);
  EXPECT_LE(std::abs(r1.fit.coefficient("log_eps")), 3 * r1.fit.standard_error("log_eps") + 1e-12);
  // A second, disjoint log grid gives the same limit.
  o.eps_grid = log_grid(1.15e-4, 1.15e-2, 16);
  const auto r2 = renormalized_det(V, g, b, o);
  EXPECT_LT(std::abs(r1.det.log_value - r2.det.log_value), 1e-5 * std::abs(r1.det.log_value));
}

TEST(RenormalizedDet, LogCoefficientOnlySeesTheMean) {
  // V and V' = V + zero-mean field: same log eps coefficient.
  const Geometry g = torus();
  const ModeBasis b(g, 8);
  RenormOptions o;
  o.eps_grid = log_grid(2e-4, 2e-2, 12);
  const auto V = PerturbationField::constant(2, 0.3);
  const auto W = V + PerturbationField::cosine(2, {1, 1}, 0.4);
  const auto a = renormalized_det(V, g, b, o).fit;
  const auto c = renormalized_det(W, g, b, o).fit;
  const double se = std::hypot(a.standard_error("log_eps"), c.standard_error("log_eps"));
  EXPECT_LE(std::abs(a.coefficient("log_eps") - c.coefficient("log_eps")), 3 * se + 1e-9);
}

TEST(Richardson, EliminatesNamedTerms) {
  std::vector<double> e{1e-3, 2e-3, 4e-3}, f;
  for (double x : e) f.push_back(3.0 + 2.0 * x * std::log(x) - x);
  EXPECT_NEAR(richardson_to_zero(e, f, {"eps*log_eps", "eps"}), 3.0, 1e-12);
  EXPECT_THROW(richardson_to_zero({1e-3}, {1.0}, {"eps"}), Error);
}
