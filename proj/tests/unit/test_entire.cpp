// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "specdet/entire.hpp"
#include "specdet/error.hpp"

using namespace specdet;

TEST(WeierstrassFactor, Identities) {
  for (int p = 0; p < 6; ++p) EXPECT_EQ(weierstrass_factor(p, 0.0), cplx(1.0));
  EXPECT_NEAR(std::abs(weierstrass_factor(0, 0.3) - 0.7), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(weierstrass_factor(1, 0.3) - 0.7 * std::exp(0.3)), 0.0, 1e-15);
  EXPECT_NEAR(weierstrass_factor(1, 0.3).real(), 0.9449012, 5e-8);
  EXPECT_EQ(weierstrass_factor(2, 1.0), cplx(0.0));
}

TEST(WeierstrassFactor, SmallArgumentBound) {
  // |E_p(z) - 1| <= |z|^{p+1} for |z| <= 1/2.
  for (int p = 0; p <= 4; ++p) {
    for (double r : {0.01, 0.1, 0.25, 0.4, 0.5}) {
      for (int k = 0; k < 24; ++k) {
        const cplx z = std::polar(r, 2 * pi * k / 24);
        EXPECT_LE(std::abs(weierstrass_factor(p, z) - 1.0), std::pow(r, p + 1) * (1 + 1e-12));
      }
    }
  }
}

TEST(WeierstrassFactor, SeriesAndDirectFormsAgree) {
  for (int p = 0; p <= 3; ++p) {
    for (double r : {0.45, 0.49}) {
      for (int k = 0; k < 12; ++k) {
        const cplx z = std::polar(r, 2 * pi * k / 12 + 0.1);
        cplx poly = 0, zk = 1;
        for (int j = 1; j <= p; ++j) {
          zk *= z;
          poly += zk / double(j);
        }
        const cplx direct = (1.0 - z) * std::exp(poly);
        EXPECT_LT(std::abs(weierstrass_factor(p, z) - direct), 1e-14);
      }
    }
  }
}

TEST(Hadamard, EmptyProductAtOrigin) {
  std::vector<cplx> z;
  for (int n = 1; n <= 50; ++n) z.push_back(double(n));
  HadamardData d{ZeroSequence::make(z), 1, {}};
  const auto v = hadamard_eval(d, 0.0, 1e-10);
  EXPECT_EQ(v.value, cplx(1.0));
}

TEST(Hadamard, VanishesAtZero) {
  HadamardData d{ZeroSequence::make({2.0}, 0, true), 0, {}};
  EXPECT_EQ(hadamard_eval(d, 2.0, 1e-12).value, cplx(0.0));
  EXPECT_NEAR(std::abs(hadamard_eval(d, 1.0, 1e-12).value - 0.5), 0.0, 1e-15);
}

TEST(Hadamard, MatchesBruteForcePartialProduct) {
  // zeros n^2, p = 1, z = -1: the 10^6 term partial product is the oracle.
  std::vector<cplx> z;
  for (int n = 1; n <= 20000; ++n) z.push_back(double(n) * n);
  HadamardData d{ZeroSequence::make(z), 1, {}};
  const auto v = hadamard_eval(d, -1.0, 1e-8);
  long double logp = 0;
  for (long n = 1; n <= 1000000; ++n) {
    const long double w = -1.0L / ((long double)n * n);
    logp += std::log1p(-w) + w;
  }
  EXPECT_NEAR(v.value.real(), std::exp((double)logp), 1e-8);
  EXPECT_LT(v.tail_bound, 1e-8);
  // sinh(pi)/pi * exp(-pi^2/6) in closed form.
  EXPECT_NEAR(v.value.real(), std::sinh(pi) / pi * std::exp(-pi * pi / 6), 1e-8);
}

TEST(Hadamard, TailTooLargeIsReported) {
  std::vector<cplx> z;
  for (int n = 1; n <= 20; ++n) z.push_back(double(n));
  HadamardData d{ZeroSequence::make(z), 1, {}};
  EXPECT_THROW(hadamard_eval(d, 3.0, 1e-12), Error);
}

TEST(Hadamard, RaisingFactorOrderAbsorbedIntoExponent) {
  // E_{p+1}(w) = E_p(w) exp(w^{p+1}/(p+1)): with P' = P - z^{p+1} S / (p+1),
  // S = sum a_n^{-(p+1)}, both representations describe the same function.
  std::vector<cplx> z;
  for (int n = 1; n <= 400; ++n) z.push_back(cplx(n * 1.0, 0.3 * n));
  const auto zs = ZeroSequence::make(z, 0, true);
  for (int p = 0; p <= 2; ++p) {
    cplx S = 0;
    for (const auto& a : zs.zeros) S += std::pow(a, -(p + 1));
    HadamardData lo{zs, p, {0.1, 0.2}};
    HadamardData hi{zs, p + 1, {0.1, 0.2}};
    hi.exponent_poly.resize(p + 2, 0.0);
    hi.exponent_poly[p + 1] -= S / double(p + 1);
    for (cplx w : {cplx(0.7, 0.2), cplx(-2.5, 1.0), cplx(4.0, -3.0)}) {
      const auto a = hadamard_eval(lo, w, 1e-10);
      const auto b = hadamard_eval(hi, w, 1e-10);
      EXPECT_LT(std::abs(a.value - b.value), 1e-10 * std::abs(a.value)) << "p=" << p;
    }
  }
}

TEST(CriticalExponent, PowerSequences) {
  for (int k = 1; k <= 3; ++k) {
    std::vector<cplx> z;
    for (int n = 1; n <= 2000; ++n) z.push_back(std::pow(double(n), k));
    const auto e = critical_exponent(ZeroSequence::make(z));
    EXPECT_NEAR(e.value, 1.0 / k, 0.05) << "k=" << k;
    EXPECT_LT(std::abs(e.value - 1.0 / k), e.uncertainty + 0.05);
  }
}

TEST(CriticalExponent, CircleLaplacianSpectrum) {
  std::vector<cplx> z;
  for (int n = -1000; n < 1000; ++n) z.push_back(double(n) * n + 1.0);
  const auto e = critical_exponent(ZeroSequence::make(z));
  EXPECT_NEAR(e.value, 0.5, 0.05);
}

TEST(CriticalExponent, NeedsEnoughZeros) {
  std::vector<cplx> z(50, 1.0);
  EXPECT_THROW(critical_exponent(ZeroSequence::make(z)), Error);
}

TEST(EstimateOrder, ExponentialFunctions) {
  const std::vector<double> rays{0.0, pi / 4, pi / 2, pi};
  const auto radii = geometric_grid(1.0, 500.0, 30);
  const auto e1 = estimate_order_log([](cplx z) { return z.real(); }, rays, radii);
  EXPECT_NEAR(e1.order, 1.0, 0.1);
  const auto e2 = estimate_order_log([](cplx z) { return (z * z).real(); }, rays, radii);
  EXPECT_NEAR(e2.order, 2.0, 0.1);
  const auto e3 = estimate_order([](cplx z) { return std::exp(z); }, rays, geometric_grid(0.5, 50.0, 30));
  EXPECT_NEAR(e3.order, 1.0, 0.1);
}

TEST(EstimateOrder, OverflowEverywhereIsAnError) {
  const std::vector<double> rays{0.0};
  EXPECT_THROW(estimate_order([](cplx z) { return std::exp(z * z); }, rays, geometric_grid(100.0, 1e4, 10)), Error);
}

TEST(EstimateOrder, PolynomialHasOrderNearZero) {
  const std::vector<double> rays{0.0, pi / 2, pi};
  const auto e = estimate_order([](cplx z) { return 1.0 + 0.5 * z; }, rays, geometric_grid(10.0, 1e6, 40));
  EXPECT_LT(e.order, 0.2);
}
