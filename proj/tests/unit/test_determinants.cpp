// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "specdet/determinants.hpp"
#include "specdet/error.hpp"
#include "specdet/linalg.hpp"

using namespace specdet;

namespace {

Eigen::MatrixXcd random_matrix(int n, double radius, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(g(rng), g(rng));
  double rho = 0;
  for (const auto& l : linalg::eigvals_general(A)) rho = std::max(rho, std::abs(l));
  return A * (radius / rho);
}

double rel(cplx a, cplx b) { return std::abs(a - b) / std::abs(b); }

}  // namespace

TEST(Fredholm, Examples) {
  EXPECT_EQ(fredholm_det(Eigen::MatrixXcd::Zero(4, 4)).value, cplx(1.0));
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(2, 2);
  K(0, 0) = 0.5;
  K(1, 1) = -0.25;
  EXPECT_NEAR(std::abs(fredholm_det(K).value - 1.125), 0.0, 1e-15);
}

TEST(Fredholm, MatchesTraceSeries) {
  const auto K = random_matrix(8, 0.45, 11);
  cplx s = 0;
  Eigen::MatrixXcd P = K;
  for (int m = 1; m <= 60; ++m) {
    s += (m % 2 ? 1.0 : -1.0) * P.trace() / double(m);
    P = P * K;
  }
  EXPECT_LT(rel(fredholm_det(K).value, std::exp(s)), 1e-10);
  EXPECT_LT(rel(fredholm_det_lu(K).value, std::exp(s)), 1e-10);
}

TEST(Fredholm, ZeroFactorIsFlagged) {
  Eigen::MatrixXcd K = Eigen::MatrixXcd::Zero(3, 3);
  K(1, 1) = -1.0;
  const auto r = fredholm_det(K);
  EXPECT_TRUE(r.is_zero);
  EXPECT_TRUE(std::isinf(r.log_value.real()));
}

TEST(Fredholm, Multiplicativity) {
  for (int t = 0; t < 10; ++t) {
    const auto A = random_matrix(9, 0.3, 100 + t);
    const auto B = random_matrix(9, 0.3, 200 + t);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(9, 9);
    const auto AB = fredholm_det((I + A) * (I + B) - I).value;
    EXPECT_LT(rel(AB, fredholm_det(A).value * fredholm_det(B).value), 1e-10);
  }
}

TEST(RpTransform, Examples) {
  EXPECT_EQ(rp_transform(2, Eigen::MatrixXcd::Zero(3, 3)).cwiseAbs().maxCoeff(), 0.0);
  Eigen::MatrixXcd A = Eigen::MatrixXcd::Zero(2, 2);
  A(0, 0) = 0.5;
  A(1, 1) = -0.2;
  const auto R = rp_transform(2, A);
  EXPECT_NEAR(R(0, 0).real(), 1.5 * std::exp(-0.5) - 1, 1e-15);
  EXPECT_NEAR(R(0, 0).real(), -0.0902040, 5e-8);
  EXPECT_NEAR(R(1, 1).real(), 0.8 * std::exp(0.2) - 1, 1e-15);
  EXPECT_THROW(rp_transform(1, A), Error);
}

TEST(GkDet, Examples) {
  Eigen::MatrixXcd A(1, 1);
  A(0, 0) = 0.5;
  EXPECT_NEAR(std::abs(gk_det(2, A).value - 1.5 * std::exp(-0.5)), 0.0, 1e-15);
  EXPECT_NEAR(gk_det(2, A).value.real(), 0.9097959, 1e-7);
  Eigen::MatrixXcd Nil = Eigen::MatrixXcd::Zero(5, 5);
  for (int i = 0; i < 4; ++i) Nil(i, i + 1) = cplx(1.0 + i, -0.5 * i);
  for (int p = 1; p <= 4; ++p) EXPECT_NEAR(std::abs(gk_det(p, Nil).value - 1.0), 0.0, 1e-12);
}

TEST(GkDet, RegularizedIdentity) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> g;
  for (int t = 0; t < 20; ++t) {
    Eigen::MatrixXcd A(10, 10);
    for (int i = 0; i < 10; ++i)
      for (int j = 0; j < 10; ++j) A(i, j) = 0.15 * cplx(g(rng), g(rng));
    const auto d2 = gk_det(2, A).value;
    const auto dF = fredholm_det(A).value * std::exp(-A.trace());
    EXPECT_LT(rel(d2, dF), 1e-12);
  }
}

TEST(GkDet, RoutesAgreeOnContractions) {
  for (int t = 0; t < 10; ++t) {
    const auto A = random_matrix(12, 0.8, 300 + t);
    for (int p = 1; p <= 4; ++p) {
      const auto prod = gk_det_from_spectrum(p, linalg::eigvals_general(A));
      const cplx series = std::exp(gk_log_trace_series(p, A, 1e-15));
      EXPECT_LT(rel(prod.value, series), 1e-8);
      if (p >= 2) EXPECT_LT(rel(prod.value, gk_det_rp(p, A).value), 1e-8);
    }
  }
}

TEST(GkDet, CrossCheckRecordsRoute) {
  const auto A = random_matrix(6, 0.5, 9);
  const auto r = gk_det(3, A);
  EXPECT_EQ(r.method, Method::gk_product);
  ASSERT_FALSE(r.tags.empty());
  EXPECT_EQ(r.tags[0], "cross_checked:gk_rp");
  EXPECT_LT(r.params.at("route_disagreement"), 1e-8);
}

TEST(GkDet, TraceSeriesExamplesAndDomain) {
  EXPECT_EQ(gk_log_trace_series(2, Eigen::MatrixXcd::Zero(3, 3), 1e-14), cplx(0.0));
  Eigen::MatrixXcd A(1, 1);
  A(0, 0) = 0.3;
  EXPECT_NEAR(std::abs(gk_log_trace_series(1, A, 1e-16) - std::log(1.3)), 0.0, 1e-15);
  A(0, 0) = 1.2;
  try {
    gk_log_trace_series(2, A, 1e-12);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("use product route"), std::string::npos);
  }
}

TEST(GkDet, VanishingOrderEqualsKernelMultiplicity) {
  // A has eigenvalue -1 with multiplicity 2; z -> det_p(Id + zA) has a double
  // zero at z = 1.
  std::mt19937_64 rng(3);
  std::normal_distribution<double> g;
  Eigen::MatrixXcd S(6, 6);
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) S(i, j) = cplx(g(rng), g(rng));
  Eigen::VectorXcd d(6);
  d << -1.0, -1.0, 0.3, cplx(0.2, 0.1), -0.4, 0.1;
  const Eigen::MatrixXcd A = S * d.asDiagonal() * S.inverse();
  for (int p = 1; p <= 3; ++p) {
    std::vector<double> x, y;
    for (double r : {1e-2, 5e-3, 2.5e-3, 1.25e-3}) {
      const auto v = gk_det_from_spectrum(p, linalg::eigvals_general((1.0 + r) * A));
      x.push_back(std::log(r));
      y.push_back(v.log_value.real());
    }
    const double slope = (y.back() - y.front()) / (x.back() - x.front());
    EXPECT_NEAR(slope, 2.0, 0.05) << "p=" << p;
  }
}

TEST(LatticeLogdet, Examples) {
  EXPECT_EQ(lattice_logdet(Eigen::MatrixXd::Identity(5, 5)), 0.0);
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(2, 2);
  D(0, 0) = 2;
  D(1, 1) = 3;
  EXPECT_NEAR(lattice_logdet(D), std::log(6.0), 1e-15);
  std::mt19937_64 rng(1);
  std::normal_distribution<double> g;
  Eigen::MatrixXd B(64, 64);
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) B(i, j) = g(rng);
  const Eigen::MatrixXd M = B * B.transpose() + 64 * Eigen::MatrixXd::Identity(64, 64);
  double ref = 0;
  for (double w : linalg::eigvals_symmetric(M)) ref += std::log(w);
  EXPECT_NEAR(lattice_logdet(M), ref, 1e-9);
  EXPECT_NEAR(lattice_logdet(Eigen::SparseMatrix<double>(M.sparseView())), ref, 1e-9);
}

TEST(LatticeLogdet, RejectsIndefinite) {
  Eigen::MatrixXd M = Eigen::MatrixXd::Identity(3, 3);
  M(2, 2) = -1;
  try {
    lattice_logdet(M);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::not_invertible);
    EXPECT_NE(std::string(e.what()).find("pivot"), std::string::npos);
  }
}

TEST(DetResult, LogAndValueAreConsistent) {
  const auto A = random_matrix(7, 0.9, 77);
  for (const auto& r : {fredholm_det(A), gk_det(2, A), gk_det_rp(3, A)}) {
    EXPECT_LT(std::abs(std::exp(r.log_value) - r.value), 1e-12 * std::abs(r.value));
    EXPECT_GE(r.error, 0.0);
  }
}
