// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <cmath>

#include "specdet/error.hpp"
#include "specdet/gff.hpp"
#include "specdet/rng.hpp"

using namespace specdet;

namespace {

Geometry circle() { return Geometry::circle(2 * pi, 1.0); }
Geometry torus() { return Geometry::torus2(2 * pi, 1.0); }

// phi(x) = sum_n phi_hat(n) e^{i k n.x} / sqrt(vol) on an n^d grid; int phi V
// phi by the trapezoid rule, exact for the trigonometric polynomials here.
double quadrature_energy(const std::vector<cplx>& phi, const PerturbationField& V, const ModeBasis& basis,
                         int grid) {
  const Geometry& g = basis.geometry();
  const double k = g.wavenumber();
  const double norm = 1 / std::sqrt(g.volume());
  const int d = g.dim();
  const double h = g.length / grid;
  double s = 0;
  for (int i = 0; i < grid; ++i) {
    for (int j = 0; j < (d == 1 ? 1 : grid); ++j) {
      const double x = i * h, y = j * h;
      cplx f = 0;
      for (std::size_t a = 0; a < basis.size(); ++a) {
        const Mode& m = basis.mode(a);
        f += phi[a] * std::polar(norm, k * (m[0] * x + m[1] * y));
      }
      s += std::norm(f) * V.evaluate(g, x, y).real();
    }
  }
  return s * std::pow(h, d);
}

double lattice_eigenvalue(int a1, int a2, int n, double m) {
  const double c = double(n) * n / (pi * pi);
  return c * (std::pow(std::sin(pi * a1 / n), 2) + std::pow(std::sin(pi * a2 / n), 2)) + m * m;
}

}  // namespace

TEST(SampleGff, DeterministicAndReal) {
  const ModeBasis basis(torus(), 6);
  const GFFSample a = sample_gff(basis, 11, 3);
  const GFFSample b = sample_gff(basis, 11, 3);
  const GFFSample c = sample_gff(basis, 11, 4);
  EXPECT_EQ(a.coefficients, b.coefficients);
  EXPECT_NE(a.coefficients, c.coefficients);
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const Mode& m = basis.mode(i);
    const auto j = *basis.index_of(Mode{-m[0], -m[1]});
    EXPECT_EQ(a.coefficients[j], std::conj(a.coefficients[i]));
  }
}

TEST(SampleGff, CovarianceIsTheGreenFunction) {
  const ModeBasis basis(circle(), 4);
  const int K = 10000;
  const auto i0 = *basis.index_of(Mode{0, 0});
  const auto i1 = *basis.index_of(Mode{1, 0});
  const auto i3 = *basis.index_of(Mode{3, 0});
  std::vector<double> p0, p1, p3, cross, c1;
  for (int k = 0; k < K; ++k) {
    const auto f = sample_gff(basis, 5, std::uint64_t(k)).field();
    p0.push_back(std::norm(f[i0]));
    p1.push_back(std::norm(f[i1]));
    p3.push_back(std::norm(f[i3]));
    cross.push_back((f[i1] * std::conj(f[i3])).real());
    c1.push_back(f[i1].real());
  }
  auto within = [](const std::vector<double>& x, double expected) {
    const SampleMoments m = sample_moments(x);
    return std::abs(m.mean - expected) <= 5 * m.std_error;
  };
  EXPECT_TRUE(within(p0, 1.0 / basis.free_eigenvalue(i0)));
  EXPECT_TRUE(within(p1, 1.0 / basis.free_eigenvalue(i1)));
  EXPECT_TRUE(within(p3, 1.0 / basis.free_eigenvalue(i3)));
  EXPECT_TRUE(within(cross, 0.0));
  EXPECT_TRUE(within(c1, 0.0));
}

TEST(Smear, DampsEveryMode) {
  const ModeBasis basis(torus(), 5);
  const GFFSample s = sample_gff(basis, 1);
  EXPECT_EQ(smear(s, 0.0), s.field());
  const auto far = smear(s, 50.0);
  for (const auto& c : far) EXPECT_LT(std::abs(c), 1e-20);
  EXPECT_THROW(smear(s, -1.0), Error);
}

TEST(Smear, CovarianceIsRegularizedGreen) {
  const ModeBasis basis(circle(), 6);
  const double eps = 0.1;
  const Eigen::VectorXd g = regularized_green(basis, eps);
  std::vector<std::vector<double>> p(basis.size());
  for (int k = 0; k < 10000; ++k) {
    const auto f = smear(sample_gff(basis, 9, std::uint64_t(k)), eps);
    for (std::size_t i = 0; i < f.size(); ++i) p[i].push_back(std::norm(f[i]));
  }
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const SampleMoments m = sample_moments(p[i]);
    EXPECT_LE(std::abs(m.mean - g(Eigen::Index(i))), 5 * m.std_error) << "mode " << i;
  }
}

TEST(QuadraticEnergy, MatchesRealSpaceQuadrature) {
  const ModeBasis b1(circle(), 8);
  const PerturbationField V1 = PerturbationField::constant(1, 0.5) + PerturbationField::cosine(1, {1, 0}, 0.4) +
                               PerturbationField::sine(1, {3, 0}, 0.2);
  const auto f1 = sample_gff(b1, 2).field();
  EXPECT_NEAR(quadratic_energy(f1, V1, b1).real(), quadrature_energy(f1, V1, b1, 64), 1e-8);

  const ModeBasis b2(torus(), 4);
  const PerturbationField V2 = PerturbationField::cosine(2, {1, 1}, 0.7) + PerturbationField::sine(2, {0, 2}, 0.3);
  const auto f2 = sample_gff(b2, 3).field();
  const cplx e2 = quadratic_energy(f2, V2, b2);
  EXPECT_NEAR(e2.real(), quadrature_energy(f2, V2, b2, 32), 1e-8);
  EXPECT_NEAR(e2.imag(), 0.0, 1e-12);
}

TEST(QuadraticEnergy, TrivialFields) {
  const ModeBasis basis(torus(), 4);
  const auto f = sample_gff(basis, 4).field();
  EXPECT_EQ(quadratic_energy(f, PerturbationField(2), basis), cplx(0));
  double norm2 = 0;
  for (const auto& c : f) norm2 += std::norm(c);
  EXPECT_NEAR(quadratic_energy(f, PerturbationField::constant(2, 1.5), basis).real(), 1.5 * norm2, 1e-12);
}

TEST(McPartition, ZeroFieldIsExact) {
  const auto r = mc_partition(PerturbationField(1), 0.05, 200, 1, ModeBasis(circle(), 16));
  EXPECT_EQ(r.estimate.mean, 1.0);
  EXPECT_EQ(r.estimate.std_error, 0.0);
  EXPECT_TRUE(r.pass);
  const auto w = mc_partition_renormalized(PerturbationField(2), 0.05, 200, 1, ModeBasis(torus(), 6));
  EXPECT_EQ(w.estimate.mean, 1.0);
  EXPECT_TRUE(w.pass);
}

TEST(McPartition, CircleMatchesFredholmReference) {
  const PerturbationField V = PerturbationField::constant(1, 0.5) + PerturbationField::cosine(1, {1, 0}, 0.4);
  const auto r = mc_partition(V, 0.05, 10000, 2026, ModeBasis(circle(), 64));
  EXPECT_TRUE(r.pass) << r.deviation_sigmas;
  EXPECT_EQ(r.estimate.samples, 10000u);
  EXPECT_GT(r.min_eigenvalue, -1.0);
}

TEST(McPartition, SeedDeterminism) {
  const PerturbationField V = PerturbationField::cosine(1, {2, 0}, 0.6);
  const ModeBasis basis(circle(), 16);
  const auto a = mc_partition(V, 0.1, 500, 77, basis);
  const auto b = mc_partition(V, 0.1, 500, 77, basis);
  EXPECT_EQ(a.estimate.mean, b.estimate.mean);
  EXPECT_EQ(a.estimate.std_error, b.estimate.std_error);
  const auto c = mc_partition(V, 0.1, 500, 78, basis);
  EXPECT_NE(a.estimate.mean, c.estimate.mean);
}

TEST(McPartition, StandardErrorScalesAsInverseRootK) {
  const PerturbationField V = PerturbationField::constant(1, 0.3) + PerturbationField::cosine(1, {1, 0}, 0.5);
  const ModeBasis basis(circle(), 16);
  const double s2 = mc_partition(V, 0.05, 100, 3, basis).estimate.std_error;
  const double s3 = mc_partition(V, 0.05, 1000, 3, basis).estimate.std_error;
  const double s4 = mc_partition(V, 0.05, 10000, 3, basis).estimate.std_error;
  EXPECT_NEAR(std::log10(s2 / s3), 0.5, 0.15);
  EXPECT_NEAR(std::log10(s3 / s4), 0.5, 0.15);
}

TEST(McPartition, EnergyVarianceIsTwiceTraceOfSquare) {
  // Var(phi^T M phi) = 2 Tr((C M)^2) for Gaussian phi with covariance C.
  const ModeBasis basis(circle(), 12);
  const PerturbationField V = PerturbationField::constant(1, 0.2) + PerturbationField::cosine(1, {1, 0}, 0.5);
  const double eps = 0.05;
  Eigen::VectorXd s(basis.size());
  for (std::size_t i = 0; i < basis.size(); ++i) {
    const double l = basis.free_eigenvalue(i);
    s(Eigen::Index(i)) = std::exp(-eps * l) / std::sqrt(l);
  }
  const Eigen::MatrixXcd T = s.asDiagonal() * convolution_matrix(V, basis) * s.asDiagonal();
  const double expected = 2 * (T * T).trace().real();
  const QuadraticForm form(V, basis);
  std::vector<double> e;
  for (int k = 0; k < 20000; ++k) e.push_back(form(smear(sample_gff(basis, 8, std::uint64_t(k)), eps)).real());
  const SampleMoments m = sample_moments(e);
  const double se_var = std::sqrt((m.fourth_central - m.variance * m.variance) / double(m.count));
  EXPECT_LE(std::abs(m.variance - expected), 5 * se_var);
  EXPECT_NEAR(m.mean, regularized_trace(V, eps, basis).real(), 5 * m.std_error);
}

TEST(McPartition, RejectsBadInput) {
  const ModeBasis basis(circle(), 16);
  try {
    mc_partition(PerturbationField::constant(1, -30.0), 0.05, 200, 1, basis);
    FAIL() << "expected divergence";
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("partition function divergent"), std::string::npos);
  }
  EXPECT_THROW(mc_partition(PerturbationField::cosine(1, {1, 0}, 0.1), 0.05, 50, 1, basis), Error);
  EXPECT_THROW(mc_partition(PerturbationField::constant(1, cplx(0, 1)), 0.05, 200, 1, basis), Error);
  EXPECT_THROW(mc_partition_renormalized(PerturbationField::cosine(1, {1, 0}, 0.1), 0.05, 200, 1, basis), Error);
}

TEST(McPartition, RenormalizedTorusMatchesDet2) {
  const auto r = mc_partition_renormalized(PerturbationField::cosine(2, {1, 0}, 0.3) +
                                               PerturbationField::constant(2, 0.2),
                                           0.05, 10000, 31, ModeBasis(torus(), 16));
  EXPECT_TRUE(r.pass) << r.deviation_sigmas;
  EXPECT_GT(r.counterterm, 0.0);
}

TEST(GffScan, OnlyThePlainLogMeanHasALogTerm) {
  std::vector<double> eps;
  for (int i = 0; i < 8; ++i) eps.push_back(0.2 * std::pow(0.125, i / 7.0));
  const auto s = gff_log_eps_scan(PerturbationField::constant(2, 0.2) + PerturbationField::cosine(2, {1, 0}, 0.3),
                                  eps, 4000, 5, ModeBasis(torus(), 16));
  ASSERT_EQ(s.rows.size(), 8u);
  EXPECT_TRUE(s.plain_has_log);
  EXPECT_FALSE(s.renormalized_has_log);
  // -Tr T / 2 carries (int V / 8 pi) log eps.
  EXPECT_NEAR(s.plain_fit.coefficient("log_eps"), 0.2 * 4 * pi * pi / (8 * pi), 0.05);
}

TEST(Dgff, ZeroFieldAndValidation) {
  const Geometry g = torus();
  DgffOptions o;
  o.sizes = {8, 16};
  o.continuum_cutoff = 20;
  const auto r = dgff_ratio(PerturbationField(2), g, o);
  for (const auto& row : r.rows) EXPECT_NEAR(row.log_ratio, 0.0, 1e-10);
  EXPECT_NEAR(r.continuum_log_ratio, 0.0, 1e-12);
  EXPECT_THROW(dgff_ratio(PerturbationField::constant(2, 0.1), g, o), Error);
  o.sizes = {16, 8};
  EXPECT_THROW(dgff_ratio(PerturbationField::cosine(2, {1, 0}, 0.1), g, o), Error);
}

TEST(Dgff, SmallFieldMatchesSecondOrderLatticeSum) {
  // For V = c cos x1 the first and third orders vanish:
  // log ratio = -(c^2 / 4) sum_a 1 / (lambda_h(a) lambda_h(a + e1)) + O(c^4).
  const Geometry g = torus();
  const double c = 0.05;
  DgffOptions o;
  o.sizes = {8, 16};
  o.continuum_cutoff = 20;
  const auto r = dgff_ratio(PerturbationField::cosine(2, {1, 0}, c), g, o);
  for (const auto& row : r.rows) {
    const int n = row.size;
    double s = 0;
    for (int a1 = 0; a1 < n; ++a1) {
      for (int a2 = 0; a2 < n; ++a2) s += 1 / (lattice_eigenvalue(a1, a2, n, 1.0) * lattice_eigenvalue(a1 + 1, a2, n, 1.0));
    }
    EXPECT_NEAR(row.log_ratio, -c * c / 4 * s, 1e-3 * c * c / 4 * s) << "n = " << n;
  }
}
