// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "specdet/determinants.hpp"
#include "specdet/factorization.hpp"
#include "specdet/linalg.hpp"
#include "specdet/operators.hpp"
#include "specdet/rng.hpp"

using namespace specdet;

namespace {

Eigen::MatrixXcd random_contraction(int n) {
  CounterStream rng(7, 0);
  Eigen::MatrixXcd A(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) A(i, j) = cplx(rng.normal(), rng.normal()) * (0.4 / std::sqrt(double(n)));
  return A;
}

}  // namespace

static void BM_ZetaMellinCircle(benchmark::State& state) {
  const Geometry g = Geometry::circle(2 * pi, 1.0);
  const auto op = build_laplace(g, PerturbationField::cosine(1, {1, 0}, 1.0), ModeBasis(g, int(state.range(0))));
  const auto data = SpectralData::of(op);
  for (auto _ : state) benchmark::DoNotOptimize(zeta_det_mellin(data));
}
BENCHMARK(BM_ZetaMellinCircle)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_Monodromy(benchmark::State& state) {
  const Geometry g = Geometry::circle(2 * pi, 1.0);
  const auto V = PerturbationField::cosine(1, {1, 0}, 2.0) + PerturbationField::sine(1, {2, 0}, 0.5);
  for (auto _ : state) benchmark::DoNotOptimize(zeta_det_monodromy(V, 1.0, g));
}
BENCHMARK(BM_Monodromy)->Unit(benchmark::kMillisecond);

static void BM_GkProduct(benchmark::State& state) {
  const auto A = random_contraction(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gk_det_from_spectrum(2, linalg::eigvals_general(A)));
}
BENCHMARK(BM_GkProduct)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_GkRp(benchmark::State& state) {
  const auto A = random_contraction(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gk_det_rp(2, A));
}
BENCHMARK(BM_GkRp)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_GkTraceSeries(benchmark::State& state) {
  const auto A = random_contraction(int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gk_log_trace_series(2, A, 1e-14));
}
BENCHMARK(BM_GkTraceSeries)->Arg(64)->Arg(256)->Unit(benchmark::kMillisecond);

static void BM_GkRayTorus(benchmark::State& state) {
  const Geometry g = Geometry::torus2(2 * pi, 1.0);
  const auto V = PerturbationField::cosine(2, {1, 0}, 1.0) + PerturbationField::cosine(2, {0, 1}, 1.0);
  const ModeBasis b(g, int(state.range(0)));
  for (auto _ : state) {
    const GkRay ray(V, b, 2);
    benchmark::DoNotOptimize(ray(cplx(0.5, 0.0)));
  }
}
BENCHMARK(BM_GkRayTorus)->Arg(16)->Unit(benchmark::kMillisecond);
