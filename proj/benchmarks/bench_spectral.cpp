// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include <cmath>

#include "specdet/determinants.hpp"
#include "specdet/operators.hpp"

using namespace specdet;

static void BM_EigenvaluesCircle(benchmark::State& state) {
  const Geometry g = Geometry::circle(2 * pi, 1.0);
  const auto op = build_laplace(g, PerturbationField::cosine(1, {1, 0}, 1.0), ModeBasis(g, int(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(op));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_EigenvaluesCircle)->Arg(128)->Arg(256)->Arg(512)->Unit(benchmark::kMillisecond);

static void BM_EigenvaluesTorus(benchmark::State& state) {
  const Geometry g = Geometry::torus2(2 * pi, 1.0);
  const auto V = PerturbationField::cosine(2, {1, 0}, 1.0) + PerturbationField::cosine(2, {0, 1}, 1.0);
  const auto op = build_laplace(g, V, ModeBasis(g, int(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(eigenvalues(op));
}
BENCHMARK(BM_EigenvaluesTorus)->Arg(8)->Arg(16)->Arg(24)->Unit(benchmark::kMillisecond);

static void BM_BuildLaplaceTorus(benchmark::State& state) {
  const Geometry g = Geometry::torus2(2 * pi, 1.0);
  const auto V = PerturbationField::cosine(2, {1, 0}, 1.0) + PerturbationField::cosine(2, {1, 1}, 0.5);
  const ModeBasis b(g, int(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_laplace(g, V, b));
}
BENCHMARK(BM_BuildLaplaceTorus)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

static void BM_SparseLatticeLogdet(benchmark::State& state) {
  const int n = int(state.range(0));
  std::vector<double> V(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) V[std::size_t(i) * n + j] = 0.5 * (std::cos(2 * pi * i / n) + std::cos(2 * pi * j / n));
  const auto M = lattice_laplacian_sparse(n, 2 * pi, 1.0, V);
  for (auto _ : state) benchmark::DoNotOptimize(lattice_logdet(M));
}
BENCHMARK(BM_SparseLatticeLogdet)->Arg(32)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
