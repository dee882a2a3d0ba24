// Copyright 2026 The specdet Authors
// SPDX-License-Identifier: Apache-2.0
#include <benchmark/benchmark.h>

#include "specdet/gff.hpp"
#include "specdet/heat_renorm.hpp"

using namespace specdet;

static void BM_SampleGff(benchmark::State& state) {
  const ModeBasis b(Geometry::torus2(2 * pi, 1.0), int(state.range(0)));
  std::uint64_t stream = 0;
  for (auto _ : state) benchmark::DoNotOptimize(sample_gff(b, 1, stream++));
  state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SampleGff)->Arg(16)->Arg(32);

static void BM_QuadraticForm(benchmark::State& state) {
  const ModeBasis b(Geometry::torus2(2 * pi, 1.0), int(state.range(0)));
  const auto V = PerturbationField::constant(2, 0.2) + PerturbationField::cosine(2, {1, 0}, 0.3);
  const QuadraticForm q(V, b);
  const auto phi = smear(sample_gff(b, 1, 0), 0.05);
  for (auto _ : state) benchmark::DoNotOptimize(q(phi));
}
BENCHMARK(BM_QuadraticForm)->Arg(16)->Arg(32);

static void BM_McPartitionCircle(benchmark::State& state) {
  const ModeBasis b(Geometry::circle(2 * pi, 1.0), 64);
  const auto V = PerturbationField::constant(1, 0.5) + PerturbationField::cosine(1, {1, 0}, 0.4);
  const auto K = std::size_t(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(mc_partition(V, 0.05, K, 42, b));
  state.SetItemsProcessed(std::int64_t(state.iterations() * K));
}
BENCHMARK(BM_McPartitionCircle)->Arg(1000)->Unit(benchmark::kMillisecond);

static void BM_RegularizedFredholmTorus(benchmark::State& state) {
  const Geometry g = Geometry::torus2(2 * pi, 1.0);
  const auto V = PerturbationField::cosine(2, {1, 0}, 1.0) + PerturbationField::cosine(2, {0, 1}, 1.0);
  const ModeBasis b(g, 12);
  for (auto _ : state) benchmark::DoNotOptimize(regularized_fredholm(V, 1e-3, b, g));
}
BENCHMARK(BM_RegularizedFredholmTorus)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
