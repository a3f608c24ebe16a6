#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "dynheat/grid_engine.hpp"
#include "dynheat/kernels.hpp"
#include "dynheat/operators.hpp"

using namespace dynheat;

static void BM_DirichletKernel(benchmark::State& state) {
  const HalfSpacePoint x(Tangential{0.3}, 0.7), y(Tangential{-0.2}, 0.4);
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(dirichlet_heat_kernel(x, y, t));
    t += 1e-9;
  }
}
BENCHMARK(BM_DirichletKernel);

static void BM_BoundaryKernel(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const Tangential z = n == 2 ? Tangential{0.4} : Tangential{0.4, -0.3};
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(boundary_kernel(z, 0.2, t));
    benchmark::DoNotOptimize(dt_boundary_kernel(z, 0.2, t));
    t += 1e-9;
  }
}
BENCHMARK(BM_BoundaryKernel)->Arg(2)->Arg(3);

static void BM_CellKernels(benchmark::State& state) {
  double t = 0.1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(gauss_cell(0.3, 0.2, 0.25, t));
    benchmark::DoNotOptimize(dirichlet_cell(0.3, 0.2, 0.25, t));
    benchmark::DoNotOptimize(poisson_cell(0.3, 0.2, 0.25, t));
    t += 1e-9;
  }
}
BENCHMARK(BM_CellKernels);

// pointwise S2 of a Gaussian, the oracle path
static void BM_PointwiseS2(benchmark::State& state) {
  const HalfSpacePoint x(Tangential{0.5}, 0.3);
  auto psi = [](const Tangential& y) { return std::exp(-y[0] * y[0]); };
  for (auto _ : state) benchmark::DoNotOptimize(apply_S2(psi, 0.2, x));
}
BENCHMARK(BM_PointwiseS2)->Unit(benchmark::kMicrosecond);
