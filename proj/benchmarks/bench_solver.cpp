#include <cmath>
#include <vector>

#include <benchmark/benchmark.h>

#include "dynheat/grid_engine.hpp"
#include "dynheat/operators.hpp"
#include "dynheat/solver.hpp"

using namespace dynheat;

namespace {

PlaneEngine engine(double h) {
  return PlaneEngine(CellAxis::covering(-4.0, 4.0, h), CellAxis::covering(0.0, 4.0, h));
}

}  // namespace

// one S1 application on the cell grid, with normal-derivative trace
static void BM_GridHeat(benchmark::State& state) {
  const PlaneEngine e = engine(8.0 / static_cast<double>(state.range(0)));
  const std::vector<double> data = e.sample(InitialDatum::from_function([](const HalfSpacePoint& y) {
    return std::exp(-y.tangential[0] * y.tangential[0]) * y.height * std::exp(-y.height);
  }));
  std::vector<double> values(e.row_field_size()), normals(e.row_field_size());
  for (auto _ : state) {
    std::fill(values.begin(), values.end(), 0.0);
    std::fill(normals.begin(), normals.end(), 0.0);
    e.accumulate_heat(data, 0.3, 1.0, values, normals);
    benchmark::DoNotOptimize(values.data());
  }
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_GridHeat)->RangeMultiplier(2)->Range(32, 128)->Unit(benchmark::kMillisecond);

static void BM_GridPoisson(benchmark::State& state) {
  const PlaneEngine e = engine(8.0 / static_cast<double>(state.range(0)));
  std::vector<double> psi(e.nx());
  for (std::size_t i = 0; i < psi.size(); ++i) psi[i] = std::exp(-std::pow(e.x_axis().center(i), 2));
  std::vector<double> out(e.nx());
  for (auto _ : state) {
    std::fill(out.begin(), out.end(), 0.0);
    e.accumulate_poisson(psi, 0.3, 1.0, out);
    benchmark::DoNotOptimize(out.data());
  }
}
BENCHMARK(BM_GridPoisson)->RangeMultiplier(4)->Range(64, 1024)->Unit(benchmark::kMicrosecond);

// full coarse solve: M search plus Picard iterations
static void BM_PicardCoarse(benchmark::State& state) {
  SolverConfig c;
  c.grid = {4.0, 0.2, 4.0, 0.2, 3};
  c.time_sample_count = 12;
  c.output_times = {0.25, 1.0};
  FamilyParams p;
  const InitialDatum phi = InitialDatum::family(p);
  for (auto _ : state) benchmark::DoNotOptimize(picard_solve(phi, c).diagnostics.iterations);
}
BENCHMARK(BM_PicardCoarse)->Unit(benchmark::kMillisecond)->Iterations(2);
BENCHMARK_MAIN();
