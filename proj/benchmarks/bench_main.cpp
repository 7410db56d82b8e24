#include <benchmark/benchmark.h>

#include <cmath>

#include "grwlab/graphgeom.hpp"
#include "grwlab/maxsolver.hpp"
#include "grwlab/warpkit.hpp"

namespace {

using namespace grwlab;

double bump(std::span<const double> x) {
  return 0.2 * std::sin(M_PI * x[0] / 2) * std::sin(M_PI * x[1] / 2);
}

void BM_MeanCurvature(benchmark::State& state) {
  const auto spec = make_spacetime("Example1", 2);
  const Grid g = Grid::cube(2, -1, 1, static_cast<int>(state.range(0)));
  const auto u = sample_nodes(g, bump);
  for (auto _ : state) benchmark::DoNotOptimize(mean_curvature(g, spec, u));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(g.size()));
}
BENCHMARK(BM_MeanCurvature)->Arg(33)->Arg(65)->Arg(129)->Unit(benchmark::kMicrosecond);

void BM_Solve(benchmark::State& state) {
  const auto spec = make_spacetime("Example1", 2);
  const auto problem = make_dirichlet_problem(spec, Grid::cube(2, -1, 1, static_cast<int>(state.range(0))), bump);
  for (auto _ : state) benchmark::DoNotOptimize(solve(problem));
}
BENCHMARK(BM_Solve)->Arg(33)->Arg(65)->Unit(benchmark::kMillisecond);

void BM_Classify(benchmark::State& state) {
  const auto spec = make_spacetime("Radiation", 3, {{"a", 1.0}});
  const IntervalDomain window{0.0, 10.0, true, false};
  for (auto _ : state) benchmark::DoNotOptimize(classify(spec, window));
}
BENCHMARK(BM_Classify)->Unit(benchmark::kMicrosecond);

}  // namespace

BENCHMARK_MAIN();
