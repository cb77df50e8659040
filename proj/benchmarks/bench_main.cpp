#include <benchmark/benchmark.h>

#include "coagflux/coag_op.hpp"
#include "coagflux/flux.hpp"
#include "coagflux/oracle.hpp"
#include "coagflux/state.hpp"

using namespace coagflux;

namespace {

State stationary_state(const Grid& grid) {
  initial::PowerLaw law{oracle::stationary_prefactor(), -1.5, grid.lower(), grid.upper()};
  return project_initial(grid, law, grid.lower()).state;
}

void BM_Assemble(benchmark::State& st) {
  const Grid grid = Grid::build_geometric(1e-4, 1e6, static_cast<int>(st.range(0)));
  const CoagulationOperator op(grid, KernelSpec::power_pair(0.5, -0.25, 1, 1),
                               TruncationPolicy::truncate_top);
  const State s = stationary_state(grid);
  const SourceSpec source{1e-4, 1.0};
  for (auto _ : st) benchmark::DoNotOptimize(op.assemble(s.counts, source));
  st.SetComplexityN(static_cast<long>(grid.size()));
}
BENCHMARK(BM_Assemble)->Arg(4)->Arg(8)->Arg(16)->Arg(32)->Complexity(benchmark::oNSquared);

void BM_QuadratureFlux(benchmark::State& st) {
  const Grid grid = Grid::build_geometric(1e-6, 1e6, static_cast<int>(st.range(0)));
  const KernelTable table(grid, KernelSpec::constant(2.0));
  const State s = stationary_state(grid);
  for (auto _ : st) benchmark::DoNotOptimize(quadrature_flux(s, grid, table, 1.0));
}
BENCHMARK(BM_QuadratureFlux)->Arg(8)->Arg(16);

void BM_ResolvedFlux(benchmark::State& st) {
  const Grid grid = Grid::build_geometric(1e-6, 1e6, 16);
  const State s = stationary_state(grid);
  const KernelSpec k = KernelSpec::constant(2.0);
  for (auto _ : st) {
    benchmark::DoNotOptimize(resolved_flux(s, grid, k, 1.0, static_cast<int>(st.range(0))));
  }
}
BENCHMARK(BM_ResolvedFlux)->Arg(8)->Arg(32);

}  // namespace

BENCHMARK_MAIN();
