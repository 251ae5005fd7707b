// Serial reference kernels against their OpenMP variants.
#include <benchmark/benchmark.h>

#include "clusterdev/graph_enum.hpp"
#include "clusterdev/kernels/graph_quadrature.hpp"
#include "clusterdev/potentials.hpp"

using namespace clusterdev;

namespace {

kernels::GraphIntegral square_well_problem(const PairPotential& pot, const GraphFamily& fam, int m) {
  kernels::GraphIntegral p;
  p.potential = &pot;
  p.vertices = m;
  p.family = &fam.masks;
  p.leaf = kernels::Leaf::family_sum;
  p.domain = kernels::Domain::pinned;
  return p;
}

void BM_Quadrature(benchmark::State& state, bool parallel) {
  const auto pot = PairPotential::square_well(1.0, 1.5, 0.4);
  const int m = static_cast<int>(state.range(0));
  const auto fam = enumerate(m, GraphPredicate::biconnected);
  const auto p = square_well_problem(pot, fam, m);
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? kernels::integrate_graph_omp(p) : kernels::integrate_graph_serial(p));
  state.counters["leaves"] = static_cast<double>(kernels::count_graph_leaves(p));
}

void BM_MonteCarlo(benchmark::State& state, bool parallel) {
  const auto pot = PairPotential::hard_rod(1.0);
  const auto fam = enumerate(4, GraphPredicate::biconnected);
  kernels::McIntegral mc;
  mc.base = square_well_problem(pot, fam, 4);
  mc.dim = 2;
  mc.samples = static_cast<std::uint64_t>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? kernels::integrate_graph_mc_omp(mc) : kernels::integrate_graph_mc_serial(mc));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_GraphCount(benchmark::State& state, bool parallel) {
  const int n = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(parallel ? count_graphs_omp(n, GraphPredicate::biconnected)
                                      : count_graphs_serial(n, GraphPredicate::biconnected));
}

}  // namespace

BENCHMARK_CAPTURE(BM_Quadrature, serial, false)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Quadrature, omp, true)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, serial, false)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_MonteCarlo, omp, true)->Arg(1 << 16)->Arg(1 << 18)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GraphCount, serial, false)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_GraphCount, omp, true)->Arg(5)->Arg(6)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
