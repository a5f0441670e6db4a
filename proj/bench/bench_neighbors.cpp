// Neighbor graph construction: serial brute force vs serial grid vs the
// OpenMP grid. Args are (num_points, target mean degree).
#include <benchmark/benchmark.h>

#include "psdbscan/datagen.hpp"
#include "psdbscan/neighborhood.hpp"

using namespace psdbscan;

namespace {

template <NeighborSearch Search>
void BM_build(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto data = gen_with_target_degree(n, static_cast<double>(state.range(1)), 1);
  std::size_t edges = 0;
  for (auto _ : state) {
    auto g = build_neighbor_graph(data.dataset, data.eps, Search);
    edges = g.num_entries();
    benchmark::DoNotOptimize(edges);
  }
  state.counters["entries"] = static_cast<double>(edges);
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n));
}

void small_sizes(benchmark::internal::Benchmark* b) {
  for (int n : {2000, 10000}) b->Args({n, 25});
  b->Unit(benchmark::kMillisecond);
}

void all_sizes(benchmark::internal::Benchmark* b) {
  small_sizes(b);
  b->Args({50000, 25})->Args({50000, 50});
}

}  // namespace

// brute force is quadratic, keep it off the big sizes
BENCHMARK(BM_build<NeighborSearch::brute_force>)->Apply(small_sizes);
BENCHMARK(BM_build<NeighborSearch::grid>)->Apply(all_sizes);
BENCHMARK(BM_build<NeighborSearch::grid_parallel>)->Apply(all_sizes);

BENCHMARK_MAIN();
