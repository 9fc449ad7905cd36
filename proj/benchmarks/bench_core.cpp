#include <benchmark/benchmark.h>

#include <random>
#include <utility>
#include <vector>

#include "sirloc/detect.hpp"
#include "sirloc/gw.hpp"
#include "sirloc/rng.hpp"
#include "sirloc/samplepath.hpp"
#include "sirloc/sir.hpp"

namespace {

sirloc::Graph bench_tree(int child_degree, int depth) {
  return sirloc::gen_regular_tree(child_degree, depth);
}

// A snapshot with a fixed fraction of infected nodes, spread by simulation so
// the evidence is realistic (connected, centered on the source).
sirloc::Snapshot bench_snapshot(const sirloc::Graph& g) {
  std::mt19937_64 rng = sirloc::make_stream(17);
  sirloc::SirTrace tr = sirloc::simulate(g, 0, {0.6, 0.1}, 6, rng);
  return sirloc::snapshot_of(tr);
}

void BM_Simulate(benchmark::State& state) {
  const sirloc::Graph g = bench_tree(3, static_cast<int>(state.range(0)));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    std::mt19937_64 rng = sirloc::make_stream(seed++);
    benchmark::DoNotOptimize(sirloc::simulate(g, 0, {0.5, 0.2}, 8, rng));
  }
  state.SetComplexityN(static_cast<std::int64_t>(g.node_count()));
}
BENCHMARK(BM_Simulate)->Arg(6)->Arg(8)->Arg(10)->Complexity();

void BM_BfsDistances(benchmark::State& state) {
  const sirloc::Graph g = bench_tree(3, static_cast<int>(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(sirloc::bfs_distances(g, 0));
  }
  state.SetComplexityN(static_cast<std::int64_t>(g.node_count()));
}
BENCHMARK(BM_BfsDistances)->Arg(6)->Arg(8)->Arg(10)->Complexity();

void BM_ReverseInfection(benchmark::State& state) {
  const sirloc::Graph g = bench_tree(3, static_cast<int>(state.range(0)));
  const sirloc::Snapshot snap = bench_snapshot(g);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    std::mt19937_64 rng = sirloc::make_stream(seed++);
    benchmark::DoNotOptimize(sirloc::reverse_infection(g, snap, rng));
  }
}
BENCHMARK(BM_ReverseInfection)->Arg(6)->Arg(8)->Arg(10);

void BM_RiClosedForm(benchmark::State& state) {
  const sirloc::Graph g = bench_tree(3, static_cast<int>(state.range(0)));
  const sirloc::Snapshot snap = bench_snapshot(g);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    std::mt19937_64 rng = sirloc::make_stream(seed++);
    benchmark::DoNotOptimize(sirloc::ri_estimate(g, snap, rng));
  }
}
BENCHMARK(BM_RiClosedForm)->Arg(6)->Arg(8)->Arg(10);

void BM_OptimalPathProb(benchmark::State& state) {
  const sirloc::Graph g = bench_tree(3, static_cast<int>(state.range(0)));
  const sirloc::Snapshot snap = bench_snapshot(g);
  for (auto _ : state) {
    benchmark::DoNotOptimize(sirloc::optimal_path_prob(g, snap, 0, {0.6, 0.1}));
  }
}
BENCHMARK(BM_OptimalPathProb)->Arg(6)->Arg(8);

void BM_ExtinctionProb(benchmark::State& state) {
  for (auto _ : state) {
    benchmark::DoNotOptimize(sirloc::gw::extinction_prob(3, 0.5001));
  }
}
BENCHMARK(BM_ExtinctionProb);

}  // namespace

BENCHMARK_MAIN();
