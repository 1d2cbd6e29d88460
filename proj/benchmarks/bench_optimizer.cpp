#include <benchmark/benchmark.h>

#include "hsd/optimizer.hpp"

namespace {

// Synthetic layer-stack problem: geometric costs, agreement dropping
// linearly with layer distance.
hsd::Problem layer_stack(int drafters, int t_max) {
  hsd::Problem p;
  p.t_max = t_max;
  p.alpha = hsd::AcceptanceMatrix(drafters + 1);
  double cost = 1e-4;
  for (int i = 0; i <= drafters; ++i) {
    p.models.push_back({i, "layer" + std::to_string(i), cost});
    cost *= 1.22;
  }
  for (int i = 0; i <= drafters; ++i) {
    for (int j = i + 1; j <= drafters; ++j) {
      p.alpha.set(i, j, 1.0 - static_cast<double>(j - i) / drafters);
    }
  }
  return p;
}

void BM_build_graph(benchmark::State& state) {
  const hsd::Problem p = layer_stack(static_cast<int>(state.range(0)), 15);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hsd::build_graph(p).edges.size());
  }
}
BENCHMARK(BM_build_graph)->Arg(8)->Arg(32)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_solve(benchmark::State& state) {
  const hsd::Problem p = layer_stack(static_cast<int>(state.range(0)), 15);
  const hsd::GspGraph graph = hsd::build_graph(p);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hsd::solve(graph).latency);
  }
}
BENCHMARK(BM_solve)->Arg(8)->Arg(32)->Arg(80)->Unit(benchmark::kMillisecond);

void BM_brute_force(benchmark::State& state) {
  const hsd::Problem p = layer_stack(static_cast<int>(state.range(0)), 4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hsd::brute_force(p).latency);
  }
}
BENCHMARK(BM_brute_force)->Arg(3)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
