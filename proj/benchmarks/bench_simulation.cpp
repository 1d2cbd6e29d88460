#include <benchmark/benchmark.h>

#include "hsd/engine.hpp"
#include "hsd/simulator.hpp"
#include "hsd/toy_models.hpp"

namespace {

void BM_coin_simulation(benchmark::State& state) {
  hsd::Problem p;
  p.t_max = 15;
  p.models = {{0, "c", 0.05}, {1, "b", 0.9}, {2, "a", 12.0}};
  p.alpha = hsd::AcceptanceMatrix(3);
  p.alpha.set(0, 1, 0.7);
  p.alpha.set(0, 2, 0.45);
  p.alpha.set(1, 2, 0.75);
  const hsd::HierarchyPlan plan{{0, 1, 2}, {3, 6}};
  hsd::SimConfig config;
  config.n_tokens = state.range(0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(hsd::simulate(p, plan, config).mean_latency);
  }
}
BENCHMARK(BM_coin_simulation)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_engine_generation(benchmark::State& state) {
  const auto family = hsd::make_family(5, 3, 16, {0.5, 0.8, 1.0});
  const auto models = hsd::model_pointers(family);
  const hsd::HierarchyPlan plan{{0, 1, 2}, {2, 5}};
  const std::vector<int> ctx{0};
  uint64_t seed = 0;
  for (auto _ : state) {
    hsd::RandomSource rng(seed++);
    benchmark::DoNotOptimize(
        hsd::hsd_generate(models, plan, ctx, state.range(0), rng).stats.emitted_tokens);
  }
}
BENCHMARK(BM_engine_generation)->Arg(256)->Arg(2048)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
