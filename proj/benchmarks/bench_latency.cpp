#include <benchmark/benchmark.h>

#include "hsd/latency.hpp"
#include "hsd/reference_cases.hpp"

namespace {

void BM_gamma_rounds(benchmark::State& state) {
  const int t_j = static_cast<int>(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(hsd::gamma_rounds(0.73, 4, t_j));
  }
}
BENCHMARK(BM_gamma_rounds)->Arg(4)->Arg(15)->Arg(60);

void BM_gamma_table_fill(benchmark::State& state) {
  const int t_max = static_cast<int>(state.range(0));
  for (auto _ : state) {
    hsd::GammaTable table;
    for (int ti = 1; ti <= t_max; ++ti) {
      for (int tj = ti; tj <= t_max; ++tj) {
        benchmark::DoNotOptimize(table.get(0.42, ti, tj));
      }
    }
  }
}
BENCHMARK(BM_gamma_table_fill)->Arg(15);

void BM_expected_latency(benchmark::State& state) {
  const hsd::Problem problem = hsd::reference::example1();
  const hsd::HierarchyPlan plan{{0, 1, 2, 3, 4, 5}, {3, 4, 5, 6, 7}};
  for (auto _ : state) {
    benchmark::DoNotOptimize(hsd::expected_latency(problem, plan).latency_per_token);
  }
}
BENCHMARK(BM_expected_latency);

}  // namespace
