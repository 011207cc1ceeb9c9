// Serial reference vs OpenMP kernels: model selection over all specs and the
// replicate runner. Thread count follows OMP_NUM_THREADS.

#include <benchmark/benchmark.h>

#include "curecheck/receus.hpp"
#include "curecheck/simulate.hpp"

using namespace curecheck;

namespace {

SimulationConfig recovery(std::uint64_t seed, std::size_t n) {
  SimulationConfig c;
  c.n = n;
  c.cure_fraction = 0.4;
  c.family = Family::weibull;
  c.latency = {0.8, 0.8};
  c.censoring = Censoring::composite(7.3, 30.0);
  c.seed = seed;
  return c;
}

void BM_SelectModel(benchmark::State& state, Execution execution) {
  const auto sim = simulate_mixture(recovery(1, static_cast<std::size_t>(state.range(0))));
  const std::vector<Family> families(kAllFamilies.begin(), kAllFamilies.end());
  for (auto _ : state) {
    auto sel = select_model_by_aic(sim.sample, families, {}, execution);
    benchmark::DoNotOptimize(sel.selected);
  }
  state.counters["threads"] = omp_get_max_threads();
}

void BM_Replicates(benchmark::State& state, Execution execution) {
  const auto reps = static_cast<std::size_t>(state.range(0));
  FitOptions quick;
  quick.standard_errors = false;
  for (auto _ : state) {
    auto out = run_replicates(
        reps, 7,
        [&](std::uint64_t seed, std::size_t) {
          const auto sim = simulate_mixture(recovery(seed, 1000));
          return *fit_model(sim.sample, {Family::weibull, true}, quick).params.cure_fraction;
        },
        execution);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(reps));
}

}  // namespace

BENCHMARK_CAPTURE(BM_SelectModel, serial, Execution::serial)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_SelectModel, parallel, Execution::parallel)->Arg(500)->Arg(2000)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Replicates, serial, Execution::serial)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Replicates, parallel, Execution::parallel)->Arg(32)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
