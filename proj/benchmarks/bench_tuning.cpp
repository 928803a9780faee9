// Throughput of the pieces a session spends its time in: bootstrap
// sampling, mapper fitting, prediction, and the tuning loops. Fixtures are
// built outside the timed region; every timed call is deterministic, so
// iteration-to-iteration variance is allocator and cache noise only.

#include <benchmark/benchmark.h>

#include <cstdint>

#include "obtune/experiments.hpp"
#include "obtune/mappers.hpp"
#include "obtune/multipass.hpp"
#include "obtune/observer.hpp"
#include "obtune/synthetic.hpp"

namespace {

using namespace obtune;

HyperParamSpace bench_space(std::size_t n) {
  std::vector<ParamSpec> params;
  for (std::size_t i = 0; i < n; ++i)
    params.push_back({"p" + std::to_string(i), ParamKind::Continuous, 0.0,
                      1.0, {}});
  return HyperParamSpace(std::move(params));
}

SyntheticObjective bench_objective(std::size_t n) {
  return SyntheticObjective::gaussian_bump(std::vector<double>(n, 0.5), 0.1);
}

void BM_Bootstrap(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t count = static_cast<std::size_t>(state.range(1));
  const HyperParamSpace space = bench_space(n);
  const Objective obj = bench_objective(n).bind(space);
  for (auto _ : state) {
    ExperimentLog log = run_bootstrap(space, obj, count, 42);
    benchmark::DoNotOptimize(log);
  }
  state.SetItemsProcessed(state.iterations() * count);
}
BENCHMARK(BM_Bootstrap)->Args({2, 100})->Args({2, 1000})->Args({8, 1000});

void BM_FitObserver(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const std::size_t count = static_cast<std::size_t>(state.range(1));
  const MapperKind kind =
      state.range(2) == 0 ? MapperKind::Knn : MapperKind::Linear;
  const HyperParamSpace space = bench_space(n);
  const ExperimentLog log =
      run_bootstrap(space, bench_objective(n).bind(space), count, 42);
  for (auto _ : state) {
    MapperObserver observer = fit_observer(log, kind, {.k = 5});
    benchmark::DoNotOptimize(observer);
  }
}
BENCHMARK(BM_FitObserver)
    ->Args({2, 300, 0})
    ->Args({8, 300, 0})
    ->Args({2, 300, 1})
    ->Args({8, 300, 1});

void BM_PredictQuality(benchmark::State& state) {
  const std::size_t count = static_cast<std::size_t>(state.range(0));
  const HyperParamSpace space = bench_space(4);
  const ExperimentLog log =
      run_bootstrap(space, bench_objective(4).bind(space), count, 42);
  const MapperObserver observer = fit_observer(log, MapperKind::Knn, {.k = 5});
  SplitMix64 rng(7);
  const HyperParamVector hp = space.sample(rng);
  for (auto _ : state)
    benchmark::DoNotOptimize(observer.predict_quality(space, hp));
}
BENCHMARK(BM_PredictQuality)->Arg(100)->Arg(300)->Arg(1000);

void BM_BasicAdjust(benchmark::State& state) {
  const std::size_t n = static_cast<std::size_t>(state.range(0));
  const HyperParamSpace space = bench_space(n);
  const ExperimentLog log =
      run_bootstrap(space, bench_objective(n).bind(space), 300, 42);
  const MapperObserver observer = fit_observer(log, MapperKind::Knn, {.k = 5});
  BasicTunerConfig config;
  config.max_iterations = 50;
  config.seed = 9;
  for (auto _ : state) {
    TuneResult result = basic_adjust(observer, space, config);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_BasicAdjust)->Arg(2)->Arg(4)->Arg(8);

void BM_MultiPassAdjust(benchmark::State& state) {
  const HyperParamSpace space = bench_space(4);
  const ExperimentLog log =
      run_bootstrap(space, bench_objective(4).bind(space), 300, 42);
  const MapperObserver observer = fit_observer(log, MapperKind::Knn, {.k = 5});
  MultiPassConfig config;
  config.q_init = 0.6;
  config.q_target = 0.99;
  config.inner.max_iterations = 50;
  config.inner.seed = 9;
  for (auto _ : state) {
    MultiPassResult result = multi_pass_adjust(observer, space, config);
    benchmark::DoNotOptimize(result);
  }
}
BENCHMARK(BM_MultiPassAdjust);

}  // namespace

BENCHMARK_MAIN();
