// Serial reference vs OpenMP kernels on synthetic users.
//
//   ./ghost_bench --benchmark_filter=Ghost

#include <benchmark/benchmark.h>

#include "ghost/batch.hpp"
#include "ghost/sweep.hpp"
#include "ghost/synthetic.hpp"

namespace {

const ghost::SynthDataset& dataset() {
  static const ghost::SynthDataset data = [] {
    ghost::SynthSpec spec;
    spec.n_users = 64;
    spec.seed = 11;
    return ghost::generate(spec);
  }();
  return data;
}

void BM_BatchSerial(benchmark::State& state, ghost::Algorithm algo) {
  const auto params = ghost::frozen_profile(algo);
  for (auto _ : state) benchmark::DoNotOptimize(ghost::detect_batch_serial(dataset().users, algo, params));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(dataset().users.size()));
}

void BM_BatchParallel(benchmark::State& state, ghost::Algorithm algo) {
  const auto params = ghost::frozen_profile(algo);
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ghost::detect_batch_parallel(dataset().users, algo, params, threads));
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(dataset().users.size()));
}

ghost::ParamGrid ghost_grid() {
  ghost::ParamGrid g = ghost::ParamGrid::sensitivity_ranges();
  g.algorithms.resize(1);  // grid detector only
  return g;
}

void BM_SweepSerial(benchmark::State& state) {
  const auto grid = ghost_grid();
  for (auto _ : state) benchmark::DoNotOptimize(ghost::run_sweep_serial(dataset().users, dataset().truth, grid));
}

void BM_SweepParallel(benchmark::State& state) {
  const auto grid = ghost_grid();
  const int threads = static_cast<int>(state.range(0));
  for (auto _ : state)
    benchmark::DoNotOptimize(ghost::run_sweep(dataset().users, dataset().truth, grid, {}, threads));
}

}  // namespace

BENCHMARK_CAPTURE(BM_BatchSerial, Ghost, ghost::Algorithm::Ghost)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BatchParallel, Ghost, ghost::Algorithm::Ghost)
    ->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_BatchSerial, Dbscan, ghost::Algorithm::Dbscan)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BatchParallel, Dbscan, ghost::Algorithm::Dbscan)
    ->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK_CAPTURE(BM_BatchSerial, MeanShift, ghost::Algorithm::A1)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_BatchParallel, MeanShift, ghost::Algorithm::A1)
    ->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->RangeMultiplier(2)->Range(1, 8)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
