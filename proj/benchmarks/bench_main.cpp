#include <benchmark/benchmark.h>

#include "lqsd/montecarlo.hpp"
#include "lqsd/qsd.hpp"
#include "lqsd/scale.hpp"
#include "lqsd/spectral.hpp"

using namespace lqsd;

namespace {

LevyModel model_for(int64_t i) {
  switch (i) {
    case 0: return LevyModel::bm_drift(1.0, 1.0);
    case 1: return LevyModel::cp_exp_drift(2.0, 1.0, 1.0);
    default: return LevyModel::meromorphic(-1.0, 0.5, {{2.0, 2.0}, {3.0, 3.0}});
  }
}

void BM_Spectral(benchmark::State& state) {
  const auto m = model_for(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(compute_spectral(m));
}
BENCHMARK(BM_Spectral)->DenseRange(0, 2);

void BM_ScaleClosedForm(benchmark::State& state) {
  const auto s = compute_spectral(model_for(state.range(0)));
  for (auto _ : state) {
    benchmark::DoNotOptimize(scale_grid_closed_form(s, -0.5 * s.lambda0(), {1e-3, 50.0}));
  }
}
BENCHMARK(BM_ScaleClosedForm)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_ScaleRenewal(benchmark::State& state) {
  const auto s = compute_spectral(model_for(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(scale_renewal(s, -0.5 * s.lambda0(), 0.0, {1e-3, 5.0}));
}
BENCHMARK(BM_ScaleRenewal)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_BuildQsd(benchmark::State& state) {
  const auto s = compute_spectral(model_for(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(build_qsd(s, s.lambda0()));
}
BENCHMARK(BM_BuildQsd)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

void BM_SimulateExits(benchmark::State& state) {
  const auto m = model_for(state.range(0));
  SimConfig c;
  c.n_paths = 1000;
  c.horizon = 20.0;
  c.threads = 1;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_exits(m, 1.0, c));
  state.SetItemsProcessed(state.iterations() * c.n_paths);
}
BENCHMARK(BM_SimulateExits)->DenseRange(0, 2)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
