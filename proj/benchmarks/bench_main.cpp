#include <benchmark/benchmark.h>

#include <cmath>

#include "tdl/delta_lab.hpp"
#include "tdl/dseries.hpp"
#include "tdl/reconstruct.hpp"
#include "tdl/tau_core.hpp"
#include "tdl/zeta.hpp"

using namespace tdl;

namespace {

void BM_SieveRange(benchmark::State& state) {
  const auto strategy = static_cast<SieveStrategy>(state.range(0));
  const auto x = static_cast<double>(state.range(1));
  const TwistedParams params(1.0);
  const auto grid = geometric_grid(1e3, x, 1.001);
  SieveOptions options;
  options.strategy = strategy;
  for (auto _ : state) benchmark::DoNotOptimize(partial_sum_sieve(x, grid, params, options));
  state.SetItemsProcessed(state.iterations() * state.range(1));
  state.SetLabel(std::string(to_string(strategy)));
}
BENCHMARK(BM_SieveRange)
    ->ArgsProduct({{0, 1}, {1 << 20, 1 << 23}})
    ->Unit(benchmark::kMillisecond);

void BM_TauSingle(benchmark::State& state) {
  const TwistedParams params(1.0);
  std::uint64_t n = 1'000'000'007ull;
  for (auto _ : state) benchmark::DoNotOptimize(tau(n++, params));
}
BENCHMARK(BM_TauSingle);

void BM_Zeta(benchmark::State& state) {
  const cplx s{0.375, static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(zeta(s));
}
BENCHMARK(BM_Zeta)->Arg(10)->Arg(100)->Arg(1000)->Arg(10000);

void BM_ZetaTriplet(benchmark::State& state) {
  const cplx s{0.375, static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(zeta_triplet(s, 1.0));
}
BENCHMARK(BM_ZetaTriplet)->Arg(100)->Arg(1000);

void BM_DSeries(benchmark::State& state) {
  const TwistedParams params(1.0);
  const cplx s{0.375, static_cast<double>(state.range(0))};
  for (auto _ : state) benchmark::DoNotOptimize(d_series(s, params));
}
BENCHMARK(BM_DSeries)->Arg(100)->Arg(1000);

void BM_MainTermConstants(benchmark::State& state) {
  const TwistedParams params(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(main_term_constants(params));
}
BENCHMARK(BM_MainTermConstants)->Unit(benchmark::kMillisecond);

void BM_LineCache(benchmark::State& state) {
  const TwistedParams params(1.0);
  PerronConfig config;
  config.t_cut = static_cast<double>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(DLineCache(params, config));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(config.t_cut / config.panel_length) *
                          config.nodes_per_panel);
}
BENCHMARK(BM_LineCache)->Arg(100)->Arg(400)->Unit(benchmark::kMillisecond);

void BM_PerronEvaluate(benchmark::State& state) {
  const TwistedParams params(1.0);
  PerronConfig config;
  config.t_cut = 400.0;
  const DLineCache cache(params, config);
  double x = 1e4;
  for (auto _ : state) {
    benchmark::DoNotOptimize(perron_delta(x, cache));
    x = x < 3e4 ? x * 1.01 : 1e4;
  }
}
BENCHMARK(BM_PerronEvaluate)->Unit(benchmark::kMicrosecond);

void BM_SmoothedMoment(benchmark::State& state) {
  const TwistedParams params(1.0);
  const auto constants = main_term_constants(params);
  const auto sums = partial_sum_sieve(1e6, geometric_grid(1e3, 1e6, 1.001), params);
  const auto delta = delta_series(sums, constants);
  for (auto _ : state) benchmark::DoNotOptimize(smoothed_moment(delta, 1e4, 0.05, 80.0, 1e6));
}
BENCHMARK(BM_SmoothedMoment)->Unit(benchmark::kMicrosecond);

}  // namespace
BENCHMARK_MAIN();
