// Serial reference kernels against their OpenMP counterparts.

#include <benchmark/benchmark.h>

#include <vector>

#include "shom/estimator.hpp"
#include "shom/kernels.hpp"

namespace {

using namespace shom;

BeamGeometry lab() {
  BeamGeometry g;
  g.sigma_k = 0.029 * units::per_um;
  g.d = 335.0 * units::mm;
  return g;
}

const NoiseModel kNoise{0.1, 0.85};

std::vector<double> deflections(int n) {
  std::vector<double> t(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) t[i] = (0.1 + 1.9 * i / (n - 1)) * units::mrad;
  return t;
}

template <auto Kernel>
void BM_FisherScan(benchmark::State& state) {
  const auto thetas = deflections(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(thetas, lab(), kNoise, QuadratureSpec{}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_GenerateEvents(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(n, 1.01e-3, lab(), kNoise, RngSeed{1, 0}));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <auto Kernel>
void BM_LikelihoodGrid(benchmark::State& state) {
  const auto events =
      EventBatch::from(serial::generate_events(static_cast<std::size_t>(state.range(0)), 1.01e-3,
                                               lab(), kNoise, RngSeed{2, 0}));
  const auto grid = deflections(kLikelihoodGridPoints);
  for (auto _ : state) benchmark::DoNotOptimize(Kernel(events, grid, lab(), kNoise));
  state.SetItemsProcessed(state.iterations() * state.range(0) * kLikelihoodGridPoints);
}

template <auto Kernel>
void BM_DrawCounts(benchmark::State& state) {
  const std::vector<double> p(static_cast<std::size_t>(state.range(0)), 0.05);
  for (auto _ : state)
    benchmark::DoNotOptimize(Kernel(p, 100000, RngSeed{3, 0}, CountingStatistics::binomial));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

}  // namespace

BENCHMARK(BM_FisherScan<serial::fisher_scan>)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_FisherScan<parallel::fisher_scan>)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateEvents<serial::generate_events>)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_GenerateEvents<parallel::generate_events>)->Arg(1 << 20)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LikelihoodGrid<serial::log_likelihood_grid>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LikelihoodGrid<parallel::log_likelihood_grid>)->Arg(10000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DrawCounts<serial::draw_counts>)->Arg(4096)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DrawCounts<parallel::draw_counts>)->Arg(4096)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
