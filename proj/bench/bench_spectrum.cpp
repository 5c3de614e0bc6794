// Serial reference vs OpenMP frequency sweeps.

#include <benchmark/benchmark.h>

#include "oemarray/array.hpp"
#include "oemarray/noise.hpp"

using namespace oem;

namespace {

ArrayConfig config(std::size_t n) {
    ArrayConfig c;
    c.n_sites = n;
    c.profile = CouplingProfile::tanh(0.08, 0.08);
    c.gamma = 5e-5;
    c.n_bar = 100.0;
    return c;
}

Execution mode(const benchmark::State& state) {
    return state.range(1) == 0 ? Execution::Serial : Execution::Parallel;
}

void BM_ConversionSpectrum(benchmark::State& state) {
    const auto cfg = config(static_cast<std::size_t>(state.range(0)));
    const auto grid = FrequencyGrid::symmetric(2.0, 4001);
    for (auto _ : state) benchmark::DoNotOptimize(conversion_spectrum(cfg, grid, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(grid.n_points));
    state.counters["threads"] = mode(state) == Execution::Serial ? 1 : max_threads();
}

void BM_NoiseSpectrum(benchmark::State& state) {
    const auto cfg = config(static_cast<std::size_t>(state.range(0)));
    const auto grid = FrequencyGrid::symmetric(0.5, 2001);
    for (auto _ : state) benchmark::DoNotOptimize(added_noise_spectrum(cfg, grid, mode(state)));
    state.SetItemsProcessed(state.iterations() * static_cast<long long>(grid.n_points));
    state.counters["threads"] = mode(state) == Execution::Serial ? 1 : max_threads();
}

}  // namespace

// Second argument: 0 = serial reference, 1 = OpenMP.
BENCHMARK(BM_ConversionSpectrum)->ArgsProduct({{10, 200}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NoiseSpectrum)->ArgsProduct({{10, 200}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
