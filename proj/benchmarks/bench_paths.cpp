#include <benchmark/benchmark.h>

#include "pfl/market_models.hpp"

using namespace pfl;

static void BM_GeneratePathsGbm(benchmark::State& state) {
    const ModelSpec model = GbmSpec{100.0, 0.01, 0.2};
    const TimeGrid grid = regular_grid(2520, 12);
    const auto n_paths = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto paths = generate_paths(model, grid, n_paths, 42);
        benchmark::DoNotOptimize(paths.state(0, 1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n_paths * grid.size()));
}
BENCHMARK(BM_GeneratePathsGbm)->Arg(1024)->Arg(16384);

static void BM_GeneratePathsShortRate(benchmark::State& state) {
    const ModelSpec model = ShortRate1FSpec{0.05, 0.009, 0.02};
    const TimeGrid grid = regular_grid(2520, 12);
    const auto n_paths = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) {
        auto paths = generate_paths(model, grid, n_paths, 42);
        benchmark::DoNotOptimize(paths.state(0, 1));
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n_paths * grid.size()));
}
BENCHMARK(BM_GeneratePathsShortRate)->Arg(1024)->Arg(16384);

static void BM_ConditionalQuantile(benchmark::State& state) {
    const ModelSpec model = GbmSpec{100.0, 0.01, 0.2};
    double s = 100.0;
    for (auto _ : state) {
        s = conditional_value_quantile(model, s, 10.0 / 252.0, 0.99, 1.0);
        benchmark::DoNotOptimize(s);
        s = 100.0;
    }
}
BENCHMARK(BM_ConditionalQuantile);
