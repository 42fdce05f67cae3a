#include <benchmark/benchmark.h>

#include "pfl/metrics.hpp"

#include <random>

using namespace pfl;

namespace {

std::vector<double> gaussian_samples(std::size_t n) {
    std::mt19937_64 rng(7);
    std::normal_distribution<double> g(1e6, 4e6);
    std::vector<double> v(n);
    for (auto& x : v) x = g(rng);
    return v;
}

} // namespace

static void BM_EmpiricalQuantile(benchmark::State& state) {
    const auto samples = gaussian_samples(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(empirical_quantile(samples, 0.95));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_EmpiricalQuantile)->Arg(100000)->Arg(1000000);

static void BM_ExpectedShortfall(benchmark::State& state) {
    const auto samples = gaussian_samples(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        benchmark::DoNotOptimize(expected_shortfall(samples, 0.95));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_ExpectedShortfall)->Arg(100000)->Arg(1000000);

static void BM_PflProfile(benchmark::State& state) {
    const std::size_t n_paths = static_cast<std::size_t>(state.range(0));
    const std::size_t n_dates = 16;
    std::vector<int> days;
    for (std::size_t d = 0; d < n_dates; ++d) days.push_back(static_cast<int>(d) * 63);
    ExposureCube cube(TimeGrid(std::move(days)), n_paths, 0, "bench", false);
    std::mt19937_64 rng(11);
    std::normal_distribution<double> g(0.0, 5e6);
    for (std::size_t d = 0; d < n_dates; ++d)
        for (std::size_t p = 0; p < n_paths; ++p) cube.set(d, p, g(rng));
    for (auto _ : state) {
        benchmark::DoNotOptimize(pfl_profile(cube, ConstantLgd{0.6}, 0.95).values.back());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<long>(n_paths * n_dates));
}
BENCHMARK(BM_PflProfile)->Arg(50000);
