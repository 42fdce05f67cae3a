#include <benchmark/benchmark.h>

#include "pfl/exposure.hpp"
#include "pfl/scenario.hpp"

using namespace pfl;

namespace {

ExposureJob irs_job(std::size_t n_paths) {
    const auto scenario = load_scenario(std::string(PFL_SCENARIO_DIR) +
                                        "/usd_irs_collat.scenario.json");
    const auto grids = build_scenario_grids(scenario);
    ExposureJob job;
    job.model = scenario.model;
    job.sim_grid = grids.sim_grid;
    job.eval_indices = grids.eval_indices;
    job.portfolio = scenario.portfolio;
    job.csa = scenario.csa;
    job.im_terms = scenario.im_terms;
    job.deltas = scenario.deltas;
    job.n_paths = n_paths;
    job.seed = 42;
    return job;
}

} // namespace

static void BM_ExposureCubeIrs(benchmark::State& state) {
    const auto job = irs_job(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto cube = build_exposure_cube(job);
        benchmark::DoNotOptimize(cube.raw_slice(0).data());
    }
    state.SetItemsProcessed(state.iterations() *
                            static_cast<long>(job.n_paths * job.eval_indices.size()));
}
BENCHMARK(BM_ExposureCubeIrs)->Arg(2000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
