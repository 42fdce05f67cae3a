#include <doctest.h>

#include "pfl/errors.hpp"
#include "pfl/exposure.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

using namespace pfl;

namespace {

ExposureJob forward_job(bool with_csa, std::size_t n_paths = 2000) {
    ExposureJob job;
    job.model = GbmSpec{100.0, 0.01, 0.2};
    job.portfolio = Portfolio{"ns", {ForwardSpec{1.0, 0.0, 3 * 252}}};
    std::vector<int> days;
    for (int d = 0; d <= 504; d += 5) days.push_back(d);
    if (with_csa) {
        CSATerms csa;
        csa.mpor_days = 10;
        job.csa = csa;
        std::vector<int> sims = days;
        for (int d : days)
            if (d - 10 > 0) sims.push_back(d - 10);
        job.sim_grid = make_grid(std::move(sims));
    } else {
        job.sim_grid = make_grid(std::vector<int>(days));
    }
    for (int d : days) job.eval_indices.push_back(*job.sim_grid.index_of_day(d));
    job.deltas = classical_plus_deltas(10);
    job.n_paths = n_paths;
    job.seed = 91;
    return job;
}

} // namespace

TEST_CASE("zero-vol cube rows are deterministic forward values") {
    ExposureJob job = forward_job(false, 8);
    job.model = GbmSpec{100.0, 0.02, 0.0};
    const auto cube = build_exposure_cube(job);
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        const double expected = 100.0 * std::exp(0.02 * cube.grid().year(d));
        for (double v : cube.raw_slice(d)) CHECK(v == doctest::Approx(expected).epsilon(1e-13));
    }
}

TEST_CASE("uncollateralized cube equals the portfolio value path by path") {
    ExposureJob job = forward_job(false);
    const auto cube = build_exposure_cube(job);
    const auto paths = generate_paths(job.model, job.sim_grid, job.n_paths, job.seed);
    for (std::size_t e = 0; e < job.eval_indices.size(); ++e) {
        const auto slice = cube.raw_slice(e);
        for (std::size_t p = 0; p < job.n_paths; ++p)
            CHECK(slice[p] == paths.state(p, job.eval_indices[e]));
    }
}

TEST_CASE("zero-threshold collateralized rows equal a two-point revaluation, exactly") {
    ExposureJob job = forward_job(true);
    const auto cube = build_exposure_cube(job);
    const auto paths = generate_paths(job.model, job.sim_grid, job.n_paths, job.seed);
    for (std::size_t e = 0; e < job.eval_indices.size(); ++e) {
        const std::size_t i = job.eval_indices[e];
        const int day = job.sim_grid.day(i);
        const auto slice = cube.raw_slice(e);
        for (std::size_t p = 0; p < job.n_paths; ++p) {
            if (day < 10) {
                CHECK(slice[p] == paths.state(p, i)); // VM = 0 history
            } else {
                const auto j = *job.sim_grid.index_of_day(day - 10);
                CHECK(slice[p] == paths.state(p, i) - paths.state(p, j));
            }
        }
    }
}

TEST_CASE("flooring clamps raw at zero everywhere") {
    ExposureJob job = forward_job(true);
    const auto cube = build_exposure_cube(job);
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        const auto raw = cube.raw_slice(d);
        const auto floored = cube.floored_slice(d);
        for (std::size_t p = 0; p < cube.n_paths(); ++p) {
            CHECK(floored[p] == std::max(raw[p], 0.0));
            CHECK(floored[p] >= 0.0);
        }
    }
}

TEST_CASE("cube construction is invariant to block size and thread count") {
    ExposureJob a = forward_job(true, 3000);
    a.block_size = 128;
    a.threads = 2;
    ExposureJob b = forward_job(true, 3000);
    b.block_size = 997;
    b.threads = 1;
    const auto ca = build_exposure_cube(a);
    const auto cb = build_exposure_cube(b);
    for (std::size_t d = 0; d < ca.n_dates(); ++d) {
        const auto ra = ca.raw_slice(d);
        const auto rb = cb.raw_slice(d);
        for (std::size_t p = 0; p < ca.n_paths(); ++p) CHECK(ra[p] == rb[p]);
    }
}

TEST_CASE("PathSet-based builder agrees with the streaming builder bit for bit") {
    ExposureJob job = forward_job(true, 500);
    const auto streamed = build_exposure_cube(job);
    const auto paths = generate_paths(job.model, job.sim_grid, job.n_paths, job.seed);
    const auto direct = build_exposure_cube(paths, job.eval_indices, job.portfolio, job.csa,
                                            job.im_terms, job.deltas);
    REQUIRE(streamed.n_dates() == direct.n_dates());
    for (std::size_t d = 0; d < streamed.n_dates(); ++d) {
        const auto a = streamed.raw_slice(d);
        const auto b = direct.raw_slice(d);
        for (std::size_t p = 0; p < streamed.n_paths(); ++p) CHECK(a[p] == b[p]);
    }
}

TEST_CASE("quantile IM truncates all but about one percent of paths") {
    ExposureJob job = forward_job(true, 20000);
    job.im_terms.mode = IMMode::Quantile;
    job.im_terms.q = 0.99;
    job.im_terms.horizon_days = 10;
    const auto cube = build_exposure_cube(job);
    // Away from the first mpor days the exceedance probability is one-sided
    // 1% by construction; allow 5 binomial sigmas.
    const double sigma = std::sqrt(0.01 * 0.99 / 20000.0);
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        if (cube.grid().day(d) < 10) continue;
        const auto floored = cube.floored_slice(d);
        std::size_t positive = 0;
        for (double v : floored)
            if (v > 0.0) ++positive;
        const double frac = static_cast<double>(positive) / 20000.0;
        CHECK(std::fabs(frac - 0.01) < 5.0 * sigma);
    }
}

TEST_CASE("cube dump round-trips through the PFLC format") {
    ExposureJob job = forward_job(true, 64);
    const auto cube = build_exposure_cube(job);
    const std::string path = "/tmp/pfl_test_cube.pflc";
    dump_cube(cube, path);
    const auto loaded = load_cube(path);
    REQUIRE(loaded.n_dates() == cube.n_dates());
    REQUIRE(loaded.n_paths() == cube.n_paths());
    CHECK(loaded.seed() == cube.seed());
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        CHECK(loaded.grid().day(d) == cube.grid().day(d));
        const auto a = cube.raw_slice(d);
        const auto b = loaded.raw_slice(d);
        for (std::size_t p = 0; p < cube.n_paths(); ++p) CHECK(a[p] == b[p]);
    }
    std::filesystem::remove(path);
}

TEST_CASE("grid inconsistency is a configuration error") {
    ExposureJob job = forward_job(true);
    // a 7-day step leaves the 10-day lookbacks off the grid
    std::vector<int> days;
    for (int d = 0; d <= 504; d += 7) days.push_back(d);
    job.sim_grid = make_grid(std::move(days));
    job.eval_indices.clear();
    for (std::size_t i = 0; i < job.sim_grid.size(); ++i) job.eval_indices.push_back(i);
    CHECK_THROWS_AS(build_exposure_cube(job), ConfigError);
}

TEST_CASE("streaming fold visits every cell with the cube's values") {
    ExposureJob job = forward_job(true, 100);
    const auto cube = build_exposure_cube(job);
    std::vector<double> collected(cube.n_dates() * cube.n_paths(),
                                  std::numeric_limits<double>::quiet_NaN());
    job.threads = 1;
    for_each_exposure(job, [&](std::size_t e, std::size_t p, double raw) {
        collected[e * cube.n_paths() + p] = raw;
    });
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        const auto slice = cube.raw_slice(d);
        for (std::size_t p = 0; p < cube.n_paths(); ++p)
            CHECK(collected[d * cube.n_paths() + p] == slice[p]);
    }
}
