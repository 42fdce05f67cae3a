#pragma once

#include "pfl/collateral.hpp"
#include "pfl/instruments.hpp"
#include "pfl/market_models.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pfl {

// Per-date, per-path conditional-on-default portfolio values, before and
// after flooring at zero. Date-major storage so metric code reads one
// contiguous slice per date.
class ExposureCube {
public:
    ExposureCube(TimeGrid grid, std::size_t n_paths, std::uint64_t seed, std::string scenario_hash,
                 bool with_shocks);

    const TimeGrid& grid() const { return grid_; }
    std::size_t n_dates() const { return grid_.size(); }
    std::size_t n_paths() const { return n_paths_; }
    std::uint64_t seed() const { return seed_; }
    const std::string& scenario_hash() const { return scenario_hash_; }
    bool has_shocks() const { return !shocks_.empty(); }

    std::span<const double> raw_slice(std::size_t date_index) const {
        return {raw_.data() + date_index * n_paths_, n_paths_};
    }
    std::span<const double> floored_slice(std::size_t date_index) const {
        return {floored_.data() + date_index * n_paths_, n_paths_};
    }
    std::span<const double> shock_slice(std::size_t date_index) const {
        return {shocks_.data() + date_index * n_paths_, n_paths_};
    }

    void set(std::size_t date_index, std::size_t path, double raw_value, double shock = 0.0);

private:
    TimeGrid grid_;
    std::size_t n_paths_ = 0;
    std::uint64_t seed_ = 0;
    std::string scenario_hash_;
    std::vector<double> raw_;
    std::vector<double> floored_;
    std::vector<double> shocks_;
};

struct ExposureJob {
    ModelSpec model;
    MeasureConfig measure;
    TimeGrid sim_grid;          // evaluation dates plus t - mpor companions
    std::vector<std::size_t> eval_indices; // positions of eval dates in sim_grid
    Portfolio portfolio;
    std::optional<CSATerms> csa;
    IMTerms im_terms;
    DeltaVector deltas;
    std::size_t n_paths = 0;
    std::uint64_t seed = 0;
    bool antithetic = false;
    bool with_shocks = false;
    std::string scenario_hash;
    std::size_t block_size = 8192;
    unsigned threads = 0; // 0 = hardware concurrency
};

// Evaluation grid = sim grid restricted to eval_indices.
TimeGrid eval_grid_of(const ExposureJob& job);

// Builds the cube by streaming path blocks: simulate a block on the sim
// grid, run the VM recursion and exposure bridge per path, write the eval
// rows, drop the block. Deterministic under a fixed seed for any block size
// or thread count.
ExposureCube build_exposure_cube(const ExposureJob& job);

// Spec-level entry: exposures from an existing PathSet (whose grid is the
// sim grid). Produces the same cube as the streaming builder for equal
// (model, grid, seed, n_paths).
ExposureCube build_exposure_cube(const PathSet& paths, const std::vector<std::size_t>& eval_indices,
                                 const Portfolio& portfolio, const std::optional<CSATerms>& csa,
                                 const IMTerms& im_terms, const DeltaVector& deltas,
                                 const MeasureConfig& measure = {},
                                 const std::string& scenario_hash = {});

// Streaming fold over exposures without materializing a cube: visit(date
// index in eval grid, path index, raw exposure) is called for every (eval
// date, path). Visitor must be thread-safe across path blocks.
void for_each_exposure(const ExposureJob& job,
                       const std::function<void(std::size_t, std::size_t, double)>& visit);

// Binary cube dump, little-endian: magic "PFLC", u32 version, u32 n_dates,
// u64 n_paths, u64 seed, then n_dates f64 grid years, then the raw and
// floored matrices (date-major f64).
void dump_cube(const ExposureCube& cube, const std::string& path);
ExposureCube load_cube(const std::string& path);

} // namespace pfl
