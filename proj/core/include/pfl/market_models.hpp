#pragma once

#include "pfl/time_grid.hpp"

#include <cstdint>
#include <random>
#include <span>
#include <variant>
#include <vector>

namespace pfl {

// Geometric Brownian motion, exact lognormal transitions.
struct GbmSpec {
    double spot = 100.0;          // currency
    double drift = 0.0;           // 1/year
    double vol = 0.2;             // 1/sqrt(year)
    bool operator==(const GbmSpec&) const = default;
};

// One-factor Gaussian short rate (Ornstein-Uhlenbeck) reverting to the
// initial flat zero rate: dr = a (r0 - r) dt + vol dW, r(0) = r0.
struct ShortRate1FSpec {
    double mean_reversion = 0.05; // 1/year, >= 0
    double vol = 0.01;            // 1/sqrt(year)
    double initial_rate = 0.02;   // 1/year, flat zero rate at t = 0
    bool operator==(const ShortRate1FSpec&) const = default;
};

using ModelSpec = std::variant<GbmSpec, ShortRate1FSpec>;

bool is_gbm(const ModelSpec& m);
bool is_short_rate(const ModelSpec& m);

// Throws ConfigError when invariants are violated (vol > 0, GBM spot > 0,
// mean reversion >= 0).
void validate_model(const ModelSpec& m);

enum class Discounting { None, InverseZeroCurve };

struct MeasureConfig {
    Discounting discounting = Discounting::None;
    bool operator==(const MeasureConfig&) const = default;
};

// Deterministic per-path normal stream: engine seeded from (seed, path
// index) via splitmix64, normals through the inverse CDF so the sequence
// does not depend on the standard library's normal_distribution.
class PathRng {
public:
    PathRng(std::uint64_t seed, std::uint64_t path_index);
    double next_normal();

private:
    std::mt19937_64 engine_;
};

// Seeded matrix of simulated model states over a time grid, path-major.
class PathSet {
public:
    PathSet(ModelSpec model, TimeGrid grid, std::uint64_t seed, std::size_t n_paths,
            std::vector<double> states);

    const ModelSpec& model() const { return model_; }
    const TimeGrid& grid() const { return grid_; }
    std::uint64_t seed() const { return seed_; }
    std::size_t n_paths() const { return n_paths_; }
    std::size_t n_dates() const { return grid_.size(); }

    std::span<const double> path(std::size_t p) const {
        return {states_.data() + p * grid_.size(), grid_.size()};
    }
    double state(std::size_t p, std::size_t date_index) const {
        return states_[p * grid_.size() + date_index];
    }

private:
    ModelSpec model_;
    TimeGrid grid_;
    std::uint64_t seed_ = 0;
    std::size_t n_paths_ = 0;
    std::vector<double> states_; // n_paths x n_dates
};

// Exact-transition sampling (lognormal step for GBM, Gaussian OU step for
// the short rate), one RNG stream per path. Deterministic under a fixed
// (model, grid, seed, n_paths) regardless of threading.
PathSet generate_paths(const ModelSpec& model, const TimeGrid& grid, std::size_t n_paths,
                       std::uint64_t seed, bool antithetic = false);

// Fills `out` (row-major, (path_end-path_begin) x grid.size()) with the same
// states generate_paths would produce for those path indices. Lets callers
// stream large runs in blocks without materializing every path.
void generate_path_block(const ModelSpec& model, const TimeGrid& grid, std::size_t path_begin,
                         std::size_t path_end, std::uint64_t seed, bool antithetic,
                         std::span<double> out);

// One exact transition over dt years given a standard normal z; stress
// scales the volatility.
double conditional_step(const ModelSpec& model, double state, double dt, double z,
                        double stress = 1.0);

// q-quantile of the model state at (t + horizon) conditional on the current
// state, with volatility scaled by stress. Exact closed form for both
// variants.
double conditional_value_quantile(const ModelSpec& model, double state, double horizon, double q,
                                  double stress = 1.0);

// Unconditional mean and standard deviation of the state at t (from t = 0).
double state_mean(const ModelSpec& model, double t);
double state_stddev(const ModelSpec& model, double t);

// Standardized model shock (state - mean)/sd at t; 0 at t = 0. Drives the
// correlated-LGD loading.
double standardized_shock(const ModelSpec& model, double state, double t);

// Zero-coupon bond price P(tau; r) under the short-rate model, affine
// closed form with reversion level = initial rate.
double zcb_price(const ShortRate1FSpec& m, double tau, double r);

// Deterministic inverse-discount factor for the configured measure
// (exp(r0 t) under the short-rate model; 1 when discounting is None).
// Throws ConfigError for InverseZeroCurve on a GBM model.
double inverse_discount_factor(const ModelSpec& model, const MeasureConfig& measure, double t);

} // namespace pfl
