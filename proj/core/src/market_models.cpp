#include "pfl/market_models.hpp"

#include "pfl/errors.hpp"
#include "pfl/math.hpp"

#include <cmath>
#include <string>

namespace pfl {

namespace {

// Mean-reversion below this gets the a -> 0 series expansions.
constexpr double kTinyReversion = 1e-8;

// B(tau) = (1 - e^{-a tau})/a, stable near a = 0.
double affine_b(double a, double tau) {
    if (a < kTinyReversion) return tau * (1.0 - 0.5 * a * tau + a * a * tau * tau / 6.0);
    return -std::expm1(-a * tau) / a;
}

// ln A(tau) for the Vasicek bond with theta = r0.
double affine_log_a(const ShortRate1FSpec& m, double tau) {
    const double a = m.mean_reversion;
    const double s2 = m.vol * m.vol;
    if (a < kTinyReversion) {
        // Merton limit: P = exp(-r tau + s^2 tau^3 / 6) with theta terms vanishing.
        return s2 * tau * tau * tau / 6.0 - m.initial_rate * (affine_b(a, tau) - tau);
    }
    const double b = affine_b(a, tau);
    return (b - tau) * (m.initial_rate - 0.5 * s2 / (a * a)) - 0.25 * s2 * b * b / a;
}

struct OuMoments {
    double decay;  // e^{-a dt}
    double stddev; // conditional sd over dt
};

OuMoments ou_step_moments(const ShortRate1FSpec& m, double dt, double stress) {
    const double a = m.mean_reversion;
    const double vol = m.vol * stress;
    double decay, var;
    if (a < kTinyReversion) {
        decay = 1.0 - a * dt;
        var = vol * vol * dt;
    } else {
        decay = std::exp(-a * dt);
        var = vol * vol * (1.0 - decay * decay) / (2.0 * a);
    }
    return {decay, std::sqrt(var)};
}

} // namespace

bool is_gbm(const ModelSpec& m) { return std::holds_alternative<GbmSpec>(m); }
bool is_short_rate(const ModelSpec& m) { return std::holds_alternative<ShortRate1FSpec>(m); }

void validate_model(const ModelSpec& m) {
    if (const auto* g = std::get_if<GbmSpec>(&m)) {
        if (!(g->vol >= 0.0)) throw ConfigError("gbm vol must be >= 0");
        if (!(g->spot > 0.0)) throw ConfigError("gbm spot must be > 0");
    } else {
        const auto& s = std::get<ShortRate1FSpec>(m);
        if (!(s.vol >= 0.0)) throw ConfigError("short rate vol must be >= 0");
        if (!(s.mean_reversion >= 0.0)) throw ConfigError("mean reversion must be >= 0");
    }
}

PathRng::PathRng(std::uint64_t seed, std::uint64_t path_index) {
    std::uint64_t state = seed;
    splitmix64(state);
    state += path_index;
    engine_.seed(splitmix64(state));
}

double PathRng::next_normal() {
    // 53-bit uniform strictly inside (0, 1), then inverse CDF.
    const double u = (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
    return inverse_norm_cdf(u);
}

PathSet::PathSet(ModelSpec model, TimeGrid grid, std::uint64_t seed, std::size_t n_paths,
                 std::vector<double> states)
    : model_(std::move(model)), grid_(std::move(grid)), seed_(seed), n_paths_(n_paths),
      states_(std::move(states)) {
    if (states_.size() != n_paths_ * grid_.size())
        throw ConfigError("path set state matrix does not match n_paths x n_dates");
}

double conditional_step(const ModelSpec& model, double state, double dt, double z,
                        double stress) {
    if (const auto* g = std::get_if<GbmSpec>(&model)) {
        const double vol = g->vol * stress;
        return state * std::exp((g->drift - 0.5 * vol * vol) * dt + vol * std::sqrt(dt) * z);
    }
    const auto& m = std::get<ShortRate1FSpec>(model);
    const auto mom = ou_step_moments(m, dt, stress);
    return m.initial_rate + (state - m.initial_rate) * mom.decay + mom.stddev * z;
}

void generate_path_block(const ModelSpec& model, const TimeGrid& grid, std::size_t path_begin,
                         std::size_t path_end, std::uint64_t seed, bool antithetic,
                         std::span<double> out) {
    validate_model(model);
    if (grid.empty()) throw ConfigError("generate_paths: empty grid");
    const std::size_t n_dates = grid.size();
    if (out.size() != (path_end - path_begin) * n_dates)
        throw ConfigError("generate_path_block: output buffer size mismatch");

    const double initial =
        is_gbm(model) ? std::get<GbmSpec>(model).spot : std::get<ShortRate1FSpec>(model).initial_rate;

    for (std::size_t p = path_begin; p < path_end; ++p) {
        // Antithetic pairs share a stream; odd paths mirror the normals.
        const std::uint64_t stream = antithetic ? p / 2 : p;
        const double sign = (antithetic && (p % 2 == 1)) ? -1.0 : 1.0;
        PathRng rng(seed, stream);

        double* row = out.data() + (p - path_begin) * n_dates;
        double state = initial;
        double t_prev = 0.0;
        std::size_t i = 0;
        if (grid.day(0) == 0) {
            row[0] = state;
            i = 1;
        }
        for (; i < n_dates; ++i) {
            const double t = grid.year(i);
            state = conditional_step(model, state, t - t_prev, sign * rng.next_normal());
            row[i] = state;
            t_prev = t;
        }
    }
}

PathSet generate_paths(const ModelSpec& model, const TimeGrid& grid, std::size_t n_paths,
                       std::uint64_t seed, bool antithetic) {
    if (n_paths < 1) throw ConfigError("generate_paths: n_paths must be >= 1");
    std::vector<double> states(n_paths * grid.size());
    generate_path_block(model, grid, 0, n_paths, seed, antithetic, states);
    return PathSet(model, grid, seed, n_paths, std::move(states));
}

double conditional_value_quantile(const ModelSpec& model, double state, double horizon, double q,
                                  double stress) {
    if (!(horizon > 0.0)) throw InputError("conditional_value_quantile: horizon must be > 0");
    if (!(q > 0.0 && q < 1.0)) throw InputError("conditional_value_quantile: q must lie in (0, 1)");
    if (!(stress >= 1.0)) throw InputError("conditional_value_quantile: stress must be >= 1");

    if (const auto* g = std::get_if<GbmSpec>(&model)) {
        const double vol = g->vol * stress;
        if (vol == 0.0) return state * std::exp(g->drift * horizon);
        const double z = inverse_norm_cdf(q);
        return state * std::exp((g->drift - 0.5 * vol * vol) * horizon +
                                vol * std::sqrt(horizon) * z);
    }
    const auto& m = std::get<ShortRate1FSpec>(model);
    const auto mom = ou_step_moments(m, horizon, stress);
    const double mean = m.initial_rate + (state - m.initial_rate) * mom.decay;
    if (mom.stddev == 0.0) return mean;
    return mean + mom.stddev * inverse_norm_cdf(q);
}

double state_mean(const ModelSpec& model, double t) {
    if (const auto* g = std::get_if<GbmSpec>(&model)) return g->spot * std::exp(g->drift * t);
    // OU with reversion level = initial rate: the mean stays at r0.
    return std::get<ShortRate1FSpec>(model).initial_rate;
}

double state_stddev(const ModelSpec& model, double t) {
    if (t <= 0.0) return 0.0;
    if (const auto* g = std::get_if<GbmSpec>(&model)) {
        const double v = g->vol * g->vol * t;
        return g->spot * std::exp(g->drift * t) * std::sqrt(std::expm1(v));
    }
    const auto& m = std::get<ShortRate1FSpec>(model);
    return ou_step_moments(m, t, 1.0).stddev;
}

double standardized_shock(const ModelSpec& model, double state, double t) {
    if (t <= 0.0) return 0.0;
    if (const auto* g = std::get_if<GbmSpec>(&model)) {
        if (g->vol == 0.0) return 0.0;
        const double mu = (g->drift - 0.5 * g->vol * g->vol) * t;
        return (std::log(state / g->spot) - mu) / (g->vol * std::sqrt(t));
    }
    const auto& m = std::get<ShortRate1FSpec>(model);
    const double sd = state_stddev(model, t);
    if (sd == 0.0) return 0.0;
    return (state - m.initial_rate) / sd;
}

double zcb_price(const ShortRate1FSpec& m, double tau, double r) {
    if (tau <= 0.0) return 1.0;
    return std::exp(affine_log_a(m, tau) - affine_b(m.mean_reversion, tau) * r);
}

double inverse_discount_factor(const ModelSpec& model, const MeasureConfig& measure, double t) {
    if (measure.discounting == Discounting::None) return 1.0;
    if (const auto* s = std::get_if<ShortRate1FSpec>(&model))
        return std::exp(s->initial_rate * t);
    throw ConfigError("inverse zero-curve discounting requires the short-rate model");
}

} // namespace pfl
