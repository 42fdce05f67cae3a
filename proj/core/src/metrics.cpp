#include "pfl/metrics.hpp"

#include "pfl/errors.hpp"
#include "pfl/math.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace pfl {

void validate_lgd(const LGDModel& lgd) {
    if (const auto* c = std::get_if<ConstantLgd>(&lgd)) {
        if (c->lgd < 0.0 || c->lgd > 1.0) throw ConfigError("lgd must lie in [0, 1]");
    } else if (const auto* ts = std::get_if<TermStructureLgd>(&lgd)) {
        if (ts->points.empty()) throw ConfigError("term-structure lgd needs at least one point");
        double prev = -1.0;
        for (const auto& [t, l] : ts->points) {
            if (t <= prev) throw ConfigError("term-structure lgd times must be increasing");
            if (l < 0.0 || l > 1.0) throw ConfigError("lgd must lie in [0, 1]");
            prev = t;
        }
    } else {
        const auto& c = std::get<CorrelatedLgd>(lgd);
        if (c.base < 0.0 || c.base > 1.0) throw ConfigError("base lgd must lie in [0, 1]");
    }
}

double lgd_value(const LGDModel& lgd, double t, double shock) {
    if (const auto* c = std::get_if<ConstantLgd>(&lgd)) return c->lgd;
    if (const auto* ts = std::get_if<TermStructureLgd>(&lgd)) {
        double v = ts->points.front().second;
        for (const auto& [pt, pl] : ts->points) {
            if (pt <= t) v = pl;
            else break;
        }
        return v;
    }
    const auto& c = std::get<CorrelatedLgd>(lgd);
    return std::clamp(c.base + c.beta * shock, 0.0, 1.0);
}

std::optional<double> deterministic_lgd(const LGDModel& lgd, double t) {
    if (std::holds_alternative<CorrelatedLgd>(lgd)) return std::nullopt;
    return lgd_value(lgd, t, 0.0);
}

double CreditCurve::survival(double t) const { return std::exp(-hazard() * t); }

void validate_credit_curve(const CreditCurve& curve) {
    if (curve.cds_spread < 0.0) throw ConfigError("cds spread must be >= 0");
    if (!(curve.lgd > 0.0 && curve.lgd <= 1.0)) throw ConfigError("credit curve lgd must lie in (0, 1]");
}

double ProtectionProfile::at(double t) const {
    double y = 0.0;
    for (const auto& [maturity, amount] : positions)
        if (t <= maturity) y += amount;
    return y;
}

bool ProtectionProfile::is_zero() const {
    return std::all_of(positions.begin(), positions.end(),
                       [](const auto& p) { return p.second == 0.0; });
}

ProtectionProfile protection_profile(double cds_notional, double cds_maturity, double lgd) {
    if (cds_notional < 0.0) throw ConfigError("cds notional must be >= 0");
    if (lgd < 0.0 || lgd > 1.0) throw ConfigError("cds lgd must lie in [0, 1]");
    return ProtectionProfile{{{cds_maturity, lgd * cds_notional}}};
}

ProtectionProfile combine(const std::vector<ProtectionProfile>& profiles) {
    ProtectionProfile out;
    for (const auto& p : profiles)
        out.positions.insert(out.positions.end(), p.positions.begin(), p.positions.end());
    std::sort(out.positions.begin(), out.positions.end());
    return out;
}

std::string metric_name(MetricKind kind) {
    switch (kind) {
    case MetricKind::PFE: return "pfe";
    case MetricKind::PFL: return "pfl";
    case MetricKind::aPFL: return "apfl";
    case MetricKind::paPFL: return "papfl";
    }
    return "pfe";
}

MetricKind metric_from_name(const std::string& name) {
    if (name == "pfe") return MetricKind::PFE;
    if (name == "pfl") return MetricKind::PFL;
    if (name == "apfl") return MetricKind::aPFL;
    if (name == "papfl") return MetricKind::paPFL;
    throw ConfigError("unknown metric '" + name + "'");
}

namespace {

void check_samples(std::span<const double> samples, double q, const char* op) {
    if (samples.empty()) throw InputError(std::string(op) + ": empty sample set");
    if (!(q > 0.0 && q < 1.0)) throw InputError(std::string(op) + ": q must lie in (0, 1)");
}

// Mean of sorted[n-m..n), summed in ascending order.
double tail_mean(const std::vector<double>& sorted, std::size_t m) {
    double sum = 0.0;
    for (std::size_t i = sorted.size() - m; i < sorted.size(); ++i) sum += sorted[i];
    return sum / static_cast<double>(m);
}

} // namespace

double empirical_quantile(std::span<const double> samples, double q) {
    check_samples(samples, q, "empirical_quantile");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted[quantile_index(q, sorted.size()) - 1];
}

double expected_shortfall(std::span<const double> samples, double q) {
    check_samples(samples, q, "expected_shortfall");
    std::vector<double> sorted(samples.begin(), samples.end());
    std::sort(sorted.begin(), sorted.end());
    return tail_mean(sorted, quantile_index(1.0 - q, sorted.size()));
}

Profile pfe_profile(const ExposureCube& cube, double q) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("pfe_profile: q must lie in (0, 1)");
    Profile prof{cube.grid(), {}, MetricKind::PFE, q, ""};
    prof.values.reserve(cube.n_dates());
    std::vector<double> slice(cube.n_paths());
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        const auto src = cube.floored_slice(d);
        slice.assign(src.begin(), src.end());
        std::sort(slice.begin(), slice.end());
        prof.values.push_back(slice[quantile_index(q, slice.size()) - 1]);
    }
    return prof;
}

namespace {

struct LossKernelInput {
    const ExposureCube& cube;
    const LGDModel& lgd;
    double q;
};

// ES per date of max(lgd x raw - x(t) - y(t), 0). The general route; the
// deterministic-LGD zero-adjustment case is handled by the scaled route in
// pfl_profile so the independence factorization is exact.
std::vector<double> adjusted_loss_es(const LossKernelInput& in, std::span<const double> x_per_date,
                                     const ProtectionProfile& y) {
    const auto& cube = in.cube;
    const bool needs_shocks = std::holds_alternative<CorrelatedLgd>(in.lgd);
    if (needs_shocks && !cube.has_shocks())
        throw ConfigError("correlated LGD requires a cube built with shocks");

    std::vector<double> values;
    values.reserve(cube.n_dates());
    std::vector<double> losses(cube.n_paths());
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        const double t = cube.grid().year(d);
        const double adj = (x_per_date.empty() ? 0.0 : x_per_date[d]) + y.at(t);
        const auto raw = cube.raw_slice(d);
        const auto det = deterministic_lgd(in.lgd, t);
        if (det) {
            for (std::size_t p = 0; p < raw.size(); ++p)
                losses[p] = std::max(*det * raw[p] - adj, 0.0);
        } else {
            const auto shocks = cube.shock_slice(d);
            for (std::size_t p = 0; p < raw.size(); ++p)
                losses[p] = std::max(lgd_value(in.lgd, t, shocks[p]) * raw[p] - adj, 0.0);
        }
        std::sort(losses.begin(), losses.end());
        values.push_back(tail_mean(losses, quantile_index(1.0 - in.q, losses.size())));
    }
    return values;
}

std::string lgd_description(const LGDModel& lgd) {
    if (const auto* c = std::get_if<ConstantLgd>(&lgd))
        return "constant " + std::to_string(c->lgd);
    if (std::holds_alternative<TermStructureLgd>(lgd)) return "term structure";
    const auto& c = std::get<CorrelatedLgd>(lgd);
    return "correlated base " + std::to_string(c.base) + " beta " + std::to_string(c.beta);
}

} // namespace

Profile pfl_profile(const ExposureCube& cube, const LGDModel& lgd, double q) {
    if (!(q > 0.0 && q < 1.0)) throw InputError("pfl_profile: q must lie in (0, 1)");
    validate_lgd(lgd);
    Profile prof{cube.grid(), {}, MetricKind::PFL, q, lgd_description(lgd)};
    prof.values.reserve(cube.n_dates());

    if (std::holds_alternative<CorrelatedLgd>(lgd)) {
        prof.values = adjusted_loss_es({cube, lgd, q}, {}, ProtectionProfile{});
        return prof;
    }

    // Deterministic LGD factors out of the tail mean: scale the unit-LGD ES
    // so constant-LGD PFL equals lgd x unit-LGD PFL exactly.
    std::vector<double> slice(cube.n_paths());
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        const double l = *deterministic_lgd(lgd, cube.grid().year(d));
        const auto src = cube.floored_slice(d);
        slice.assign(src.begin(), src.end());
        std::sort(slice.begin(), slice.end());
        prof.values.push_back(l * tail_mean(slice, quantile_index(1.0 - q, slice.size())));
    }
    return prof;
}

Profile apfl_profile(const ExposureCube& cube, const LGDModel& lgd, const IncurredCVA& x,
                     double q) {
    if (x.x < 0.0) throw InputError("apfl_profile: incurred CVA must be >= 0");
    if (x.x == 0.0) {
        // Exact reduction: identical code path as PFL.
        Profile prof = pfl_profile(cube, lgd, q);
        prof.kind = MetricKind::aPFL;
        return prof;
    }
    validate_lgd(lgd);
    Profile prof{cube.grid(), {}, MetricKind::aPFL, q, lgd_description(lgd)};
    std::vector<double> xs(cube.n_dates(), x.x);
    prof.values = adjusted_loss_es({cube, lgd, q}, xs, ProtectionProfile{});
    return prof;
}

Profile papfl_profile(const ExposureCube& cube, const LGDModel& lgd, const IncurredCVA& x,
                      const ProtectionProfile& y, double q) {
    if (y.is_zero()) {
        Profile prof = apfl_profile(cube, lgd, x, q);
        prof.kind = MetricKind::paPFL;
        return prof;
    }
    if (x.x < 0.0) throw InputError("papfl_profile: incurred CVA must be >= 0");
    validate_lgd(lgd);
    Profile prof{cube.grid(), {}, MetricKind::paPFL, q, lgd_description(lgd)};
    std::vector<double> xs(cube.n_dates(), x.x);
    prof.values = adjusted_loss_es({cube, lgd, q}, xs, y);
    return prof;
}

Profile apfl_profile_with_schedule(const ExposureCube& cube, const LGDModel& lgd,
                                   std::span<const double> x_per_date, double q) {
    if (x_per_date.size() != cube.n_dates())
        throw InputError("apfl schedule length must match the cube grid");
    validate_lgd(lgd);
    Profile prof{cube.grid(), {}, MetricKind::aPFL, q, lgd_description(lgd)};
    prof.values = adjusted_loss_es({cube, lgd, q}, x_per_date, ProtectionProfile{});
    return prof;
}

Profile papfl_profile_with_schedule(const ExposureCube& cube, const LGDModel& lgd,
                                    std::span<const double> x_per_date,
                                    const ProtectionProfile& y, double q) {
    if (x_per_date.size() != cube.n_dates())
        throw InputError("papfl schedule length must match the cube grid");
    validate_lgd(lgd);
    Profile prof{cube.grid(), {}, MetricKind::paPFL, q, lgd_description(lgd)};
    prof.values = adjusted_loss_es({cube, lgd, q}, x_per_date, y);
    return prof;
}

std::vector<double> epe_profile(const ExposureCube& cube) {
    std::vector<double> epe(cube.n_dates());
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        const auto slice = cube.floored_slice(d);
        epe[d] = std::accumulate(slice.begin(), slice.end(), 0.0) /
                 static_cast<double>(slice.size());
    }
    return epe;
}

namespace {

// Per-date E[lgd]; for the correlated model the clamped per-path mean.
double mean_lgd_at(const ExposureCube& cube, const LGDModel& lgd, std::size_t d) {
    const double t = cube.grid().year(d);
    if (const auto det = deterministic_lgd(lgd, t)) return *det;
    if (!cube.has_shocks()) throw ConfigError("correlated LGD requires a cube built with shocks");
    const auto shocks = cube.shock_slice(d);
    double sum = 0.0;
    for (double z : shocks) sum += lgd_value(lgd, t, z);
    return sum / static_cast<double>(shocks.size());
}

} // namespace

IncurredCVA incurred_cva(const ExposureCube& cube, const CreditCurve& curve, const LGDModel& lgd) {
    validate_credit_curve(curve);
    validate_lgd(lgd);
    const auto epe = epe_profile(cube);
    double x = 0.0;
    double prev_t = 0.0;
    for (std::size_t d = 0; d < cube.n_dates(); ++d) {
        const double t = cube.grid().year(d);
        x += mean_lgd_at(cube, lgd, d) * epe[d] * (curve.survival(prev_t) - curve.survival(t));
        prev_t = t;
    }
    return IncurredCVA{x};
}

std::vector<double> forward_cva_schedule(const ExposureCube& cube, const CreditCurve& curve,
                                         const LGDModel& lgd) {
    validate_credit_curve(curve);
    validate_lgd(lgd);
    const auto epe = epe_profile(cube);
    const std::size_t n = cube.n_dates();
    std::vector<double> terms(n);
    double prev_t = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
        const double t = cube.grid().year(d);
        terms[d] = mean_lgd_at(cube, lgd, d) * epe[d] * (curve.survival(prev_t) - curve.survival(t));
        prev_t = t;
    }
    // x_i = remaining CVA strictly beyond t_i.
    std::vector<double> schedule(n, 0.0);
    double tail = 0.0;
    for (std::size_t d = n; d-- > 0;) {
        schedule[d] = tail;
        tail += terms[d];
    }
    return schedule;
}

} // namespace pfl
