#include "pfl/collateral.hpp"

#include "pfl/errors.hpp"
#include "pfl/math.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace pfl {

void validate_csa(const CSATerms& csa) {
    if (csa.threshold < 0.0 || csa.mta < 0.0 || csa.independent_amount < 0.0)
        throw ConfigError("csa amounts must be >= 0");
    if (csa.call_frequency_days < 1) throw ConfigError("csa call frequency must be >= 1 day");
    if (csa.mpor_days < csa.call_frequency_days)
        throw ConfigError("csa mpor must be >= call frequency");
}

std::vector<ScheduleBucket> default_schedule_table() {
    return {{0.0, 2.0, 0.01}, {2.0, 5.0, 0.02}, {5.0, std::numeric_limits<double>::infinity(), 0.04}};
}

void validate_im(const IMTerms& terms) {
    if (terms.mode == IMMode::Schedule) {
        if (terms.schedule.empty()) throw ConfigError("schedule IM requires a bucket table");
        for (const auto& b : terms.schedule) {
            if (b.percent < 0.0) throw ConfigError("schedule IM percentages must be >= 0");
            if (!(b.high_years > b.low_years)) throw ConfigError("schedule IM bucket is empty");
        }
    } else if (terms.mode == IMMode::Quantile) {
        if (!(terms.q > 0.0 && terms.q < 1.0)) throw ConfigError("quantile IM q must lie in (0, 1)");
        if (terms.horizon_days < 1) throw ConfigError("quantile IM horizon must be >= 1 day");
        if (!(terms.stress_multiplier >= 1.0))
            throw ConfigError("quantile IM stress multiplier must be >= 1");
    }
}

int PartyDeltas::of(FlowKind kind) const {
    switch (kind) {
    case FlowKind::TF: return tf;
    case FlowKind::CSA: return csa;
    case FlowKind::SF: return sf;
    case FlowKind::IM: return im;
    }
    return 0;
}

DeltaVector classical_plus_deltas(int mpor_days) {
    DeltaVector d;
    d.bank = {0, mpor_days, 0, mpor_days};
    d.counterparty = {mpor_days, mpor_days, mpor_days, mpor_days};
    return d;
}

void validate_deltas(const DeltaVector& deltas, int mpor_days) {
    for (const auto* p : {&deltas.bank, &deltas.counterparty}) {
        for (int v : {p->tf, p->csa, p->sf, p->im}) {
            if (v < 0 || v > mpor_days)
                throw ConfigError("delta offsets must lie in [0, mpor]");
        }
    }
}

double vm_balance(double portfolio_value, const CSATerms& csa, double prior_balance) {
    const double sign = portfolio_value >= 0.0 ? 1.0 : -1.0;
    const double target =
        sign * std::max(std::fabs(portfolio_value) - csa.threshold, 0.0) + csa.independent_amount;
    if (std::fabs(target - prior_balance) >= csa.mta) return target;
    return prior_balance;
}

std::vector<double> vm_balance_path(std::span<const double> values, const CSATerms& csa) {
    std::vector<double> balances(values.size());
    double balance = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        balance = vm_balance(values[i], csa, balance);
        balances[i] = balance;
    }
    return balances;
}

double im_schedule(const Portfolio& portfolio, const IMTerms& terms, double t) {
    if (terms.mode != IMMode::Schedule) throw ConfigError("im_schedule requires schedule mode");
    double total = 0.0;
    for (const auto& trade : portfolio.trades) {
        const auto* swap = std::get_if<SwapSpec>(&trade);
        if (!swap) throw ConfigError("schedule IM is defined for swap trades only");
        const double remaining = days_to_years(swap->maturity_day) - t;
        if (remaining <= 0.0) continue;
        const auto it = std::find_if(terms.schedule.begin(), terms.schedule.end(),
                                     [&](const ScheduleBucket& b) {
                                         return remaining > b.low_years && remaining <= b.high_years;
                                     });
        if (it == terms.schedule.end())
            throw ConfigError("schedule IM table has no bucket for remaining maturity " +
                              std::to_string(remaining));
        total += swap->notional * it->percent;
    }
    return total;
}

namespace {

bool portfolio_monotone_over(const ModelSpec& model, const Portfolio& portfolio,
                             const PathView& path, std::size_t date_index, double horizon,
                             double lo, double hi, int points) {
    double prev = value_at_horizon(portfolio, model, path, date_index, horizon, lo);
    int dir = 0;
    for (int k = 1; k < points; ++k) {
        const double s = lo + (hi - lo) * k / (points - 1);
        const double v = value_at_horizon(portfolio, model, path, date_index, horizon, s);
        if (v > prev) {
            if (dir < 0) return false;
            dir = 1;
        } else if (v < prev) {
            if (dir > 0) return false;
            dir = -1;
        }
        prev = v;
    }
    return true;
}

} // namespace

double im_quantile_with_hint(const ModelSpec& model, const Portfolio& portfolio,
                             const PathView& path, std::size_t date_index, const IMTerms& terms,
                             std::optional<bool> monotone_hint) {
    if (terms.mode != IMMode::Quantile) throw ConfigError("im_quantile requires quantile mode");
    const double h = days_to_years(terms.horizon_days);
    const double state = path.state_at(date_index);
    const double v_now = value(portfolio, model, path, date_index);

    const double s_up = conditional_value_quantile(model, state, h, terms.q, terms.stress_multiplier);
    const double s_dn =
        conditional_value_quantile(model, state, h, 1.0 - terms.q, terms.stress_multiplier);

    const bool monotone =
        monotone_hint.value_or(portfolio_monotone_over(model, portfolio, path, date_index, h,
                                                       std::min(s_dn, s_up), std::max(s_dn, s_up), 7));
    if (monotone) {
        // For a monotone portfolio the q-quantile of the value change is
        // attained at one of the two state quantiles (q > 1/2).
        const double v_up = value_at_horizon(portfolio, model, path, date_index, h, s_up);
        const double v_dn = value_at_horizon(portfolio, model, path, date_index, h, s_dn);
        return std::max(0.0, std::max(v_up, v_dn) - v_now);
    }

    // Stratified nested revaluation, deterministic by construction.
    constexpr int n = 1000;
    std::vector<double> changes(n);
    for (int j = 0; j < n; ++j) {
        const double z = inverse_norm_cdf((j + 0.5) / n);
        const double s = conditional_step(model, state, h, z, terms.stress_multiplier);
        changes[j] = value_at_horizon(portfolio, model, path, date_index, h, s) - v_now;
    }
    std::sort(changes.begin(), changes.end());
    return std::max(0.0, changes[quantile_index(terms.q, n) - 1]);
}

double im_quantile(const ModelSpec& model, const Portfolio& portfolio, const PathView& path,
                   std::size_t date_index, const IMTerms& terms) {
    return im_quantile_with_hint(model, portfolio, path, date_index, terms, std::nullopt);
}

double im_at(const ModelSpec& model, const Portfolio& portfolio, const PathView& path,
             std::size_t date_index, const IMTerms& terms) {
    switch (terms.mode) {
    case IMMode::None: return 0.0;
    case IMMode::Schedule: return im_schedule(portfolio, terms, path.grid->year(date_index));
    case IMMode::Quantile: return im_quantile(model, portfolio, path, date_index, terms);
    }
    return 0.0;
}

double conditional_exposure_from_values(const Portfolio& portfolio, const ModelSpec& model,
                                        const PathView& path, std::size_t date_index,
                                        const std::optional<CSATerms>& csa, const IMTerms& im_terms,
                                        const DeltaVector& deltas,
                                        std::span<const double> values,
                                        std::span<const double> vm_balances,
                                        std::optional<bool> im_monotone_hint) {
    const double v_t = values[date_index];
    if (!csa) return v_t; // uncollateralized reduction

    const int t_day = path.grid->day(date_index);
    const int lookback_day = t_day - csa->mpor_days;

    double vm = 0.0;
    double im = 0.0;
    if (lookback_day >= 0) {
        const auto j = path.grid->index_of_day(lookback_day);
        if (!j)
            throw ConfigError("grid is missing the t - mpor companion of day " +
                              std::to_string(t_day));
        vm = vm_balances[*j];
        if (im_terms.mode == IMMode::Quantile)
            im = im_quantile_with_hint(model, portfolio, path, *j, im_terms, im_monotone_hint);
        else
            im = im_at(model, portfolio, path, *j, im_terms);
    }

    double flow_adjust = 0.0;
    for (const auto& flow : flows_in_window(portfolio, model, lookback_day, t_day, path)) {
        if (csa->flow_netting && flow.kind == FlowKind::TF) {
            // Netted with the same-date collateral transfer: the package
            // settles, the balance absorbs the flow.
            flow_adjust += flow.amount;
            continue;
        }
        const PartyDeltas& payer = flow.amount >= 0.0 ? deltas.counterparty : deltas.bank;
        const bool paid = flow.day <= t_day - payer.of(flow.kind);
        if (!paid) flow_adjust += flow.amount;
    }

    return v_t - vm - im + flow_adjust;
}

double conditional_exposure(const Portfolio& portfolio, const ModelSpec& model,
                            const PathView& path, std::size_t date_index,
                            const std::optional<CSATerms>& csa, const IMTerms& im_terms,
                            const DeltaVector& deltas) {
    std::vector<double> values(path.grid->size());
    for (std::size_t i = 0; i < values.size(); ++i)
        values[i] = value(portfolio, model, path, i);
    std::vector<double> balances;
    if (csa) balances = vm_balance_path(values, *csa);
    return conditional_exposure_from_values(portfolio, model, path, date_index, csa, im_terms,
                                            deltas, values, balances);
}

} // namespace pfl
