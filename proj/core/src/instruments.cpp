#include "pfl/instruments.hpp"

#include "pfl/errors.hpp"

#include <algorithm>
#include <cmath>

namespace pfl {

namespace {

double direction_sign(SwapDirection d) {
    return d == SwapDirection::ReceiveFixed ? 1.0 : -1.0;
}

// Simple forward rate fixed at period start: accrual 1/f against the
// model's bond over the period.
double period_fixing(const ShortRate1FSpec& model, const SwapSpec& swap, double r_fix) {
    const double accrual = 1.0 / swap.frequency;
    const double p = zcb_price(model, accrual, r_fix);
    return (1.0 / p - 1.0) / accrual;
}

} // namespace

std::vector<int> SwapSpec::payment_days() const {
    std::vector<int> days;
    const int period = period_days();
    for (int d = start_day + period; d <= maturity_day; d += period) days.push_back(d);
    return days;
}

void validate_portfolio(const Portfolio& portfolio, const ModelSpec& model) {
    if (portfolio.trades.empty()) throw ConfigError("portfolio must not be empty");
    for (const auto& trade : portfolio.trades) {
        if (const auto* swap = std::get_if<SwapSpec>(&trade)) {
            if (!(swap->notional > 0.0)) throw ConfigError("swap notional must be > 0");
            if (swap->start_day < 0) throw ConfigError("swap start must be >= 0");
            if (swap->maturity_day <= swap->start_day)
                throw ConfigError("swap maturity must be after start");
            if (swap->frequency < 1 || kBusinessDaysPerYear % swap->frequency != 0)
                throw ConfigError("swap payment frequency must divide 252 business days");
            if ((swap->maturity_day - swap->start_day) % swap->period_days() != 0)
                throw ConfigError("swap maturity must fall on a payment date");
            if (!is_short_rate(model))
                throw UnsupportedInstrumentError("swaps require the short-rate model");
        } else {
            const auto& fwd = std::get<ForwardSpec>(trade);
            if (fwd.maturity_day <= 0) throw ConfigError("forward maturity must be > 0");
            if (!is_gbm(model))
                throw UnsupportedInstrumentError("forward positions require the GBM model");
        }
    }
}

double PathView::state_at_day(int day) const {
    const auto idx = grid->index_of_day(day);
    if (!idx) throw ConfigError("path grid is missing required day " + std::to_string(day));
    return states[*idx];
}

double par_rate(const ModelSpec& model, int start_day, int maturity_day, int frequency) {
    const auto* m = std::get_if<ShortRate1FSpec>(&model);
    if (!m) throw UnsupportedInstrumentError("par rate requires the short-rate model");
    if (frequency < 1 || kBusinessDaysPerYear % frequency != 0)
        throw ConfigError("swap payment frequency must divide 252 business days");
    if (maturity_day <= start_day) throw ConfigError("swap maturity must be after start");

    const double r0 = m->initial_rate;
    const double accrual = 1.0 / frequency;
    const int period = kBusinessDaysPerYear / frequency;

    double annuity = 0.0;
    double p_last = 1.0;
    for (int d = start_day + period; d <= maturity_day; d += period) {
        p_last = zcb_price(*m, days_to_years(d), r0);
        annuity += accrual * p_last;
    }
    const double p_start = zcb_price(*m, days_to_years(start_day), r0);
    return (p_start - p_last) / annuity;
}

double swap_value(const ShortRate1FSpec& model, const SwapSpec& swap, double t, double r,
                  double r_fix) {
    const double t_start = days_to_years(swap.start_day);
    const double t_mat = days_to_years(swap.maturity_day);
    if (t >= t_mat) return 0.0;

    const double accrual = 1.0 / swap.frequency;
    const int period = swap.period_days();
    const double n = swap.notional;

    double fixed_leg = 0.0;
    double p_mat = 0.0;
    // First payment date strictly after t.
    const int t_day = static_cast<int>(std::llround(t * kBusinessDaysPerYear));
    int first_pay = swap.start_day + period;
    if (t_day >= first_pay) {
        const int k = (t_day - swap.start_day) / period;
        first_pay = swap.start_day + (k + 1) * period;
        if (swap.start_day + k * period == t_day) first_pay = t_day + period;
    }
    for (int d = first_pay; d <= swap.maturity_day; d += period) {
        p_mat = zcb_price(model, days_to_years(d) - t, r);
        fixed_leg += accrual * p_mat;
    }
    fixed_leg *= n * swap.fixed_rate;

    double float_leg;
    if (t < t_start) {
        // Forward-starting: no fixing yet.
        float_leg = n * (zcb_price(model, t_start - t, r) - p_mat);
    } else {
        const double p_next = zcb_price(model, days_to_years(first_pay) - t, r);
        const double fixing = period_fixing(model, swap, r_fix);
        float_leg = n * (fixing * accrual * p_next + p_next - p_mat);
    }

    return direction_sign(swap.direction) * (fixed_leg - float_leg);
}

namespace {

// Pending-period start for a swap at day t (the fixing date), or -1 when the
// swap is forward-starting or expired at t.
int pending_period_start(const SwapSpec& swap, int t_day) {
    if (t_day < swap.start_day || t_day >= swap.maturity_day) return -1;
    const int k = (t_day - swap.start_day) / swap.period_days();
    return swap.start_day + k * swap.period_days();
}

double trade_value(const Trade& trade, const ModelSpec& model, const PathView& path,
                   int t_day, double t, double state) {
    if (const auto* swap = std::get_if<SwapSpec>(&trade)) {
        const auto& m = std::get<ShortRate1FSpec>(model);
        double r_fix = state;
        const int fix_day = pending_period_start(*swap, t_day);
        if (fix_day >= 0 && fix_day != t_day) r_fix = path.state_at_day(fix_day);
        return swap_value(m, *swap, t, state, r_fix);
    }
    const auto& fwd = std::get<ForwardSpec>(trade);
    if (t_day >= fwd.maturity_day) return 0.0;
    return fwd.units * (state - fwd.strike);
}

} // namespace

double value(const Portfolio& portfolio, const ModelSpec& model, const PathView& path,
             std::size_t date_index) {
    const int t_day = path.grid->day(date_index);
    const double t = path.grid->year(date_index);
    const double state = path.state_at(date_index);
    double total = 0.0;
    for (const auto& trade : portfolio.trades)
        total += trade_value(trade, model, path, t_day, t, state);
    return total;
}

double value_at_horizon(const Portfolio& portfolio, const ModelSpec& model, const PathView& path,
                        std::size_t date_index, double horizon, double future_state) {
    const int t_day = path.grid->day(date_index);
    const double t = path.grid->year(date_index) + horizon;
    const int future_day = t_day + static_cast<int>(std::llround(horizon * kBusinessDaysPerYear));

    double total = 0.0;
    for (const auto& trade : portfolio.trades) {
        if (const auto* swap = std::get_if<SwapSpec>(&trade)) {
            const auto& m = std::get<ShortRate1FSpec>(model);
            double r_fix = future_state;
            const int fix_day = pending_period_start(*swap, future_day);
            // Fixings already made on the path are honored; one that falls
            // inside the horizon is read from the candidate future state.
            if (fix_day >= 0 && fix_day <= t_day) r_fix = path.state_at_day(fix_day);
            total += swap_value(m, *swap, t, future_state, r_fix);
        } else {
            const auto& fwd = std::get<ForwardSpec>(trade);
            if (future_day < fwd.maturity_day)
                total += fwd.units * (future_state - fwd.strike);
        }
    }
    return total;
}

std::vector<FlowEvent> flows_in_window(const Portfolio& portfolio, const ModelSpec& model,
                                       int day1, int day2, const PathView& path) {
    if (day1 >= day2) throw InputError("flows_in_window: window must satisfy day1 < day2");
    std::vector<FlowEvent> flows;
    for (const auto& trade : portfolio.trades) {
        if (const auto* swap = std::get_if<SwapSpec>(&trade)) {
            const auto& m = std::get<ShortRate1FSpec>(model);
            const double sign = direction_sign(swap->direction);
            const double accrual = 1.0 / swap->frequency;
            for (int d : swap->payment_days()) {
                if (d <= day1 || d > day2) continue;
                const double fixed_amt = sign * swap->notional * swap->fixed_rate * accrual;
                flows.push_back({d, fixed_amt, FlowKind::TF});
                const double r_fix = path.state_at_day(d - swap->period_days());
                const double float_amt =
                    -sign * swap->notional * period_fixing(m, *swap, r_fix) * accrual;
                flows.push_back({d, float_amt, FlowKind::TF});
            }
        } else {
            const auto& fwd = std::get<ForwardSpec>(trade);
            if (fwd.maturity_day > day1 && fwd.maturity_day <= day2) {
                const double settle =
                    fwd.units * (path.state_at_day(fwd.maturity_day) - fwd.strike);
                flows.push_back({fwd.maturity_day, settle, FlowKind::SF});
            }
        }
    }
    std::stable_sort(flows.begin(), flows.end(),
                     [](const FlowEvent& a, const FlowEvent& b) { return a.day < b.day; });
    return flows;
}

std::vector<int> portfolio_flow_days(const Portfolio& portfolio) {
    std::vector<int> days;
    for (const auto& trade : portfolio.trades) {
        if (const auto* swap = std::get_if<SwapSpec>(&trade)) {
            auto pd = swap->payment_days();
            days.insert(days.end(), pd.begin(), pd.end());
        } else {
            days.push_back(std::get<ForwardSpec>(trade).maturity_day);
        }
    }
    std::sort(days.begin(), days.end());
    days.erase(std::unique(days.begin(), days.end()), days.end());
    return days;
}

int portfolio_end_day(const Portfolio& portfolio) {
    int end = 0;
    for (const auto& trade : portfolio.trades) {
        if (const auto* swap = std::get_if<SwapSpec>(&trade))
            end = std::max(end, swap->maturity_day);
        else
            end = std::max(end, std::get<ForwardSpec>(trade).maturity_day);
    }
    return end;
}

} // namespace pfl
