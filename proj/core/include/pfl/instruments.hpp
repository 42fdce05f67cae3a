#pragma once

#include "pfl/market_models.hpp"
#include "pfl/time_grid.hpp"

#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pfl {

enum class SwapDirection { PayFixed, ReceiveFixed };

// Vanilla fixed/float swap. Both legs share the payment frequency and the
// floating leg fixes at period start from the model curve, so flow amounts
// are path-deterministic within a period.
struct SwapSpec {
    double notional = 0.0;       // currency, > 0
    double fixed_rate = 0.0;     // 1/year
    SwapDirection direction = SwapDirection::PayFixed;
    int start_day = 0;           // business days from 0
    int maturity_day = 0;        // business days from 0
    int frequency = 1;           // payments per year, must divide 252

    int period_days() const { return kBusinessDaysPerYear / frequency; }
    std::vector<int> payment_days() const;
    bool operator==(const SwapSpec&) const = default;
};

// Position linear in the GBM state, for distribution studies: units of the
// underlying against a fixed strike, settling at maturity.
struct ForwardSpec {
    double units = 1.0;
    double strike = 0.0;      // currency per unit
    int maturity_day = 0;
    bool operator==(const ForwardSpec&) const = default;
};

using Trade = std::variant<SwapSpec, ForwardSpec>;

struct Portfolio {
    std::string netting_set;
    std::vector<Trade> trades; // non-empty
    bool operator==(const Portfolio&) const = default;
};

// Throws ConfigError on empty portfolios, bad trade terms, or trades the
// model cannot price (swaps need the short-rate model, forwards GBM).
void validate_portfolio(const Portfolio& portfolio, const ModelSpec& model);

enum class FlowKind { TF, CSA, SF, IM };

// Signed cashflow: positive amounts are received by the bank.
struct FlowEvent {
    int day = 0;
    double amount = 0.0;
    FlowKind kind = FlowKind::TF;
    double time_years() const { return days_to_years(day); }
};

// One simulated path over a grid; states indexed like the grid.
struct PathView {
    const TimeGrid* grid = nullptr;
    std::span<const double> states;

    double state_at(std::size_t date_index) const { return states[date_index]; }
    // State at an exact day; the day must be a grid point.
    double state_at_day(int day) const;
};

// Fixed rate that zeroes a spot swap's value at t = 0 under the short-rate
// model's own bond prices. Throws UnsupportedInstrumentError for GBM.
double par_rate(const ModelSpec& model, int start_day, int maturity_day, int frequency);

// Swap value at time t given the short rate r; r_fix is the short rate at
// the pending period's start (ignored before the first fixing). Value is
// ex-coupon at payment dates and 0 at maturity.
double swap_value(const ShortRate1FSpec& model, const SwapSpec& swap, double t, double r,
                  double r_fix);

// Portfolio value on a path at a grid date. Sum of trade values; swaps from
// closed-form bonds at the path's short rate, forwards linear in the state.
double value(const Portfolio& portfolio, const ModelSpec& model, const PathView& path,
             std::size_t date_index);

// Portfolio value at (t + horizon) if the state moved to future_state.
// Fixings already made on the path are honored; a fixing that would happen
// inside the horizon is read from future_state.
double value_at_horizon(const Portfolio& portfolio, const ModelSpec& model, const PathView& path,
                        std::size_t date_index, double horizon, double future_state);

// All termsheet/settlement flows with day in (day1, day2], amounts fixed per
// the path's rates at the preceding fixing.
std::vector<FlowEvent> flows_in_window(const Portfolio& portfolio, const ModelSpec& model,
                                       int day1, int day2, const PathView& path);

// Every day on which any trade in the portfolio pays a flow.
std::vector<int> portfolio_flow_days(const Portfolio& portfolio);

// Latest trade maturity, in days.
int portfolio_end_day(const Portfolio& portfolio);

} // namespace pfl
