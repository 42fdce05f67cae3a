#pragma once

#include "pfl/instruments.hpp"
#include "pfl/market_models.hpp"

#include <optional>
#include <span>
#include <vector>

namespace pfl {

struct CSATerms {
    double threshold = 0.0;           // currency, >= 0
    double mta = 0.0;                 // minimum transfer amount, >= 0
    double independent_amount = 0.0;  // >= 0
    int call_frequency_days = 1;      // >= 1
    int mpor_days = 10;               // >= call frequency
    bool flow_netting = false;
    bool operator==(const CSATerms&) const = default;
};

void validate_csa(const CSATerms& csa);

// Schedule IM bucket: matched when low < remaining maturity <= high.
struct ScheduleBucket {
    double low_years = 0.0;
    double high_years = 0.0; // use a large value for the open top bucket
    double percent = 0.0;    // fraction of notional
    bool operator==(const ScheduleBucket&) const = default;
};

// Shipped default grid for the interest-rate class: 1% of notional up to
// 2y remaining, 2% for 2-5y, 4% beyond.
std::vector<ScheduleBucket> default_schedule_table();

enum class IMMode { None, Schedule, Quantile };

struct IMTerms {
    IMMode mode = IMMode::None;
    std::vector<ScheduleBucket> schedule = default_schedule_table();
    double q = 0.99;
    int horizon_days = 10;
    double stress_multiplier = 1.0;
    bool operator==(const IMTerms&) const = default;
};

void validate_im(const IMTerms& terms);

// Business days before default at which a party's last flow of each kind
// occurs.
struct PartyDeltas {
    int tf = 0;
    int csa = 0;
    int sf = 0;
    int im = 0;
    int of(FlowKind kind) const;
    bool operator==(const PartyDeltas&) const = default;
};

struct DeltaVector {
    PartyDeltas bank;
    PartyDeltas counterparty;
    bool operator==(const DeltaVector&) const = default;
};

// Default "classical+" convention: the counterparty's last flow of every
// kind is MPOR days before default, the bank keeps paying trade and
// settlement flows until default and stops collateral at MPOR.
DeltaVector classical_plus_deltas(int mpor_days);

void validate_deltas(const DeltaVector& deltas, int mpor_days);

// One variation-margin call: target sign(V) * max(|V| - threshold, 0) plus
// the independent amount; the transfer happens only if it clears the MTA.
double vm_balance(double portfolio_value, const CSATerms& csa, double prior_balance);

// VM balance after the call at every grid date of the path, from a zero
// opening balance. values[i] must be the portfolio value at grid date i.
std::vector<double> vm_balance_path(std::span<const double> values, const CSATerms& csa);

// Schedule IM: sum of notional x bucket percentage on remaining maturity.
// No netting, absolute notionals. Missing bucket -> ConfigError.
double im_schedule(const Portfolio& portfolio, const IMTerms& terms, double t);

// Quantile IM: q-quantile of the portfolio value change over the horizon
// conditional on the path state, vol stressed by stress_multiplier, floored
// at zero. Uses the closed-form state quantile composed with revaluation
// when the portfolio is monotone in the state over the probed range, a
// 1000-point stratified nested revaluation otherwise.
double im_quantile(const ModelSpec& model, const Portfolio& portfolio, const PathView& path,
                   std::size_t date_index, const IMTerms& terms);

// Same, with the per-date monotonicity classification precomputed (cube
// builder fast path).
double im_quantile_with_hint(const ModelSpec& model, const Portfolio& portfolio,
                             const PathView& path, std::size_t date_index, const IMTerms& terms,
                             std::optional<bool> monotone_hint);

// IM held at grid date i under the configured mode.
double im_at(const ModelSpec& model, const Portfolio& portfolio, const PathView& path,
             std::size_t date_index, const IMTerms& terms);

// Conditional-on-default exposure before flooring at eval date i:
//   value(t) - VM(t - mpor) - IM(t - mpor) + unpaid flows in (t - mpor, t]
// per the delta vectors. With flow netting the window's trade flows and
// same-date collateral transfers settle net, which cancels the
// unreturned-collateral spike terms. Without a CSA this reduces to
// value(t). vm_balances must span the path's grid (as from
// vm_balance_path); values likewise.
double conditional_exposure_from_values(const Portfolio& portfolio, const ModelSpec& model,
                                        const PathView& path, std::size_t date_index,
                                        const std::optional<CSATerms>& csa, const IMTerms& im_terms,
                                        const DeltaVector& deltas,
                                        std::span<const double> values,
                                        std::span<const double> vm_balances,
                                        std::optional<bool> im_monotone_hint = std::nullopt);

// Convenience form that recomputes the value and VM paths for one path.
double conditional_exposure(const Portfolio& portfolio, const ModelSpec& model,
                            const PathView& path, std::size_t date_index,
                            const std::optional<CSATerms>& csa, const IMTerms& im_terms,
                            const DeltaVector& deltas);

} // namespace pfl
