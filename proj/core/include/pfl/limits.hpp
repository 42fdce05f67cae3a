#pragma once

#include "pfl/metrics.hpp"

#include <optional>
#include <string>
#include <vector>

namespace pfl {

struct LimitSpec {
    std::string counterparty;
    std::string netting_set;
    MetricKind metric = MetricKind::PFE;
    double q = 0.95;
    double limit = 0.0; // currency, >= 0
    bool operator==(const LimitSpec&) const = default;
};

struct BreachReport {
    std::string counterparty;
    std::string netting_set;
    MetricKind metric = MetricKind::PFE;
    double q = 0.95;
    double limit = 0.0;
    std::vector<double> headroom;            // limit - profile value, per date
    std::optional<double> first_breach_time; // years, on the profile grid
    double max_utilization = 0.0;            // max profile / limit; inf when limit = 0
    bool breached() const { return first_breach_time.has_value(); }
};

// Headroom per date; breach iff the profile exceeds the limit anywhere.
// Metric kind or q mismatch -> ConfigError.
BreachReport check_limit(const Profile& profile, const LimitSpec& spec);

struct AdjustedLimit {
    LimitSpec spec;
    bool capacity_exhausted = false; // incurred losses ate the whole limit
};

// Shifts an aPFL/paPFL limit down by the incurred CVA, floored at zero.
// Profiles and limits must be adjusted together; the run pipeline pairs
// them. Applying to a PFE/PFL limit -> ConfigError.
AdjustedLimit adjust_limit(const LimitSpec& spec, const IncurredCVA& x);

// Proportional split of a bank-wide extreme loss appetite.
std::vector<LimitSpec> allocate_appetite(double total,
                                         const std::vector<std::pair<std::string, double>>& weights,
                                         MetricKind metric = MetricKind::PFL, double q = 0.95);

// Limits file: CSV with header counterparty,netting_set,metric,q,limit.
std::vector<LimitSpec> load_limits_csv(const std::string& path);

} // namespace pfl
