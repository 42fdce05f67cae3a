#pragma once

#include "pfl/exposure.hpp"
#include "pfl/time_grid.hpp"

#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace pfl {

// Loss-given-default models. Correlated produces
// lgd(t, path) = clamp(base + beta * z_path(t), 0, 1) with z the path's
// standardized model shock at t.
struct ConstantLgd {
    double lgd = 0.6;
    bool operator==(const ConstantLgd&) const = default;
};

struct TermStructureLgd {
    // Step function: value of the last point with t <= query time.
    std::vector<std::pair<double, double>> points; // (t years, lgd), sorted
    bool operator==(const TermStructureLgd&) const = default;
};

struct CorrelatedLgd {
    double base = 0.6;
    double beta = 0.0;
    bool operator==(const CorrelatedLgd&) const = default;
};

using LGDModel = std::variant<ConstantLgd, TermStructureLgd, CorrelatedLgd>;

void validate_lgd(const LGDModel& lgd);
double lgd_value(const LGDModel& lgd, double t, double shock);
// The per-date deterministic LGD when the model does not depend on the
// path, nullopt for CorrelatedLgd.
std::optional<double> deterministic_lgd(const LGDModel& lgd, double t);

// Incurred CVA: a constant, no profile.
struct IncurredCVA {
    double x = 0.0; // >= 0
};

// Single-quote flat-hazard credit curve: lambda = spread / lgd.
struct CreditCurve {
    double cds_spread = 0.0; // 1/year
    double lgd = 0.6;        // (0, 1]
    double hazard() const { return cds_spread / lgd; }
    double survival(double t) const;
};

void validate_credit_curve(const CreditCurve& curve);

// Credit mitigation profile: flat LGD x notional up to each CDS maturity.
struct ProtectionProfile {
    std::vector<std::pair<double, double>> positions; // (maturity years, amount)

    double at(double t) const;
    bool is_zero() const;
};

// y(t) = lgd * notional for t <= maturity, 0 after.
ProtectionProfile protection_profile(double cds_notional, double cds_maturity, double lgd);
ProtectionProfile combine(const std::vector<ProtectionProfile>& profiles);

enum class MetricKind { PFE, PFL, aPFL, paPFL };

std::string metric_name(MetricKind kind);
MetricKind metric_from_name(const std::string& name);

struct Profile {
    TimeGrid grid;
    std::vector<double> values;
    MetricKind kind = MetricKind::PFE;
    double q = 0.95;
    std::string lgd_description;
};

// Ascending order statistic at 1-based index ceil(q n); no interpolation
// (conservative upper convention). Empty samples -> InputError.
double empirical_quantile(std::span<const double> samples, double q);

// Mean of the worst ceil((1-q) n) samples, summed in ascending order so the
// result is reproducible bit-for-bit.
double expected_shortfall(std::span<const double> samples, double q);

// Per-date quantile of the floored exposure slice.
Profile pfe_profile(const ExposureCube& cube, double q);

// Per-date expected shortfall of max(lgd x raw, 0). Constant and
// term-structure LGDs factor out of the tail mean exactly, so those routes
// scale the unit-LGD tail mean rather than re-summing.
Profile pfl_profile(const ExposureCube& cube, const LGDModel& lgd, double q);

// PFL with the incurred CVA shifted out path by path: ES of
// max(lgd x raw - x, 0). x = 0 reduces bit-identically to pfl_profile.
Profile apfl_profile(const ExposureCube& cube, const LGDModel& lgd, const IncurredCVA& x, double q);

// Additionally nets existing credit protection: ES of
// max(lgd x raw - x - y(t), 0). y = 0 reduces bit-identically to
// apfl_profile.
Profile papfl_profile(const ExposureCube& cube, const LGDModel& lgd, const IncurredCVA& x,
                      const ProtectionProfile& y, double q);

// aPFL against a per-date adjustment (the forward-CVA config variant).
Profile apfl_profile_with_schedule(const ExposureCube& cube, const LGDModel& lgd,
                                   std::span<const double> x_per_date, double q);
Profile papfl_profile_with_schedule(const ExposureCube& cube, const LGDModel& lgd,
                                    std::span<const double> x_per_date,
                                    const ProtectionProfile& y, double q);

// X = sum_i E[lgd](t_i) EPE(t_i) [S(t_{i-1}) - S(t_i)], survival from the
// flat hazard, EPE the per-date mean of floored exposure. No discounting.
IncurredCVA incurred_cva(const ExposureCube& cube, const CreditCurve& curve, const LGDModel& lgd);

// Remaining expected forward CVA per date (the `forward` cva_adjustment
// variant): x_i = sum_{j > i} E[lgd](t_j) EPE(t_j) [S(t_{j-1}) - S(t_j)].
std::vector<double> forward_cva_schedule(const ExposureCube& cube, const CreditCurve& curve,
                                         const LGDModel& lgd);

// Per-date mean of the floored slice.
std::vector<double> epe_profile(const ExposureCube& cube);

} // namespace pfl
