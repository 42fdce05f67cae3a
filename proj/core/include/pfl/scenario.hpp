#pragma once

#include "pfl/collateral.hpp"
#include "pfl/instruments.hpp"
#include "pfl/market_models.hpp"
#include "pfl/metrics.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace pfl {

struct GridSpec {
    int end_day = 0;
    int step_days = 1;
    bool operator==(const GridSpec&) const = default;
};

struct MetricRequest {
    MetricKind kind = MetricKind::PFE;
    double q = 0.95;
    bool operator==(const MetricRequest&) const = default;
};

struct CdsPosition {
    double notional = 0.0;
    double maturity_years = 0.0;
    double lgd = 0.6;
    bool operator==(const CdsPosition&) const = default;
};

struct HistogramRequest {
    std::vector<int> date_days;
    int bins = 50;
    bool include_uncollateralized = true;
    bool operator==(const HistogramRequest&) const = default;
};

enum class CvaAdjustment { Constant, Forward };

// One reproducible run description: model, grid, portfolio, collateral and
// IM terms, loss-side inputs, requested metrics and limits.
struct Scenario {
    std::string name;
    std::string counterparty = "CPTY";
    ModelSpec model = GbmSpec{};
    MeasureConfig measure;
    GridSpec grid;
    std::size_t n_paths = 1;
    std::uint64_t seed = 0;
    bool antithetic = false;
    Portfolio portfolio;
    std::optional<CSATerms> csa;
    IMTerms im_terms;
    DeltaVector deltas;
    LGDModel lgd = ConstantLgd{};
    std::optional<CreditCurve> credit_curve;
    std::vector<CdsPosition> protection;
    CvaAdjustment cva_adjustment = CvaAdjustment::Constant;
    std::vector<MetricRequest> metrics;
    std::optional<HistogramRequest> histogram;
    std::string limits_file; // empty = none
    std::string output_dir;  // empty = derived from scenario name

    std::string hash; // stable digest of the canonicalized content

    bool operator==(const Scenario& other) const;
};

// Simulation grid (eval dates plus t - mpor companions) and the positions
// of the evaluation dates within it. Evaluation dates are the regular grid
// plus flow dates and mpor/2-spaced flow-adjacent dates.
struct ScenarioGrids {
    TimeGrid sim_grid;
    std::vector<std::size_t> eval_indices;
};

ScenarioGrids build_scenario_grids(const Scenario& scenario);

// Loads, validates and hashes a scenario file. Unknown keys are rejected
// with their key path; "atm" swap rates resolve against the model's par
// rate; q values must lie in (0, 1). `overrides` are dotted-path
// key=value pairs (e.g. n_paths=1000, csa.flow_netting=true) applied to
// the document before validation.
Scenario load_scenario(const std::string& path, const std::vector<std::string>& overrides = {});

// Canonical serialization of a resolved scenario; load_scenario_text of it
// yields an equal Scenario.
std::string serialize_scenario(const Scenario& scenario);

// Same as load_scenario but from an in-memory document.
Scenario load_scenario_text(const std::string& text, const std::string& base_dir = ".",
                            const std::vector<std::string>& overrides = {});

ProtectionProfile protection_of(const Scenario& scenario);

} // namespace pfl
