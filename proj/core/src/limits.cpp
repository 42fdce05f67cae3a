#include "pfl/limits.hpp"

#include "pfl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

namespace pfl {

BreachReport check_limit(const Profile& profile, const LimitSpec& spec) {
    if (profile.kind != spec.metric)
        throw ConfigError("limit metric " + metric_name(spec.metric) +
                          " does not match profile metric " + metric_name(profile.kind));
    if (std::fabs(profile.q - spec.q) > 1e-12)
        throw ConfigError("limit quantile does not match profile quantile");
    if (spec.limit < 0.0) throw ConfigError("limit must be >= 0");

    BreachReport report;
    report.counterparty = spec.counterparty;
    report.netting_set = spec.netting_set;
    report.metric = spec.metric;
    report.q = spec.q;
    report.limit = spec.limit;
    report.headroom.reserve(profile.values.size());

    double max_value = 0.0;
    for (std::size_t i = 0; i < profile.values.size(); ++i) {
        const double v = profile.values[i];
        report.headroom.push_back(spec.limit - v);
        max_value = std::max(max_value, v);
        if (v > spec.limit && !report.first_breach_time)
            report.first_breach_time = profile.grid.year(i);
    }
    if (spec.limit > 0.0)
        report.max_utilization = max_value / spec.limit;
    else
        report.max_utilization =
            max_value > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    return report;
}

AdjustedLimit adjust_limit(const LimitSpec& spec, const IncurredCVA& x) {
    if (spec.metric != MetricKind::aPFL && spec.metric != MetricKind::paPFL)
        throw ConfigError("incurred-CVA adjustment applies to aPFL/paPFL limits only");
    if (x.x < 0.0) throw InputError("incurred CVA must be >= 0");
    AdjustedLimit out;
    out.spec = spec;
    out.spec.limit = std::max(spec.limit - x.x, 0.0);
    out.capacity_exhausted = x.x > spec.limit;
    return out;
}

std::vector<LimitSpec> allocate_appetite(double total,
                                         const std::vector<std::pair<std::string, double>>& weights,
                                         MetricKind metric, double q) {
    if (total < 0.0) throw ConfigError("appetite must be >= 0");
    double sum = 0.0;
    for (const auto& [name, w] : weights) {
        if (w < 0.0) throw ConfigError("appetite weight for " + name + " must be >= 0");
        sum += w;
    }
    if (!(sum > 0.0)) throw ConfigError("appetite weights must not all be zero");

    std::vector<LimitSpec> specs;
    specs.reserve(weights.size());
    for (const auto& [name, w] : weights)
        specs.push_back({name, name, metric, q, total * (w / sum)});
    return specs;
}

std::vector<LimitSpec> load_limits_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open limits file " + path);

    std::vector<LimitSpec> specs;
    std::string line;
    bool first = true;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (first && fields.size() >= 1 && fields[0] == "counterparty") {
            first = false;
            continue; // header
        }
        first = false;
        if (fields.size() != 5)
            throw ConfigError(path + ":" + std::to_string(line_no) +
                              ": expected counterparty,netting_set,metric,q,limit");
        try {
            LimitSpec spec;
            spec.counterparty = fields[0];
            spec.netting_set = fields[1];
            spec.metric = metric_from_name(fields[2]);
            spec.q = std::stod(fields[3]);
            spec.limit = std::stod(fields[4]);
            if (!(spec.q > 0.0 && spec.q < 1.0))
                throw ConfigError("q must lie in (0, 1)");
            if (spec.limit < 0.0) throw ConfigError("limit must be >= 0");
            specs.push_back(std::move(spec));
        } catch (const std::invalid_argument&) {
            throw ConfigError(path + ":" + std::to_string(line_no) + ": malformed number");
        }
    }
    return specs;
}

} // namespace pfl
