#include "pfl/time_grid.hpp"

#include "pfl/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace pfl {

int years_to_days_exact(double years) {
    const double d = years * kBusinessDaysPerYear;
    const double r = std::round(d);
    if (std::fabs(d - r) > 1e-6)
        throw ConfigError("date " + std::to_string(years) +
                          "y does not fall on a business day (252/year convention)");
    return static_cast<int>(r);
}

TimeGrid::TimeGrid(std::vector<int> days) : days_(std::move(days)) {
    if (!days_.empty() && days_.front() < 0)
        throw ConfigError("time grid starts before 0");
    for (std::size_t i = 1; i < days_.size(); ++i)
        if (days_[i] <= days_[i - 1])
            throw ConfigError("time grid is not strictly increasing");
    years_.reserve(days_.size());
    for (int d : days_) years_.push_back(days_to_years(d));
}

std::optional<std::size_t> TimeGrid::index_of_day(int day) const {
    auto it = std::lower_bound(days_.begin(), days_.end(), day);
    if (it == days_.end() || *it != day) return std::nullopt;
    return static_cast<std::size_t>(it - days_.begin());
}

TimeGrid make_grid(std::vector<int> days) {
    std::sort(days.begin(), days.end());
    days.erase(std::unique(days.begin(), days.end()), days.end());
    return TimeGrid(std::move(days));
}

TimeGrid regular_grid(int end_day, int step_days) {
    if (end_day < 0) throw ConfigError("grid end before 0");
    if (step_days < 1) throw ConfigError("grid step must be at least one business day");
    std::vector<int> days;
    for (int d = 0; d < end_day; d += step_days) days.push_back(d);
    days.push_back(end_day);
    return TimeGrid(std::move(days));
}

TimeGrid merge_grids(const TimeGrid& a, const TimeGrid& b) {
    std::vector<int> days(a.days());
    days.insert(days.end(), b.days().begin(), b.days().end());
    return make_grid(std::move(days));
}

} // namespace pfl
