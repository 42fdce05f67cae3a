#pragma once

#include <cstddef>
#include <optional>
#include <vector>

namespace pfl {

// 252 business days per year, everywhere. MPOR of "10 business days"
// is 10/252 years; no other daycount exists in the engine.
inline constexpr int kBusinessDaysPerYear = 252;

inline double days_to_years(int days) {
    return static_cast<double>(days) / kBusinessDaysPerYear;
}

// Rounds a year fraction to whole business days; throws ConfigError if it
// does not sit on a business day within tolerance.
int years_to_days_exact(double years);

// Strictly increasing grid of business-day offsets from 0. Dates are held
// as integer business days so that coupon dates, MPOR companions and
// flow-adjacent dates compare exactly; year fractions are derived views.
class TimeGrid {
public:
    TimeGrid() = default;
    explicit TimeGrid(std::vector<int> days);

    std::size_t size() const { return days_.size(); }
    bool empty() const { return days_.empty(); }

    int day(std::size_t i) const { return days_[i]; }
    double year(std::size_t i) const { return years_[i]; }
    const std::vector<int>& days() const { return days_; }
    const std::vector<double>& years() const { return years_; }

    // Index of an exact day, if present.
    std::optional<std::size_t> index_of_day(int day) const;

    bool contains_day(int day) const { return index_of_day(day).has_value(); }

    bool operator==(const TimeGrid& other) const { return days_ == other.days_; }

private:
    std::vector<int> days_;
    std::vector<double> years_;
};

// Deduplicates, sorts and validates a day list into a grid.
TimeGrid make_grid(std::vector<int> days);

// Regular grid {0, step, 2*step, ..., end} (end always included).
TimeGrid regular_grid(int end_day, int step_days);

// Union of two grids.
TimeGrid merge_grids(const TimeGrid& a, const TimeGrid& b);

} // namespace pfl
