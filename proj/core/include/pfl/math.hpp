#pragma once

#include <cstddef>
#include <cstdint>

namespace pfl {

// Standard normal CDF.
double norm_cdf(double x);

// Standard normal density.
double norm_pdf(double x);

// Inverse standard normal CDF (Wichura's AS241, double precision).
// Throws InputError for p outside (0, 1).
double inverse_norm_cdf(double p);

// 1-based order-statistic index ceil(q * n), guarded against the usual
// floating-point trouble when q * n sits on an integer (0.95 * 100 must
// give 95, not 96). Result clamped to [1, n].
std::size_t quantile_index(double q, std::size_t n);

// splitmix64 step, used to derive per-path RNG seeds.
std::uint64_t splitmix64(std::uint64_t& state);

} // namespace pfl
