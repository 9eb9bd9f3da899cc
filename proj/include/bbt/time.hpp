#pragma once

#include <cstdint>
#include <string>

namespace bbt {

/// All network time quantities (periods, deadlines, delays, transmission
/// times) are exact integer picoseconds. Conversions from seconds round
/// half-up and are lossy only below 1 ps; everything downstream is exact
/// integer arithmetic so schedulability tests and the simulator can compare
/// instants without tolerance.
using time_ps = std::int64_t;

using bits_per_sec = std::int64_t;

inline constexpr time_ps kPsPerNs = 1'000;
inline constexpr time_ps kPsPerUs = 1'000'000;
inline constexpr time_ps kPsPerMs = 1'000'000'000;
inline constexpr time_ps kPsPerSec = 1'000'000'000'000;

/// Round-half-up conversion from seconds. Rejects negative or non-finite
/// input.
time_ps ps_from_seconds(double seconds);

double seconds_from_ps(time_ps t);

/// Human-readable rendering, e.g. "1186667ps (1.186667us)".
std::string format_ps(time_ps t);

/// floor(num/den) for den > 0, num of any sign.
std::int64_t div_floor(std::int64_t num, std::int64_t den);

/// ceil(num/den) for den > 0, num of any sign.
std::int64_t div_ceil(std::int64_t num, std::int64_t den);

/// round-half-up(num/den) for num >= 0, den > 0; exact in 128-bit
/// intermediate.
std::int64_t div_round_half_up(std::int64_t num, std::int64_t den);

/// ceil(a*b/den) for non-negative a, b and positive den; 128-bit
/// intermediate.
std::int64_t mul_div_ceil(std::int64_t a, std::int64_t b, std::int64_t den);

/// lcm(a, b) clamped: returns 0 when the exact lcm would exceed `cap`.
std::int64_t lcm_capped(std::int64_t a, std::int64_t b, std::int64_t cap);

}  // namespace bbt
