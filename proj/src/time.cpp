#include "bbt/time.hpp"

#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace bbt {

time_ps ps_from_seconds(double seconds) {
  if (!std::isfinite(seconds) || seconds < 0.0) {
    throw std::invalid_argument("time in seconds must be finite and non-negative");
  }
  const double ps = seconds * static_cast<double>(kPsPerSec);
  if (ps > 9.2e18) {
    throw std::invalid_argument("time does not fit the picosecond range");
  }
  return static_cast<time_ps>(std::floor(ps + 0.5));
}

double seconds_from_ps(time_ps t) {
  return static_cast<double>(t) / static_cast<double>(kPsPerSec);
}

std::string format_ps(time_ps t) {
  std::ostringstream os;
  os << t << "ps";
  if (t >= kPsPerMs) {
    os << " (" << static_cast<double>(t) / kPsPerMs << "ms)";
  } else if (t >= kPsPerUs) {
    os << " (" << static_cast<double>(t) / kPsPerUs << "us)";
  } else if (t >= kPsPerNs) {
    os << " (" << static_cast<double>(t) / kPsPerNs << "ns)";
  }
  return os.str();
}

std::int64_t div_floor(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

std::int64_t div_ceil(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) == (den < 0))) ++q;
  return q;
}

std::int64_t div_round_half_up(std::int64_t num, std::int64_t den) {
  // floor((2*num + den) / (2*den)), exact via 128-bit intermediates
  __int128 n = static_cast<__int128>(num) * 2 + den;
  __int128 d = static_cast<__int128>(den) * 2;
  return static_cast<std::int64_t>(n / d);
}

std::int64_t mul_div_ceil(std::int64_t a, std::int64_t b, std::int64_t den) {
  __int128 n = static_cast<__int128>(a) * b;
  __int128 q = n / den;
  if (n % den != 0) ++q;
  return static_cast<std::int64_t>(q);
}

std::int64_t lcm_capped(std::int64_t a, std::int64_t b, std::int64_t cap) {
  if (a == 0 || b == 0) return 0;
  const std::int64_t g = std::gcd(a, b);
  __int128 l = static_cast<__int128>(a / g) * b;
  if (l > cap) return 0;
  return static_cast<std::int64_t>(l);
}

}  // namespace bbt
