#pragma once

#include <cstdint>

namespace bbt {

/// splitmix64 step; the whole toolkit derives randomness from this one
/// generator so runs are reproducible across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9E3779B97F4A7C15ull);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

/// Stateless hash of a (seed, counter) pair; lets independent draws be
/// keyed by position instead of sequence so batches stay reproducible.
inline std::uint64_t keyed_u64(std::uint64_t seed, std::uint64_t counter) {
  std::uint64_t s = seed ^ (counter * 0xD1B54A32D192ED03ull);
  return splitmix64(s);
}

/// Uniform draw in [0, bound) without platform-dependent distributions.
inline std::uint64_t bounded_u64(std::uint64_t value, std::uint64_t bound) {
  return static_cast<std::uint64_t>(
      (static_cast<unsigned __int128>(value) * bound) >> 64);
}

/// Map a u64 to (0, 1]; safe as a Box-Muller log argument.
inline double unit_open_closed(std::uint64_t x) {
  return (static_cast<double>(x >> 11) + 1.0) * 0x1.0p-53;
}

}  // namespace bbt
