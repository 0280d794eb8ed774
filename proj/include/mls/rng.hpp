#ifndef MLS_RNG_HPP
#define MLS_RNG_HPP

#include <cstdint>

namespace mls::rng {

/// State used when set_seed produces a zero word (xorshift needs a
/// nonzero state) and when no seed has been set at all.
inline constexpr std::uint64_t kZeroSeedReplacement = 0x9E3779B97F4A7C15ULL;

inline constexpr std::uint64_t kMultiplier = 2685821657736338717ULL;

inline std::uint64_t splitmix64(std::uint64_t x) {
  std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Generator state for a user seed.
inline std::uint64_t state_from_seed(std::int64_t seed) {
  std::uint64_t s = splitmix64(static_cast<std::uint64_t>(seed));
  return s == 0 ? kZeroSeedReplacement : s;
}

/// xorshift64*: advances the state in place and returns the output word.
inline std::uint64_t next_word(std::uint64_t& state) {
  state ^= state >> 12;
  state ^= state << 25;
  state ^= state >> 27;
  return state * kMultiplier;
}

/// Top 53 bits scaled into [0, 1).
inline double word_to_unit(std::uint64_t word) {
  return static_cast<double>(word >> 11) * 0x1.0p-53;
}

}  // namespace mls::rng

#endif  // MLS_RNG_HPP
