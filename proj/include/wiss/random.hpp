#pragma once

#include <cstdint>
#include <random>

namespace wiss {

/// Per-sample stream keyed by (seed, index): results do not depend on the order in
/// which samples are drawn.
inline std::mt19937_64 sample_rng(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return std::mt19937_64(seq);
}

inline double uniform(std::mt19937_64& g, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(g);
}

inline long uniform_int(std::mt19937_64& g, long lo, long hi) {
  return std::uniform_int_distribution<long>(lo, hi)(g);
}

}  // namespace wiss
