#pragma once

#include <cstdint>
#include <random>

namespace sks {

using Rng = std::mt19937_64;

/// Independent stream for (seed, index); used so that per-trial and per-seed
/// work gives the same numbers regardless of execution order.
inline Rng make_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return Rng(seq);
}

/// Uniform real in [0, 1) computed from raw bits so the value is identical
/// across standard library implementations.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace sks
