#pragma once

#include <cstdint>
#include <random>

namespace riskscore {

using Engine = std::mt19937_64;

/// Engine for an independent stream derived from a user seed. Distinct
/// `stream` values give decorrelated sequences for the same seed.
inline Engine make_engine(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Engine(seq);
}

/// Uniform draw on the open interval (0, 1).
inline double uniform_open(Engine& engine) {
  // 53 random mantissa bits, shifted off zero by half an ulp.
  return (static_cast<double>(engine() >> 11) + 0.5) * 0x1.0p-53;
}

}  // namespace riskscore
