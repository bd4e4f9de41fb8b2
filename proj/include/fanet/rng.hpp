#pragma once

#include "fanet/core_model.hpp"

#include <cstdint>
#include <random>

namespace fanet {

enum class RngPurpose : std::uint64_t {
    Mobility = 1,
    Loss = 2,
    Protocol = 3,
    MonteCarlo = 4,
};

using RngStream = std::mt19937_64;

std::uint64_t splitmix64(std::uint64_t x) noexcept;

/// Independent reproducible stream keyed by (seed, node, purpose).
RngStream rng_stream(std::uint64_t seed, UavId node, RngPurpose purpose);

/// Same keying for streams that are not tied to a node (chunk index etc.).
RngStream rng_stream(std::uint64_t seed, std::uint64_t index, RngPurpose purpose);

/// Uniform double in [0, 1) with 53 random bits; identical across platforms,
/// unlike std::uniform_real_distribution.
inline double uniform01(RngStream& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline double uniform(RngStream& rng, double lo, double hi) { return lo + (hi - lo) * uniform01(rng); }

inline bool bernoulli(RngStream& rng, double p) { return uniform01(rng) < p; }

}  // namespace fanet
