#pragma once

#include <cstdint>

namespace fanet {

// Monte-Carlo bit error counting. Bits are split into fixed chunks, each
// drawn from its own (seed, chunk) stream, so both versions return the same
// count for the same inputs regardless of thread count.

inline constexpr std::uint64_t kBitChunk = std::uint64_t{1} << 16;

/// Reference implementation.
std::uint64_t count_bit_errors_serial(double ber, std::uint64_t bits, std::uint64_t seed);

/// OpenMP version; falls back to one thread when built without OpenMP.
std::uint64_t count_bit_errors_parallel(double ber, std::uint64_t bits, std::uint64_t seed);

}  // namespace fanet
