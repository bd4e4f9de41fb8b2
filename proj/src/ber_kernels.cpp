#include "fanet/ber_kernels.hpp"

#include "fanet/error.hpp"
#include "fanet/rng.hpp"

#include <algorithm>

namespace fanet {

namespace {

std::uint64_t count_chunk(double ber, std::uint64_t chunk, std::uint64_t bits, std::uint64_t seed)
{
    auto rng = rng_stream(seed, chunk, RngPurpose::MonteCarlo);
    const std::uint64_t begin = chunk * kBitChunk;
    const std::uint64_t end = std::min(bits, begin + kBitChunk);
    std::uint64_t errors = 0;
    for (std::uint64_t i = begin; i < end; ++i) {
        errors += bernoulli(rng, ber) ? 1 : 0;
    }
    return errors;
}

void check_ber(double ber)
{
    if (!(ber >= 0.0 && ber <= 1.0)) {
        throw DomainError("bit error rate must lie in [0, 1]");
    }
}

}  // namespace

std::uint64_t count_bit_errors_serial(double ber, std::uint64_t bits, std::uint64_t seed)
{
    check_ber(ber);
    const std::uint64_t chunks = (bits + kBitChunk - 1) / kBitChunk;
    std::uint64_t errors = 0;
    for (std::uint64_t c = 0; c < chunks; ++c) {
        errors += count_chunk(ber, c, bits, seed);
    }
    return errors;
}

std::uint64_t count_bit_errors_parallel(double ber, std::uint64_t bits, std::uint64_t seed)
{
    check_ber(ber);
    const auto chunks = static_cast<std::int64_t>((bits + kBitChunk - 1) / kBitChunk);
    std::uint64_t errors = 0;
#pragma omp parallel for reduction(+ : errors) schedule(static)
    for (std::int64_t c = 0; c < chunks; ++c) {
        errors += count_chunk(ber, static_cast<std::uint64_t>(c), bits, seed);
    }
    return errors;
}

}  // namespace fanet
