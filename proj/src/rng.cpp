#include "fanet/rng.hpp"

namespace fanet {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

RngStream rng_stream(std::uint64_t seed, std::uint64_t index, RngPurpose purpose)
{
    std::uint64_t key = splitmix64(seed);
    key = splitmix64(key ^ splitmix64(index + 0x632BE59BD9B4E019ULL));
    key = splitmix64(key ^ static_cast<std::uint64_t>(purpose));
    return RngStream(key);
}

RngStream rng_stream(std::uint64_t seed, UavId node, RngPurpose purpose)
{
    return rng_stream(seed, std::uint64_t{node.value}, purpose);
}

}  // namespace fanet
