#ifndef LIFTCHROMA_RNG_HPP
#define LIFTCHROMA_RNG_HPP

#include <cstdint>
#include <random>

namespace liftchroma {

inline std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Counter scheme: seed for stream (a, b) under master is
// splitmix64(splitmix64(splitmix64(master) ^ a) ^ b). Used as
// (sample index, base edge index) for lifts and (cell, sample) in campaigns.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0)
{
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ b);
}

using Engine = std::mt19937_64;

// Uniform integer in [0, bound) by rejection; independent of the standard
// library's distribution implementation so streams are portable.
inline std::uint64_t uniform_below(Engine& eng, std::uint64_t bound)
{
    const std::uint64_t limit = ~std::uint64_t{0} - (~std::uint64_t{0} % bound);
    std::uint64_t x;
    do {
        x = eng();
    } while (x >= limit);
    return x % bound;
}

// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(Engine& eng)
{
    return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

} // namespace liftchroma

#endif
