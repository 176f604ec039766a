#pragma once

#include <cstdint>
#include <random>

namespace v2v {

// SplitMix64 finalizer. Per-trial seeds are derived as mix64(master + index).
constexpr std::uint64_t mix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) noexcept
{
    return mix64(master + index);
}

using Rng = std::mt19937_64;

// Uniform double in [0, 1) from the top 53 bits. Unlike
// std::uniform_real_distribution this is identical across standard libraries.
inline double uniform01(Rng& rng)
{
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace v2v
