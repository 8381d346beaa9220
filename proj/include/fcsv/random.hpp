#pragma once

#include <cstdint>
#include <random>

namespace fcsv {

using Rng = std::mt19937_64;

/// Independent substream `stream` of a run seeded with `seed` (splitmix64 mixing).
inline Rng make_stream(std::uint64_t seed, std::uint64_t stream)
{
    auto mix = [](std::uint64_t z) {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    };
    const std::uint64_t a = mix(seed);
    const std::uint64_t b = mix(a ^ mix(stream + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                      static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
    return Rng(seq);
}

inline double uniform01(Rng& rng)
{
    // strictly inside (0, 1)
    constexpr double scale = 1.0 / 9007199254740992.0;
    return (static_cast<double>(rng() >> 11) + 0.5) * scale;
}

inline double std_normal(Rng& rng)
{
    std::normal_distribution<double> n01;
    return n01(rng);
}

}  // namespace fcsv
