#pragma once

#include <cstdint>
#include <random>

namespace hrc {

using Rng = std::mt19937_64;

// Independent stream per (seed, path index), so results do not depend on
// how paths are scheduled.
inline Rng path_stream(std::uint64_t seed, std::uint64_t index) {
    auto mix = [](std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    };
    std::uint64_t a = mix(seed), b = mix(a ^ mix(index + 0x632be59bd9b4e019ULL));
    std::seed_seq seq{std::uint32_t(a), std::uint32_t(a >> 32), std::uint32_t(b),
                      std::uint32_t(b >> 32)};
    return Rng(seq);
}

}  // namespace hrc
