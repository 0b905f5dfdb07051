#pragma once

#include <cstdint>
#include <random>

namespace fpsys {

using Rng = std::mt19937_64;

/// One splitmix64 step. Used to expand a master seed into per-component seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30U)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27U)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31U);
}

/// Seed for stream `stream` under `master`. Distinct streams are decorrelated.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) noexcept {
    return splitmix64(splitmix64(master) ^ splitmix64(stream + 0x632be59bd9b4e019ULL));
}

/// Uniform integer in [0, bound). Implemented by rejection so the stream is
/// identical across standard library implementations.
inline std::uint64_t uniform_below(Rng& rng, std::uint64_t bound) {
    if (bound <= 1) {
        return 0;
    }
    const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
    std::uint64_t x;
    do {
        x = rng();
    } while (x >= limit);
    return x % bound;
}

template <class Seq>
void shuffle_portable(Seq& seq, Rng& rng) {
    for (std::size_t i = seq.size(); i > 1; --i) {
        const auto j = static_cast<std::size_t>(uniform_below(rng, i));
        using std::swap;
        swap(seq[i - 1], seq[j]);
    }
}

}  // namespace fpsys
