// rng.hpp
//
// Reproducible random numbers. The generator is xoshiro256** (Blackman and
// Vigna, 2018) seeded through SplitMix64; both are specified bit-for-bit, so
// a given seed produces the same stream on every platform and compiler. The
// <random> distributions are deliberately not used because their output is
// implementation-defined.
//
// Parallel work is cut into fixed-size chunks. Chunk c of a run seeded with
// S draws from a generator seeded with chunk_seed(S, c):
//
//     chunk_seed(S, c) = splitmix64_mix(S + (c + 1) * 0x9E3779B97F4A7C15)
//
// Chunk boundaries depend only on the sample count, never on the number of
// workers, which is what keeps results identical for any degree of
// parallelism.
#pragma once

#include <array>
#include <cstdint>

namespace tailbound {

constexpr std::uint64_t splitmix64_mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

constexpr std::uint64_t chunk_seed(std::uint64_t seed, std::uint64_t chunk) noexcept {
    return splitmix64_mix(seed + (chunk + 1) * 0x9E3779B97F4A7C15ULL);
}

class Xoshiro256 {
public:
    using result_type = std::uint64_t;

    explicit constexpr Xoshiro256(std::uint64_t seed) noexcept {
        std::uint64_t x = seed;
        for (auto& word : s_) {
            x += 0x9E3779B97F4A7C15ULL;
            word = splitmix64_mix(x);
        }
    }

    static constexpr result_type min() noexcept { return 0; }
    static constexpr result_type max() noexcept { return ~result_type{0}; }

    constexpr result_type operator()() noexcept {
        const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
        const std::uint64_t t = s_[1] << 17;
        s_[2] ^= s_[0];
        s_[3] ^= s_[1];
        s_[1] ^= s_[2];
        s_[0] ^= s_[3];
        s_[2] ^= t;
        s_[3] = rotl(s_[3], 45);
        return result;
    }

    /// Uniform double in [0, 1) with 53 random bits.
    constexpr double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

private:
    static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept { return (x << k) | (x >> (64 - k)); }

    std::array<std::uint64_t, 4> s_{};
};

}  // namespace tailbound
