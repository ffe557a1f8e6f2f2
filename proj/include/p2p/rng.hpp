// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstdint>
#include <cstddef>
#include <string_view>

namespace p2p {

// Self-contained PRNG stack. The standard <random> distributions are
// implementation-defined, which would tie dataset bytes to a libstdc++
// version; everything below is pinned by this code alone.

inline uint64_t splitmix64(uint64_t& state) {
    state += 0x9e3779b97f4a7c15ull;
    uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Seed fan-out: one master seed deterministically derives the seed of every
// stage (scene, sensor, shuffle, init, ...) from a domain tag and an index,
// so any stage can be reproduced in isolation.
inline uint64_t derive_seed(uint64_t master, std::string_view tag, uint64_t index = 0) {
    uint64_t h = 0xcbf29ce484222325ull;  // FNV-1a over the tag
    for (char c : tag) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ull;
    }
    uint64_t s = master;
    uint64_t a = splitmix64(s);
    s ^= h;
    uint64_t b = splitmix64(s);
    s ^= index * 0x9e3779b97f4a7c15ull;
    uint64_t c = splitmix64(s);
    return a ^ (b + (c << 1));
}

// pcg32 (Melissa O'Neill, minimal variant), 64-bit state, 32-bit output.
class Pcg32 {
  public:
    explicit Pcg32(uint64_t seed = 0x853c49e6748fea9bull, uint64_t stream = 0xda3e39cb94b95bdbull) {
        state_ = 0u;
        inc_ = (stream << 1u) | 1u;
        next_u32();
        state_ += seed;
        next_u32();
    }

    uint32_t next_u32() {
        uint64_t old = state_;
        state_ = old * 6364136223846793005ull + inc_;
        uint32_t xorshifted = static_cast<uint32_t>(((old >> 18u) ^ old) >> 27u);
        uint32_t rot = static_cast<uint32_t>(old >> 59u);
        return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
    }

    // Unbiased bounded draw (rejection).
    uint32_t next_below(uint32_t bound) {
        if (bound <= 1) return 0;
        uint32_t threshold = (0u - bound) % bound;
        for (;;) {
            uint32_t r = next_u32();
            if (r >= threshold) return r % bound;
        }
    }

    // Uniform in [0, 1) with 32-bit resolution.
    double next_double() { return next_u32() * (1.0 / 4294967296.0); }

    double uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

    float uniform_f(float lo, float hi) { return static_cast<float>(uniform(lo, hi)); }

    // Box-Muller; consumes exactly two uniforms per pair, caches the second.
    double normal() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        double u1, u2;
        do {
            u1 = next_double();
        } while (u1 <= 1e-300);
        u2 = next_double();
        double r = std::sqrt(-2.0 * std::log(u1));
        double theta = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(theta);
        has_spare_ = true;
        return r * std::cos(theta);
    }

    // Exact Poisson sampling: Knuth product method for small means, PTRS
    // rejection (Hormann 1993) for large ones.
    uint32_t poisson(double lambda);

  private:
    uint64_t state_;
    uint64_t inc_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

}  // namespace p2p
