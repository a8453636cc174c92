#pragma once

// Deterministic, splittable randomness. Every random object in the simulator
// is derived from a single 64-bit run seed plus a domain-separation tag, so a
// recorded seed reproduces a run bit-for-bit on any platform (no reliance on
// implementation-defined std:: distributions).

#include <algorithm>
#include <cstdint>
#include <string_view>
#include <utility>

#include "d2d/common.hpp"

namespace d2d {

// SplitMix64 step (Steele/Lea/Flood mixing constants).
inline u64 splitmix64(u64& state) {
    u64 z = (state += 0x9E3779B97F4A7C15ull);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

class Rng {
  public:
    explicit Rng(u64 seed) : state_(seed) {
        // Warm up so nearby seeds diverge immediately.
        next();
        next();
    }

    u64 next() { return splitmix64(state_); }

    // Uniform in [0, bound) via rejection sampling — no modulo bias.
    u64 below(u64 bound) {
        if (bound == 0) throw ConfigError("rng bound must be positive");
        u64 threshold = (0 - bound) % bound;  // 2^64 mod bound
        for (;;) {
            u64 v = next();
            if (v >= threshold) return v % bound;
        }
    }

    void fill(Bytes& out) {
        std::size_t i = 0;
        while (i + 8 <= out.size()) {
            u64 v = next();
            for (int b = 0; b < 8; ++b) out[i++] = static_cast<u8>(v >> (8 * b));
        }
        if (i < out.size()) {
            u64 v = next();
            for (int b = 0; b < 8 && i < out.size(); ++b) out[i++] = static_cast<u8>(v >> (8 * b));
        }
    }

    // First `count` entries of a Fisher–Yates shuffle of {0..universe-1},
    // returned sorted ascending: a uniform sample without replacement.
    std::vector<int> sample_without_replacement(int universe, int count) {
        if (count < 0 || count > universe)
            throw ConfigError("sample size out of range");
        std::vector<int> pool(universe);
        for (int i = 0; i < universe; ++i) pool[i] = i;
        for (int i = 0; i < count; ++i) {
            int j = i + static_cast<int>(below(static_cast<u64>(universe - i)));
            std::swap(pool[i], pool[j]);
        }
        std::vector<int> picked(pool.begin(), pool.begin() + count);
        std::sort(picked.begin(), picked.end());
        return picked;
    }

  private:
    u64 state_;
};

// Derives an independent stream for (seed, tag, indices...). Streams with
// different tags or indices never collide in practice (full 64-bit mixing).
inline u64 derive_seed(u64 seed, std::string_view tag, u64 a = 0, u64 b = 0, u64 c = 0) {
    u64 s = seed;
    auto absorb = [&s](u64 v) {
        u64 st = s ^ v;
        s = splitmix64(st);  // fold the advanced state and its mix together
        s ^= st;
    };
    for (char ch : tag) absorb(static_cast<u64>(static_cast<unsigned char>(ch)));
    absorb(a * 0xA24BAED4963EE407ull + 1);
    absorb(b * 0x9FB21C651E98DF25ull + 2);
    absorb(c * 0xD6E8FEB86659FD93ull + 3);
    return s;
}

}  // namespace d2d
