#pragma once

// The content library: m files of L packets, each packet F uniformly random
// bits, generated reproducibly from (seed, file, packet). Files and packets
// are 1-based in the public API, matching the demand vectors.

#include "d2d/bits.hpp"
#include "d2d/common.hpp"
#include "d2d/params.hpp"
#include "d2d/rng.hpp"

namespace d2d {

struct Library {
    int m = 0;
    int L = 0;
    i64 F = 0;
    std::vector<Bytes> packets;  // index (file-1)*L + (packet-1)

    const Bytes& packet(int file, int pkt) const {
        if (file < 1 || file > m || pkt < 1 || pkt > L)
            throw ConfigError("library access out of range");
        return packets[static_cast<std::size_t>(file - 1) * L + (pkt - 1)];
    }
};

inline Library gen_library(const SystemParams& params, u64 seed) {
    Library lib;
    lib.m = params.m;
    lib.L = params.L;
    lib.F = params.F;
    lib.packets.resize(static_cast<std::size_t>(params.m) * params.L);
    for (int f = 1; f <= params.m; ++f) {
        for (int p = 1; p <= params.L; ++p) {
            Rng rng(derive_seed(seed, "library", static_cast<u64>(f), static_cast<u64>(p)));
            Bytes buf(bytes_for_bits(params.F));
            rng.fill(buf);
            lib.packets[static_cast<std::size_t>(f - 1) * params.L + (p - 1)] = std::move(buf);
        }
    }
    return lib;
}

}  // namespace d2d
