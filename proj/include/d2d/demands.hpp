#pragma once

// Demand vectors: which file each user requests (f) and which packet window
// (segment pointer s; user u wants packets s_u .. s_u+Lp-1 of file f_u).
//
// Worst-case demand generation follows the converse construction: exhaustive
// enumeration of all m^n request vectors while that count fits under a cap,
// otherwise the two structured families the cut-set bound is built from —
// the m cyclic shifts of the periodic vector (1,2,...,m,1,2,...) and, for
// each l, the floor(m/l) block vectors covering files {l(j-1)+1 .. jl}.

#include <functional>
#include <vector>

#include "d2d/common.hpp"
#include "d2d/params.hpp"

namespace d2d {

struct Demand {
    std::vector<int> files;     // length n, entries in 1..m
    std::vector<int> segments;  // length n, entries in 1..L-Lp+1

    void validate(const SystemParams& p) const {
        if (static_cast<int>(files.size()) != p.n || static_cast<int>(segments.size()) != p.n)
            throw InvalidParams("demand vectors must have length n");
        for (int f : files)
            if (f < 1 || f > p.m) throw InvalidParams("demand file index out of range");
        for (int s : segments)
            if (s < 1 || s > p.L - p.Lp + 1)
                throw InvalidParams("segment pointer window leaves [1, L]");
    }
};

inline std::vector<int> all_ones_segments(const SystemParams& p) {
    return std::vector<int>(static_cast<std::size_t>(p.n), 1);
}

// The m cyclic shifts of the periodic vector (1, 2, ..., m, 1, 2, ...).
inline std::vector<std::vector<int>> periodic_family(int n, int m) {
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(m));
    for (int j = 1; j <= m; ++j) {
        std::vector<int> f(static_cast<std::size_t>(n));
        for (int u = 1; u <= n; ++u) f[u - 1] = (j - 1 + u - 1) % m + 1;
        out.push_back(std::move(f));
    }
    return out;
}

// Block vectors for block width l: the j-th vector requests files
// {l(j-1)+1, ..., jl} on the first l users and repeats the block cyclically
// on the remaining users.
inline std::vector<std::vector<int>> block_family(int n, int m, int l) {
    if (l < 1 || l > m) throw InvalidParams("block width out of range");
    std::vector<std::vector<int>> out;
    for (int j = 1; j <= m / l; ++j) {
        std::vector<int> f(static_cast<std::size_t>(n));
        for (int u = 1; u <= n; ++u) f[u - 1] = l * (j - 1) + (u - 1) % l + 1;
        out.push_back(std::move(f));
    }
    return out;
}

constexpr i64 kDemandEnumerationCap = 100000;

// File-vector part of worst_case_demands: exhaustive below the cap, else the
// structured periodic + block families (all l up to min(m, n)).
inline std::vector<std::vector<int>> worst_case_file_vectors(const SystemParams& p,
                                                             i64 cap = kDemandEnumerationCap) {
    i64 total = 1;
    bool exhaustive = true;
    for (int u = 0; u < p.n; ++u) {
        total *= p.m;
        if (total > cap) {
            exhaustive = false;
            break;
        }
    }
    std::vector<std::vector<int>> out;
    if (exhaustive) {
        std::vector<int> f(static_cast<std::size_t>(p.n), 1);
        for (;;) {
            out.push_back(f);
            int u = p.n - 1;
            while (u >= 0 && f[u] == p.m) f[u--] = 1;
            if (u < 0) break;
            ++f[u];
        }
        return out;
    }
    for (auto& f : periodic_family(p.n, p.m)) out.push_back(std::move(f));
    int lmax = p.m < p.n ? p.m : p.n;
    for (int l = 1; l <= lmax; ++l)
        for (auto& f : block_family(p.n, p.m, l)) out.push_back(std::move(f));
    return out;
}

// Calls fn for every worst-case demand, crossing file vectors with segment
// pointers: all (L-Lp+1)^n segment combinations while under the cap,
// otherwise the all-ones pointer only.
inline void for_each_worst_case_demand(const SystemParams& p,
                                       const std::function<void(const Demand&)>& fn,
                                       i64 cap = kDemandEnumerationCap) {
    auto files = worst_case_file_vectors(p, cap);
    int seg_range = p.L - p.Lp + 1;
    i64 seg_total = 1;
    bool seg_exhaustive = true;
    for (int u = 0; u < p.n; ++u) {
        seg_total *= seg_range;
        if (seg_total > cap || seg_total * static_cast<i64>(files.size()) > cap) {
            seg_exhaustive = false;
            break;
        }
    }
    Demand d;
    for (const auto& f : files) {
        d.files = f;
        if (!seg_exhaustive || seg_range == 1) {
            d.segments = all_ones_segments(p);
            d.validate(p);
            fn(d);
            continue;
        }
        std::vector<int> s(static_cast<std::size_t>(p.n), 1);
        for (;;) {
            d.segments = s;
            d.validate(p);
            fn(d);
            int u = p.n - 1;
            while (u >= 0 && s[u] == seg_range) s[u--] = 1;
            if (u < 0) break;
            ++s[u];
        }
    }
}

}  // namespace d2d
