#pragma once

// System parameters for the one-hop D2D caching network:
//   n     nodes on a grid over the unit square
//   m     files in the library, L packets per file, F bits per packet
//   M     per-node cache size in files (exact rational; memory sharing needs
//         fractional M, and cache-size identities are checked exactly)
//   Lp    requested segment length in packets (each user asks for packets
//         s_u .. s_u+Lp-1 of its file)
//   r     transmission range, delta: interference guard-zone parameter
//         (both exact rationals: protocol-model distance comparisons and the
//         reuse-factor ceilings are then decidable without float fuzz)
//   cr    link rate in bits per channel use, as a non-increasing step table
//         over the range r (longer links cannot be faster)
//
// The load t = M*n/m is the aggregate-cache-to-library ratio; t >= 1 is
// necessary for the network to serve arbitrary demands from caches alone.

#include <optional>
#include <utility>
#include <vector>

#include "d2d/common.hpp"
#include "d2d/rational.hpp"

namespace d2d {

struct CrTable {
    // (range threshold, rate) pairs sorted by ascending range. The rate at r
    // is the entry with the largest threshold <= r.
    std::vector<std::pair<Rational, Rational>> steps;

    Rational at(const Rational& r) const {
        if (steps.empty()) throw ConfigError("empty link-rate table");
        std::optional<Rational> best;
        for (const auto& [thr, rate] : steps) {
            if (thr <= r) best = rate;
        }
        if (!best) throw ConfigError("link-rate table has no entry at or below requested range");
        return *best;
    }

    void validate() const {
        for (std::size_t i = 0; i + 1 < steps.size(); ++i) {
            if (steps[i].first >= steps[i + 1].first)
                throw InvalidParams("link-rate table ranges must be strictly increasing");
            if (steps[i + 1].second > steps[i].second)
                throw InvalidParams("link-rate table must be non-increasing in range");
        }
        for (const auto& [thr, rate] : steps) {
            if (thr < Rational(0)) throw InvalidParams("link-rate table range must be non-negative");
            if (rate <= Rational(0)) throw InvalidParams("link rate must be positive");
        }
    }
};

struct SystemParams {
    int n = 0;
    int m = 0;
    Rational M;
    int L = 1;
    int Lp = 1;
    i64 F = 0;
    Rational r;
    Rational delta;
    CrTable cr;

    Rational t() const { return M * Rational(n) / Rational(m); }
    bool integer_t() const { return t().is_integer(); }
    int t_int() const {
        Rational tv = t();
        if (!tv.is_integer()) throw NonIntegerT("t = " + tv.str());
        return static_cast<int>(tv.num());
    }
    Rational cr_at_r() const { return cr.at(r); }
    i64 packet_bytes() const { return F / 8; }
};

// Validates and derives; rejects t < 1 (the necessity condition) and any
// non-positive or inconsistent field.
inline SystemParams make_params(int n, int m, Rational M, int L, int Lp, i64 F,
                                Rational r = Rational(2), Rational delta = Rational(1),
                                CrTable cr = {}) {
    if (n <= 0) throw InvalidParams("n must be positive");
    if (m <= 0) throw InvalidParams("m must be positive");
    if (L <= 0) throw InvalidParams("L must be positive");
    if (Lp <= 0 || Lp > L) throw InvalidParams("need 1 <= Lp <= L");
    if (F <= 0) throw InvalidParams("F must be positive");
    if (F % 8 != 0) throw InvalidParams("F must be a multiple of 8 bits");
    if (M <= Rational(0) || M > Rational(m)) throw InvalidParams("need 0 < M <= m");
    if (r <= Rational(0)) throw InvalidParams("range r must be positive");
    if (delta <= Rational(0)) throw InvalidParams("delta must be positive");
    if (cr.steps.empty()) cr.steps.push_back({Rational(0), Rational(1)});
    cr.validate();

    SystemParams p{n, m, M, L, Lp, F, r, delta, std::move(cr)};
    if (p.t() < Rational(1))
        throw InvalidParams("aggregate cache too small: t = Mn/m = " + p.t().str() + " < 1");
    return p;
}

}  // namespace d2d
