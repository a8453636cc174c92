#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <set>
#include <vector>

#include "d2d/bits.hpp"
#include "d2d/combinatorics.hpp"
#include "d2d/demands.hpp"
#include "d2d/det_scheme.hpp"
#include "d2d/library.hpp"
#include "d2d/params.hpp"

using namespace d2d;

namespace {

// Runs delivery + decode for one demand and checks every node recovers its
// requested packets byte-exactly.
void roundtrip(const SystemParams& p, const Library& lib, const DetCaches& caches,
               const Demand& d) {
    std::vector<CodedTransmission> txs = deliver_det(p, caches, d);
    for (int u = 1; u <= p.n; ++u) {
        std::vector<Bytes> got = decode_det(u, txs, caches, p, d);
        REQUIRE(got.size() == static_cast<std::size_t>(p.Lp));
        for (int k = 0; k < p.Lp; ++k) {
            const Bytes& want = lib.packet(d.files[u - 1], d.segments[u - 1] + k);
            REQUIRE(got[k] == want);
        }
    }
}

void roundtrip_all_demands(const SystemParams& p, u64 seed) {
    Library lib = gen_library(p, seed);
    DetCaches caches = place_det_any(p, lib);
    for (int u = 1; u <= p.n; ++u) CHECK(caches.stored_bits(u) == p.M * Rational(p.F * p.L));
    for_each_worst_case_demand(p, [&](const Demand& d) { roundtrip(p, lib, caches, d); });
}

}  // namespace

TEST_CASE("subpacket labels partition the packet and ordinals are canonical") {
    for (int n : {3, 4, 5}) {
        for (int t = 1; t <= n; ++t) {
            i64 D = t * binomial_i64(n, t);
            std::set<i64> ordinals;
            auto T = first_subset(t);
            do {
                for (int j = 1; j <= t; ++j) {
                    i64 ord = label_ordinal(SubpacketLabel{T, j}, n, t);
                    CHECK(ord >= 0);
                    CHECK(ord < D);
                    ordinals.insert(ord);
                }
            } while (next_subset(T, n));
            CHECK(static_cast<i64>(ordinals.size()) == D);

            // bit ranges tile [0, len) in order
            i64 len = 10007;  // deliberately not divisible by D
            i64 covered = 0;
            for (i64 ord = 0; ord < D; ++ord) {
                auto [lo, hi] = subpacket_bit_range(len, D, ord);
                CHECK(lo == covered);
                CHECK(hi >= lo);
                covered = hi;
            }
            CHECK(covered == len);
        }
    }
}

TEST_CASE("a node caches exactly the labels containing it") {
    int n = 5, t = 2;
    for (int u = 1; u <= n; ++u) {
        auto labels = labels_for_node(n, t, u);
        CHECK(static_cast<i64>(labels.size()) == t * binomial_i64(n - 1, t - 1));
        for (const auto& lab : labels)
            CHECK(std::binary_search(lab.T.begin(), lab.T.end(), u));
    }
}

TEST_CASE("three-user worked example: transcript shape and exact rate") {
    SystemParams p = make_params(3, 3, Rational(2), 3, 1, 3072);
    Library lib = gen_library(p, 42);
    DetCaches caches = place_det(p, lib);
    REQUIRE(caches.parts.size() == 1);
    CHECK(caches.parts[0].t == 2);
    CHECK(caches.parts[0].D == 6);

    Demand d{{1, 2, 3}, {1, 1, 1}};
    std::vector<CodedTransmission> txs = deliver_det(p, caches, d);
    REQUIRE(txs.size() == 3);  // one (t+1)-subset {1,2,3}, every member sends once
    for (const auto& tx : txs) {
        CHECK(tx.group == std::vector<int>{1, 2, 3});
        CHECK(tx.constituents.size() == 2);
        CHECK(tx.nominal_bits() == Rational(3072, 6));
        // sender w serves receiver v the piece (S \ {v}, rank of w in S \ {v})
        for (const auto& c : tx.constituents) {
            CHECK(c.receiver != tx.sender);
            CHECK(c.file == d.files[c.receiver - 1]);
            std::vector<int> T;
            for (int x : tx.group)
                if (x != c.receiver) T.push_back(x);
            CHECK(c.label.T == T);
            int rank = 1 + static_cast<int>(std::lower_bound(T.begin(), T.end(), tx.sender) -
                                            T.begin());
            CHECK(c.label.j == rank);
        }
    }
    CHECK(rate_det_measured(txs, p) == Rational(1, 2));
    roundtrip(p, lib, caches, d);
}

TEST_CASE("pair worked example: rate exactly 1") {
    SystemParams p = make_params(2, 2, Rational(1), 1, 1, 3072);
    Library lib = gen_library(p, 9);
    DetCaches caches = place_det_any(p, lib);
    Demand d{{1, 2}, {1, 1}};
    auto txs = deliver_det(p, caches, d);
    CHECK(rate_det_measured(txs, p) == Rational(1));
    roundtrip(p, lib, caches, d);
}

TEST_CASE("memory sharing splits the packet at a whole-bit boundary") {
    SystemParams p = make_params(2, 3, Rational(2), 2, 1, 3072);
    SharingSplit s = memory_share(p);
    CHECK(s.t1 == 1);
    CHECK(s.t2 == 2);
    CHECK(s.M1 == Rational(3, 2));
    CHECK(s.M2 == Rational(3));
    CHECK(s.alpha == Rational(2, 3));
    CHECK((s.alpha * Rational(p.F)).is_integer());

    Library lib = gen_library(p, 5);
    DetCaches caches = place_det_any(p, lib);
    REQUIRE(caches.parts.size() == 2);
    CHECK(caches.parts[0].view.offset == 0);
    CHECK(caches.parts[0].view.len == 2048);
    CHECK(caches.parts[1].view.offset == 2048);
    CHECK(caches.parts[1].view.len == 1024);

    Demand d{{1, 2}, {1, 1}};
    auto txs = deliver_det(p, caches, d);
    CHECK(rate_det_measured(txs, p) == Rational(2, 3));
    roundtrip(p, lib, caches, d);
}

TEST_CASE("memory sharing only applies to fractional t, integer t only to place_det") {
    SystemParams integer_t = make_params(3, 3, Rational(2), 1, 1, 3072);
    CHECK_THROWS_AS(memory_share(integer_t), NotApplicable);
    SystemParams frac_t = make_params(3, 4, Rational(2), 1, 1, 1024);
    CHECK_THROWS_AS(place_det(frac_t, gen_library(frac_t, 1)), NonIntegerT);
}

TEST_CASE("full-cache corner: t = n delivers nothing and decodes from cache") {
    SystemParams p = make_params(3, 3, Rational(3), 1, 1, 3072);
    Library lib = gen_library(p, 11);
    DetCaches caches = place_det_any(p, lib);
    Demand d{{3, 1, 2}, {1, 1, 1}};
    auto txs = deliver_det(p, caches, d);
    CHECK(txs.empty());
    CHECK(rate_det_measured(txs, p) == Rational(0));
    roundtrip(p, lib, caches, d);
}

TEST_CASE("exhaustive byte-exact decode across demand families") {
    roundtrip_all_demands(make_params(3, 3, Rational(2), 3, 1, 3072), 1);
    roundtrip_all_demands(make_params(4, 4, Rational(2), 1, 1, 1536), 2);
    roundtrip_all_demands(make_params(4, 4, Rational(3), 1, 1, 1536), 3);
    roundtrip_all_demands(make_params(4, 2, Rational(1), 2, 2, 1024), 4);
    // fractional t = 3/2 via sharing, alpha = 1/2
    roundtrip_all_demands(make_params(3, 4, Rational(2), 1, 1, 1024), 5);
    // multi-round delivery (Lp = 2) with segment pointers
    roundtrip_all_demands(make_params(3, 3, Rational(2), 4, 2, 768), 6);
}

TEST_CASE("measured rate equals the closed form on every instance") {
    for (int n = 2; n <= 5; ++n) {
        for (int m = 2; m <= 5; ++m) {
            for (int tt = 1; tt <= n; ++tt) {
                Rational M = Rational(tt) * Rational(m, n);
                SystemParams p = make_params(n, m, M, 1, 1, 5 * 7 * 9 * 128);
                Library lib = gen_library(p, 101);
                DetCaches caches = place_det_any(p, lib);
                Demand d;
                for (int u = 1; u <= n; ++u) d.files.push_back((u - 1) % m + 1);
                d.segments = all_ones_segments(p);
                auto txs = deliver_det(p, caches, d);
                CHECK(rate_det_measured(txs, p) == Rational(n - tt, tt));
            }
        }
    }
}

TEST_CASE("a dropped transmission is detected, not papered over") {
    SystemParams p = make_params(3, 3, Rational(2), 1, 1, 3072);
    Library lib = gen_library(p, 21);
    DetCaches caches = place_det_any(p, lib);
    Demand d{{1, 2, 3}, {1, 1, 1}};
    auto txs = deliver_det(p, caches, d);
    REQUIRE(txs.size() == 3);
    std::vector<CodedTransmission> lost(txs.begin() + 1, txs.end());
    // node served by the dropped sender can no longer finish
    bool any_throw = false;
    for (int u = 1; u <= p.n; ++u) {
        try {
            decode_det(u, lost, caches, p, d);
        } catch (const MissingTransmission&) {
            any_throw = true;
        }
    }
    CHECK(any_throw);
}

TEST_CASE("transcripts are deterministic in the seed") {
    SystemParams p = make_params(4, 4, Rational(2), 1, 1, 1536);
    Demand d{{2, 4, 1, 3}, {1, 1, 1, 1}};
    auto run = [&](u64 seed) {
        Library lib = gen_library(p, seed);
        DetCaches caches = place_det_any(p, lib);
        return deliver_det(p, caches, d);
    };
    auto a = run(77), b = run(77), c = run(78);
    REQUIRE(a.size() == b.size());
    bool same = true, differs = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        same = same && a[i].payload == b[i].payload;
        differs = differs || a[i].payload != c[i].payload;
    }
    CHECK(same);
    CHECK(differs);
}
