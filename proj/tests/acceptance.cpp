// Acceptance suite: one self-contained check per shipped guarantee. Each
// check prints a PASS/FAIL line with its runtime and a short summary; the
// binary exits nonzero if any check fails (including its runtime budget).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "d2d/analysis.hpp"
#include "d2d/demands.hpp"
#include "d2d/det_scheme.hpp"
#include "d2d/geometry.hpp"
#include "d2d/library.hpp"
#include "d2d/mds.hpp"
#include "d2d/params.hpp"
#include "d2d/rand_scheme.hpp"
#include "d2d/rng.hpp"
#include "d2d/schedule.hpp"

using namespace d2d;

namespace {

bool packets_match(const SystemParams& p, const Library& lib, const Demand& d, int u,
                   const std::vector<Bytes>& got) {
    if (static_cast<int>(got.size()) != p.Lp) return false;
    for (int k = 0; k < p.Lp; ++k) {
        const Bytes& want = lib.packet(d.files[static_cast<size_t>(u - 1)],
                                       d.segments[static_cast<size_t>(u - 1)] + k);
        if (got[static_cast<size_t>(k)] != want) return false;
    }
    return true;
}

// Every node of every demand decodes byte-exactly and every transcript has
// exactly the given rate; returns the number of demands exercised.
i64 decode_all_demands(const SystemParams& p, u64 lib_seed, const Rational& want_rate,
                       bool& ok) {
    Library lib = gen_library(p, lib_seed);
    DetCaches caches = place_det_any(p, lib);
    i64 combos = 0;
    for_each_worst_case_demand(p, [&](const Demand& d) {
        ++combos;
        std::vector<CodedTransmission> txs = deliver_det(p, caches, d);
        ok = ok && rate_det_measured(txs, p) == want_rate;
        for (int u = 1; u <= p.n; ++u)
            ok = ok && packets_match(p, lib, d, u, decode_det(u, txs, caches, p, d));
    });
    return combos;
}

// --- check 1: the 3-user corner case is exactly optimal -------------------
bool check_three_user(std::string& detail) {
    SystemParams p = make_params(3, 3, Rational(2), 3, 1, 3072);
    bool ok = true;
    i64 combos = decode_all_demands(p, 1, Rational(1, 2), ok);
    ok = ok && combos == 729;  // 27 request vectors x 27 segment pointers
    ok = ok && rate_converse(3, 3, Rational(2)) == Rational(1, 2);
    detail = std::to_string(combos) +
             " demand/segment combos decode byte-exact; rate = converse = 1/2";
    return ok;
}

// --- check 2: two-user worked instances, incl. fractional cache sharing ---
bool check_two_user(std::string& detail) {
    bool ok = true;
    SystemParams pair = make_params(2, 2, Rational(1), 1, 1, 3072);
    i64 c1 = decode_all_demands(pair, 2, Rational(1), ok);

    SystemParams shared = make_params(2, 3, Rational(2), 2, 1, 3072);
    i64 c2 = decode_all_demands(shared, 3, Rational(2, 3), ok);
    ok = ok && rate_converse(2, 3, Rational(2)) == Rational(2, 3);
    detail = "(2,2,M=1) rate 1 over " + std::to_string(c1) + " combos; (2,3,M=2) rate 2/3 = " +
             "converse over " + std::to_string(c2) + " combos (split caches)";
    return ok;
}

// --- check 3: measured = closed form on a grid; converse below it at scale -
bool check_rate_identity(std::string& detail) {
    bool ok = true;
    i64 measured = 0;
    for (int n = 2; n <= 6 && ok; ++n)
        for (int m = 1; m <= 6 && ok; ++m)
            for (int t = 1; t <= n && ok; ++t) {
                Rational M = Rational(t * m, n);
                SystemParams p = make_params(n, m, M, 1, 1, 40320);
                Library lib = gen_library(p, 4);
                DetCaches caches = place_det_any(p, lib);
                Demand d{periodic_family(n, m).front(), all_ones_segments(p)};
                Rational rate = rate_det_measured(deliver_det(p, caches, d), p);
                // (m/M)(1 - M/m) = m/M - 1, the closed form at integer t
                ok = ok && rate == Rational(m) / M - Rational(1);
                ok = ok && rate == rate_det_formula(n, m, M);
                ++measured;
            }

    std::mt19937_64 rng(7);
    std::uniform_int_distribution<i64> draw_n(1, 10000), draw_m(1, 2000), draw_b(1, 6);
    i64 points = 1000000;
    for (i64 i = 0; i < points && ok; ++i) {
        i64 n = draw_n(rng), m = draw_m(rng), b = draw_b(rng);
        i64 lo = (m * b + n - 1) / n;  // smallest numerator with t >= 1
        std::uniform_int_distribution<i64> draw_a(lo, m * b);
        Rational M(draw_a(rng), b);
        ok = ok && rate_converse(n, m, M) <= rate_det_formula(n, m, M);
    }
    detail = std::to_string(measured) + " integer-t transcripts match (m/M)(1-M/m); converse <= " +
             "achievable on " + std::to_string(points) + " random (n,m,M) points, exact rationals";
    return ok;
}

// --- check 4: decentralized placement matches its expected-rate ledger ----
bool check_decentralized(std::string& detail) {
    const double kRho = 0.95;
    RandRate formula = rate_rand_formula(3, 3, Rational(2), kRho);
    bool ok = std::fabs(formula.exact - 0.77) <= 0.005;

    SystemParams p = make_params(3, 3, Rational(2), 1, 1, 3840);
    Library lib = gen_library(p, 5);
    Demand d{periodic_family(3, 3).front(), all_ones_segments(p)};
    const i64 K = adjust_K(p, 240);
    ok = ok && K == 240;

    const int seeds = 50;
    double rate_sum = 0;
    for (int i = 0; i < seeds; ++i) {
        RandPlacement pl = place_random(p, lib, K, kRho, derive_seed(11, "rate", i));
        rate_sum += rate_random_measured(deliver_random(p, pl, d), p, K).to_double();
    }
    double mean = rate_sum / seeds;
    ok = ok && std::fabs(mean - formula.exact) <= 0.05 * formula.exact;

    RhoSolution backed = solve_rho_star(p.t().to_double(), 0.05);
    int full = 0;
    for (int i = 0; i < seeds; ++i) {
        RandPlacement pl = place_random(p, lib, K, backed.rho, derive_seed(11, "cover", i));
        std::vector<RandTransmission> txs = deliver_random(p, pl, d);
        bool all = true;
        for (int u = 1; u <= p.n; ++u) {
            RandDecodeResult res = decode_random(u, txs, pl, p, d);
            all = all && res.success && packets_match(p, lib, d, u, res.packets);
        }
        full += all ? 1 : 0;
    }
    ok = ok && full * 10 >= seeds * 9;

    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "formula %.4f (target 0.77+-0.005); %d-seed mean %.4f (within 5%%); "
                  "%d/%d seeds decode fully at 5%% back-off",
                  formula.exact, seeds, mean, full, seeds);
    detail = buf;
    return ok;
}

// --- check 5: cache-hit fixed point against an independent bisection ------
bool check_fixed_point(std::string& detail) {
    auto f = [](double t, double x) { return 1.0 - std::exp(-t * x) - x; };
    double lo = 1e-9, hi = 1.0;
    for (int it = 0; it < 200; ++it) {
        double mid = 0.5 * (lo + hi);
        (f(2.0, mid) > 0 ? lo : hi) = mid;
    }
    double bisected = 0.5 * (lo + hi);
    RhoSolution two = solve_rho_star(2.0, 0.001);
    bool ok = std::fabs(two.rho_star - bisected) <= 1e-10;

    for (double t : {1.1, 1.5, 2.0, 5.0, 50.0}) {
        RhoSolution s = solve_rho_star(t, 0.001);
        ok = ok && s.residual <= 1e-12;
    }

    // informational only: a sometimes-quoted value for t = 2 does not solve
    // the fixed-point equation, so it is reported here and not asserted
    double quoted = 0.9510;
    char buf[192];
    std::snprintf(buf, sizeof buf,
                  "rho*(2) = %.9f matches bisection to 1e-10; residuals <= 1e-12 on "
                  "t in {1.1,1.5,2,5,50}; note: quoted 0.9510 leaves residual %.3f, not asserted",
                  two.rho_star, std::fabs(f(2.0, quoted)));
    detail = buf;
    return ok;
}

// --- check 6: unit-load hashing delivery ----------------------------------
bool check_hashing_t1(std::string& detail) {
    SystemParams p = make_params(3, 3, Rational(1), 1, 1, 192);
    Library lib = gen_library(p, 6);
    Demand d{periodic_family(3, 3).front(), all_ones_segments(p)};
    const int seeds = 100;
    int clean = 0;
    bool ok = true;
    for (int i = 1; i <= seeds; ++i) {
        T1Result res = scheme_t1(p, lib, d, 12, 16, derive_seed(9, "t1", i));
        ok = ok && res.measured_rate == Rational(2);  // n - t with t = 1
        if (res.rank_failures != 0) continue;
        bool bytes_ok = true;
        for (int u = 1; u <= p.n; ++u)
            bytes_ok = bytes_ok &&
                       packets_match(p, lib, d, u, res.packets[static_cast<size_t>(u - 1)]);
        ok = ok && bytes_ok;
        ++clean;
    }
    ok = ok && clean >= 99;
    detail = std::to_string(clean) + "/" + std::to_string(seeds) +
             " seeds decode at full rank (need >= 99); measured rate exactly 2 on every seed";
    return ok;
}

// --- check 7: erasure code survives every pattern exhaustively ------------
bool check_mds_exhaustive(std::string& detail) {
    std::mt19937_64 rng(42);
    bool ok = true;
    i64 patterns = 0;
    for (int K = 1; K <= 12 && ok; ++K)
        for (int red = 0; red <= 4 && ok; ++red) {
            int nsym = K + red;
            MdsCode code(K, nsym);
            std::vector<Bytes> data(static_cast<size_t>(K), Bytes(6));
            for (Bytes& sym : data)
                for (unsigned char& byte : sym) byte = static_cast<unsigned char>(rng());
            std::vector<Bytes> enc = mds_encode(code, data);

            std::vector<int> pick(static_cast<size_t>(K));
            for (int i = 0; i < K; ++i) pick[static_cast<size_t>(i)] = i;
            for (;;) {  // every K-subset of the nsym coordinates
                std::vector<CodedSymbol> rx;
                for (int idx : pick) rx.push_back({idx, enc[static_cast<size_t>(idx)]});
                ok = ok && mds_decode(code, rx) == data;
                ++patterns;
                int j = K - 1;
                while (j >= 0 && pick[static_cast<size_t>(j)] == nsym - K + j) --j;
                if (j < 0 || !ok) break;
                ++pick[static_cast<size_t>(j)];
                for (int l = j + 1; l < K; ++l)
                    pick[static_cast<size_t>(l)] = pick[static_cast<size_t>(l - 1)] + 1;
            }
        }
    detail = std::to_string(patterns) +
             " erasure patterns over K <= 12, redundancy <= 4: zero decode failures";
    return ok;
}

// --- check 8: reuse coloring is conflict-free; clustered throughput exact --
bool check_protocol_reuse(std::string& detail) {
    bool ok = true;
    // 7x7 grid, guard fraction 2/5, 9-phase coloring: no violation in any
    // slot with one transmitter per same-phase cluster. Feasibility is
    // pairwise (a link in range; an interferer far enough from a receiver),
    // so exhausting node pairs covers every such slot; full slots are also
    // run through the checker directly, one per transmitter position.
    GridNetwork net = GridNetwork::make(49);
    Rational delta(2, 5), r(3, 7);
    ClusterLayout lay = make_layout(net, 2, delta);
    ok = ok && lay.colors == 9;
    Rational guard2 = (Rational(1) + delta) * (Rational(1) + delta) * r * r;
    for (int a = 1; a <= net.n; ++a)
        for (int b = 1; b <= net.n; ++b) {
            if (a == b) continue;
            int ca = lay.cluster_of[a - 1], cb = lay.cluster_of[b - 1];
            if (ca == cb)
                ok = ok && net.dist2(a, b) < r * r;  // strictly in range
            else if (lay.color_of[ca] == lay.color_of[cb])
                ok = ok && net.dist2(a, b) >= guard2;  // guard-zone clearance
        }
    i64 slots = 0;
    for (int color = 1; color <= lay.colors && ok; ++color)
        for (int pos = 0; pos < lay.q * lay.q; ++pos) {
            Slot slot;
            for (std::size_t c = 0; c < lay.members.size(); ++c) {
                const std::vector<int>& mem = lay.members[c];
                if (lay.color_of[c] != color || mem.size() < 2) continue;
                Link link;
                link.tx = mem[static_cast<size_t>(pos) % mem.size()];
                for (int u : mem)
                    if (u != link.tx) link.rx.push_back(u);
                slot.links.push_back(std::move(link));
            }
            if (slot.links.empty()) continue;
            ok = ok && check_protocol_feasible(net, slot, r, delta).ok;
            ++slots;
        }

    // 64-node clustered delivery: measured throughput is exactly
    // (C_r / colors) / R_c and stays below the cut-set throughput ceiling
    CrTable cr;
    cr.steps.emplace_back(Rational(0), Rational(256));
    SystemParams p = make_params(64, 4, Rational(1), 1, 1, 1024, Rational(2, 5), Rational(2, 5),
                                 cr);
    Library lib = gen_library(p, 8);
    ClusterLayout lay64 = build_clusters(p);
    Demand d;
    for (int u = 1; u <= p.n; ++u) d.files.push_back((u - 1) % p.m + 1);
    d.segments = all_ones_segments(p);
    ClusteredDet run = clustered_det(p, lib, d, lay64);
    ScheduleResult sched = schedule(p, run.messages, &lay64);
    Rational tput = throughput_measured(p, sched.t_s);
    Rational cluster_rate = rate_det_formula(lay64.gc, p.m, p.M);
    ok = ok && tput == Rational(256) / Rational(lay64.colors) / cluster_rate;
    ThroughputBounds tb = throughput_bounds(p);
    ok = ok && tb.achievable == tput && tput <= tb.upper;

    detail = "49-node 9-phase coloring: all node pairs + " + std::to_string(slots) +
             " full slots clean; 64-node throughput " + tput.str() + " = (256/9)/3 <= ceiling " +
             tb.upper.str();
    return ok;
}

// --- check 9: sweep tables are ordered and monotone ------------------------
bool check_sweeps(std::string& detail) {
    bool ok = true;
    i64 rows_total = 0;
    auto check_table = [&](i64 n, i64 m, i64 lo, i64 hi) {
        std::vector<RateReport> rows = sweep_rates(n, m, lo, hi);
        rows_total += static_cast<i64>(rows.size());
        const double eps = 1e-9;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            const RateReport& row = rows[i];
            ok = ok && row.r_converse <= row.r_det;
            if (row.t > Rational(1)) {  // randomized columns meaningful here
                ok = ok && row.r_det.to_double() <= row.r_rand_exact + eps;
                ok = ok && row.r_rand_exact <= row.r_rand_upper + eps;
            }
            if (i > 0) {
                const RateReport& up = rows[i - 1];
                ok = ok && row.r_converse <= up.r_converse;
                ok = ok && row.r_det <= up.r_det;
                ok = ok && row.r_rand_exact <= up.r_rand_exact + eps;
                ok = ok && row.r_rand_upper <= up.r_rand_upper + eps;
            }
        }
    };
    check_table(100, 50, 1, 50);
    check_table(50, 500, 10, 500);
    detail = std::to_string(rows_total) +
             " sweep rows: converse <= achievable <= randomized <= its upper form (t > 1), "
             "all four columns non-increasing in M";
    return ok;
}

// --- check 10: coded-vs-converse ratios at the two large instances ---------
bool check_gap_ratios(std::string& detail) {
    GapCertificate big = gap_certificate(10000, 100, Rational(1), GapMode::det);
    GapCertificate square = gap_certificate(100, 100, Rational(25), GapMode::det);
    bool ok = big.ratio <= 4.5 && square.ratio <= 6.5;
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "(n=10^4, m=100, M=1): ratio %.3f <= 4.5; (n=100, m=100, M=25): "
                  "ratio %.3f <= 6.5",
                  big.ratio, square.ratio);
    detail = buf;
    return ok;
}

struct Check {
    const char* name;
    double limit_s;
    std::function<bool(std::string&)> run;
};

}  // namespace

int main() {
    const std::vector<Check> checks = {
        {"three-user exact optimum", 1.0, check_three_user},
        {"two-user worked instances", 1.0, check_two_user},
        {"rate identity and converse ordering", 60.0, check_rate_identity},
        {"decentralized placement statistics", 60.0, check_decentralized},
        {"cache-hit fixed point", 1.0, check_fixed_point},
        {"unit-load hashing delivery", 10.0, check_hashing_t1},
        {"exhaustive erasure decodability", 30.0, check_mds_exhaustive},
        {"interference-free reuse and clustered throughput", 10.0, check_protocol_reuse},
        {"rate sweep ordering and monotonicity", 120.0, check_sweeps},
        {"achievable-to-converse gap ratios", 1.0, check_gap_ratios},
    };

    int failures = 0;
    for (std::size_t i = 0; i < checks.size(); ++i) {
        const Check& c = checks[i];
        std::string detail;
        bool ok = false;
        auto start = std::chrono::steady_clock::now();
        try {
            ok = c.run(detail);
        } catch (const std::exception& e) {
            detail = std::string("exception: ") + e.what();
        }
        double elapsed =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        bool in_time = elapsed < c.limit_s;
        bool pass = ok && in_time;
        failures += pass ? 0 : 1;
        std::printf("%2zu  %s  %6.2fs (limit %3.0fs)  %s — %s%s\n", i + 1,
                    pass ? "PASS" : "FAIL", elapsed, c.limit_s, c.name, detail.c_str(),
                    !ok ? "" : (in_time ? "" : " [over time budget]"));
    }
    std::printf("acceptance: %zu/%zu checks passed\n", checks.size() - failures, checks.size());
    return failures == 0 ? 0 : 1;
}
