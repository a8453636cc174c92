#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "d2d/analysis.hpp"
#include "d2d/combinatorics.hpp"
#include "d2d/params.hpp"
#include "d2d/rand_scheme.hpp"
#include "d2d/rng.hpp"

using namespace d2d;
using doctest::Approx;

TEST_CASE("deterministic rate closed form") {
    CHECK(rate_det_formula(3, 3, Rational(2)) == Rational(1, 2));
    CHECK(rate_det_formula(2, 2, Rational(1)) == Rational(1));
    CHECK(rate_det_formula(4, 4, Rational(1)) == Rational(3));
    // integer t: (m/M)(1 - M/m) = (n - t)/t
    for (i64 n = 2; n <= 12; ++n)
        for (i64 m = 2; m <= 12; ++m)
            for (i64 t = 1; t <= n; ++t)
                CHECK(rate_det_formula(n, m, Rational(t * m, n)) == Rational(n - t, t));
    // fractional t: the chord between neighbors, e.g. t = 4/3 at (2,3,2)
    CHECK(rate_det_formula(2, 3, Rational(2)) == Rational(2, 3));
    CHECK_THROWS_AS(rate_det_formula(3, 4, Rational(1, 2)), TLessThanOne);
}

TEST_CASE("naive multicast never exceeds sending the whole library") {
    CHECK(rate_det_naive(3, 3, Rational(2)) == Rational(1, 2));
    CHECK(rate_det_naive(100, 50, Rational(1, 2)) == Rational(50));
    CHECK(rate_det_naive(100, 50, Rational(1)) == Rational(49));
}

TEST_CASE("cut-set converse worked values") {
    CHECK(rate_converse(3, 3, Rational(2)) == Rational(1, 2));
    CHECK(rate_converse(2, 3, Rational(2)) == Rational(2, 3));
    CHECK(rate_converse(4, 4, Rational(1)) == Rational(1));
    CHECK(rate_converse(10000, 100, Rational(1)) == Rational(25));  // l = 50
    CHECK(rate_converse(100, 100, Rational(25)) == Rational(1));    // l = 2
}

TEST_CASE("block-scan converse equals the plain loop everywhere") {
    for (i64 n : {1, 2, 3, 5, 9, 12})
        for (i64 m = 1; m <= 14; ++m)
            for (i64 num = 1; num <= 2 * m; ++num)
                CHECK(rate_converse(n, m, Rational(num, 2)) ==
                      rate_converse_brute(n, m, Rational(num, 2)));

    Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        i64 n = 1 + static_cast<i64>(rng.below(100000));
        i64 m = 1 + static_cast<i64>(rng.below(100000));
        i64 den = 1 + static_cast<i64>(rng.below(7));
        i64 num = 1 + static_cast<i64>(rng.below(static_cast<u64>(m * den)));
        Rational M(num, den);
        CHECK(rate_converse(n, m, M) == rate_converse_brute(n, m, M));
    }
}

TEST_CASE("single-server reference point and its exact distance") {
    CHECK(rate_basestation_reference(3, 3, Rational(2)) == Rational(1, 3));
    CHECK(rate_basestation_reference(100, 50, Rational(10)) == Rational(80, 21));
    // integer t: det / reference = 1 + m/(nM) exactly
    for (i64 n = 2; n <= 10; ++n)
        for (i64 m = 2; m <= 10; ++m)
            for (i64 t = 1; t < n; ++t) {
                Rational M(t * m, n);
                Rational ratio = rate_det_formula(n, m, M) / rate_basestation_reference(n, m, M);
                CHECK(ratio == Rational(1) + Rational(m) / (Rational(n) * M));
            }
    // In general the raw curve satisfies curve/reference = 1 + m/(nM)
    // exactly, and the achievable envelope inflates the curve by a factor
    // strictly below 2 (sup approached at n = 2, t -> n), so the distance
    // stays inside [1 + m/(nM), 2(1 + m/(nM))].
    for (i64 n = 2; n <= 8; ++n)
        for (i64 m = 2; m <= 8; ++m)
            for (i64 num = 1; num <= 2 * m; ++num) {
                Rational M(num, 2);
                if (M * Rational(n, m) < Rational(1) || M > Rational(m)) continue;
                Rational bs = rate_basestation_reference(n, m, M);
                if (bs.is_zero()) continue;  // M = m: both rates vanish
                Rational ratio = rate_det_formula(n, m, M) / bs;
                Rational ident = Rational(1) + Rational(m) / (Rational(n) * M);
                CHECK(ident <= ratio);
                CHECK(ratio < Rational(2) * ident);
            }
}

TEST_CASE("binomial expectation E[1/(S+1)] closed form") {
    CHECK(expected_inv_s_plus_1(3, 0.5) == Approx(15.0 / 32.0).epsilon(1e-12));
    // direct sum oracle
    for (i64 n : {1, 2, 5, 9}) {
        for (double p : {0.1, 0.5, 0.9, 1.0}) {
            double direct = 0;
            for (i64 s = 0; s <= n; ++s) {
                double term = 1.0 / (s + 1);
                for (i64 i = 0; i < s; ++i) term *= p * (n - i) / (i + 1.0);
                for (i64 i = 0; i < n - s; ++i) term *= 1 - p;
                direct += term;
            }
            CHECK(expected_inv_s_plus_1(n, p) == Approx(direct).epsilon(1e-9));
        }
    }
}

TEST_CASE("decentralized delivery-rate series and its closed-form bracket") {
    RandRate r = rate_rand_formula(3, 3, Rational(2), 0.95);
    CHECK(std::abs(r.exact - 0.77) <= 0.005);
    CHECK(r.p_cache == Approx(2 * 0.95 / 3).epsilon(1e-12));

    // the bracket really is an upper bound on the series (ties possible at
    // n = 2 where both sides coincide term-by-term)
    for (i64 n : {2, 3, 5, 10, 40}) {
        for (i64 m : {3, 6, 20}) {
            for (i64 num = 1; num <= 2 * m; ++num) {
                Rational M(num, 2);
                double t = (Rational(n) * M / Rational(m)).to_double();
                if (t < 1.0) continue;
                RandRate rr = rate_rand_formula(n, m, M, 0.8);
                CHECK(rr.sum_term <= rr.upper_term * (1 + 1e-9) + 1e-12);
                CHECK(rr.exact <= rr.upper + 1e-9);
            }
        }
    }

    // t = 1 collapses to the deterministic point rate
    RandRate unit = rate_rand_formula(4, 8, Rational(2), 0.5);
    double point = (Rational(8, 2) * (Rational(1) - Rational(2, 8))).to_double();
    CHECK(unit.exact == Approx(point).epsilon(1e-12));
    CHECK(unit.upper == Approx(point).epsilon(1e-12));

    CHECK_THROWS_AS(rate_rand_formula(4, 8, Rational(1), 0.5), TLessThanOne);
}

TEST_CASE("delivery-shaped counting ledger reproduces the series term-by-term") {
    for (int n : {3, 5, 8, 12}) {
        for (double rho : {0.6, 0.8, 0.95}) {
            double p = 0.3;
            std::vector<double> terms = rand_counting_terms(n, p, rho);
            REQUIRE(static_cast<int>(terms.size()) == n - 1);
            for (int s = 2; s <= n; ++s) {
                double expect = std::exp(log_binomial(n, s)) * (static_cast<double>(s) / (s - 1)) *
                                std::pow(p, s - 1) * std::pow(1 - p, n - s + 1) / rho;
                CHECK(terms[s - 2] == Approx(expect).epsilon(1e-12));
            }
        }
    }
}

TEST_CASE("rate report keeps the achievability chain ordered and monotone") {
    i64 n = 10, m = 8;
    std::vector<RateReport> rows = sweep_rates(n, m, 1, m);
    REQUIRE(!rows.empty());
    const RateReport* prev = nullptr;
    for (const RateReport& row : rows) {
        CHECK(row.r_converse <= row.r_det);
        if (row.t > Rational(1)) {
            CHECK(row.r_det.to_double() <= row.r_rand_exact * (1 + 1e-9));
            CHECK(row.r_rand_exact <= row.r_rand_upper * (1 + 1e-9) + 1e-12);
        }
        if (prev) {
            CHECK(row.r_det <= prev->r_det);
            CHECK(row.r_converse <= prev->r_converse);
            CHECK(row.r_rand_exact <= prev->r_rand_exact * (1 + 1e-9));
            CHECK(row.r_rand_upper <= prev->r_rand_upper * (1 + 1e-9));
        }
        prev = &row;
    }
}

TEST_CASE("throughput bounds: flat network") {
    SystemParams p = make_params(3, 3, Rational(2), 3, 1, 3072);
    ThroughputBounds tb = throughput_bounds(p);
    CHECK_FALSE(tb.clustered);
    CHECK(tb.achievable == Rational(2));  // C_r = 1, R = 1/2
    CHECK(tb.upper == Rational(2));
    CHECK(tb.achievable <= tb.upper);
}

TEST_CASE("throughput bounds: clustered network worked instance") {
    CrTable cr;
    cr.steps.emplace_back(Rational(0), Rational(256));
    SystemParams p = make_params(64, 4, Rational(1), 1, 1, 1024, Rational(2, 5), Rational(2, 5),
                                 cr);
    ThroughputBounds tb = throughput_bounds(p);
    CHECK(tb.clustered);
    CHECK(tb.gc == 4);
    CHECK(tb.colors == 9);
    CHECK(tb.cap == 144);
    CHECK(tb.cluster_rate == Rational(3));
    CHECK(tb.achievable == Rational(256, 27));
    CHECK(tb.upper == Rational(36864));  // cap * C_r / best cut value (= 1 at l = 2)
    CHECK(tb.achievable <= tb.upper);
    CHECK_THROWS_AS(throughput_bounds(make_params(4, 4, Rational(4), 1, 1, 1024)), InvalidParams);
}

TEST_CASE("gap certificates: regime rows and worked ratios") {
    GapCertificate wide = gap_certificate(10000, 100, Rational(1), GapMode::det);
    CHECK(wide.ratio == Approx(99.0 / 25.0).epsilon(1e-12));
    CHECK(wide.ratio <= 4.5);
    CHECK(wide.within);

    GapCertificate big_cache = gap_certificate(100, 100, Rational(25), GapMode::det);
    CHECK(big_cache.ratio == Approx(3.0).epsilon(1e-12));
    CHECK(big_cache.ratio <= 6.5);
    CHECK(big_cache.bound == Approx(6.0));
    CHECK(big_cache.within);

    GapCertificate naive = gap_certificate(100, 100, Rational(25), GapMode::naive);
    CHECK(naive.bound == Approx(6.0));
    CHECK(naive.within);

    // t = 1 with a cache too small for the library-scale regimes
    GapCertificate rand_t1 = gap_certificate(16, 16, Rational(1), GapMode::rand);
    CHECK(rand_t1.t == Approx(1.0));
    CHECK(rand_t1.bound == Approx(4.0));

    GapCertificate rand_big = gap_certificate(10000, 100, Rational(1), GapMode::rand, 0.001);
    CHECK(rand_big.rho > 0);
    CHECK(rand_big.bound > 0);

    // every certificate on a small grid evaluates without tripping the
    // exact-link assertions (finite-regime "within" itself is advisory)
    for (i64 n : {2, 4, 8, 16})
        for (i64 m : {2, 5, 9})
            for (i64 num = 1; num <= 2 * m; ++num) {
                Rational M(num, 2);
                if (M * Rational(n, m) < Rational(1) || M > Rational(m)) continue;
                for (GapMode mode : {GapMode::det, GapMode::naive, GapMode::rand}) {
                    if (mode == GapMode::rand && M == Rational(m)) continue;
                    GapCertificate c = gap_certificate(n, m, M, mode);
                    CHECK(c.ratio >= 1.0 - 1e-12);
                    CHECK(c.bound > 0);
                }
            }
}

TEST_CASE("gap certificate: spatial-reuse mode worked instance") {
    CrTable cr;
    cr.steps.emplace_back(Rational(0), Rational(256));
    SystemParams p = make_params(64, 4, Rational(1), 1, 1, 1024, Rational(2, 5), Rational(2, 5),
                                 cr);
    GapCertificate c = gap_certificate(p, GapMode::reuse);
    CHECK(c.t == Approx(M_PI * 0.16 * 64 / 4).epsilon(1e-12));
    CHECK(c.converse == Approx(256.0 / 27.0).epsilon(1e-12));  // achievable throughput
    CHECK(c.achievable == Approx(36864.0).epsilon(1e-12));     // upper throughput
    CHECK(c.ratio == Approx(3888.0).epsilon(1e-12));
    CHECK(c.bound == Approx(6.0 * 9 * 144).epsilon(1e-12));
    CHECK(c.within);

    CHECK_THROWS_AS(gap_certificate(3, 3, Rational(2), GapMode::reuse), InvalidParams);
}

TEST_CASE("gap mode names round-trip") {
    for (GapMode mode : {GapMode::det, GapMode::naive, GapMode::rand, GapMode::reuse})
        CHECK(gap_mode_from_name(gap_mode_name(mode)) == mode);
    CHECK_THROWS_AS(gap_mode_from_name("bogus"), ConfigError);
}
