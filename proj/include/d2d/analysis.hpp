#pragma once

#include <string>
#include <vector>

#include "d2d/common.hpp"
#include "d2d/params.hpp"
#include "d2d/rational.hpp"

namespace d2d {

// Deterministic coded-multicast delivery rate (m/M)(1-M/m) = (n-t)/t, taken
// along its convex lower envelope for fractional t (the chord between the
// two neighboring integer-t points, which memory sharing achieves).
// Throws TLessThanOne when t = M*n/m < 1.
Rational rate_det_formula(i64 n, i64 m, const Rational& M);

// Best rate when whole-library multicast is also allowed (synchronized
// requests): min{coded envelope, m} for t >= 1, and m below that (sending
// every file once needs no cache at all).
Rational rate_det_naive(i64 n, i64 m, const Rational& M);

// Cut-set converse: max over l in 1..min(m,n) of l - (l/floor(m/l))*M,
// together with (n/(n-1))*(1-M/m) when n > 1 and m > 1. Exact.
Rational rate_converse(i64 n, i64 m, const Rational& M);

// Same value by the plain loop over every l (test oracle for the
// constant-floor(m/l) block scan used by rate_converse).
Rational rate_converse_brute(i64 n, i64 m, const Rational& M);

// Single-server coded-multicast comparison point n(1-M/m)/(1+Mn/m).
Rational rate_basestation_reference(i64 n, i64 m, const Rational& M);

// E[1/(S+1)] for S ~ Binomial(n, p): (1-(1-p)^(n+1)) / ((n+1)p).
double expected_inv_s_plus_1(i64 n, double p);

// Decentralized delivery rate and its closed-form upper bound.
//   sum_term   (1/rho) * sum_{s=2}^n C(n,s) (s/(s-1)) p^(s-1) (1-p)^(n-s+1)
//              with p = M*rho/m, evaluated in log space with compensated
//              summation (documented relative tolerance 1e-9)
//   exact      min{sum_term, n-t}
//   upper_term closed-form bound on sum_term:
//              (m/(M rho^2))(1-p) [1 + 3/((n+1)p) (1-(1-p)^(n+1))
//                                    - 4(1-p)^n - (5/2) p n (1-p)^(n-1)]
//   upper      min{upper_term, n-t}
// At t = 1 every field is the exact value (m/M)(1-M/m); rho is ignored.
// Throws TLessThanOne for t < 1.
struct RandRate {
    double t = 0;
    double rho = 0;
    double p_cache = 0;  // M*rho/m
    double sum_term = 0;
    double upper_term = 0;
    double exact = 0;
    double upper = 0;
};
RandRate rate_rand_formula(i64 n, i64 m, const Rational& M, double rho);

// Throughput bounds in bits per channel use per node, T = F*Lp/t_s scale.
// With r^2 >= 2 a single transmission reaches everyone: achievable
// T = C_r / R(M) against upper C_r / R*(M). With r^2 < 2 the clustered
// scheme gives T = (C_r/colors) / R_c(M) with R_c the delivery rate inside
// one cluster of gc nodes, against the reuse-aware upper bound
// C_r * cap / max_{l <= min(m, ceil(pi r^2 n))} (l - (l/floor(m/l)) M).
// The l cap is the one spot evaluated in floating point (pi is irrational);
// everything else is exact.
struct ThroughputBounds {
    Rational achievable;
    Rational upper;
    bool clustered = false;
    i64 colors = 1;       // TDMA phases (1 without spatial reuse)
    i64 cap = 0;          // concurrency ceiling in the clustered upper bound
    i64 gc = 0;           // cluster size (0 without clustering)
    Rational cluster_rate;  // R_c(M) (0 without clustering)
};
ThroughputBounds throughput_bounds(const SystemParams& p);

// Multiplicative-gap certificate between an achievable rate and the
// converse. The regime rows come from asymptotic statements, so the bound
// is advisory at finite parameters; what IS asserted strictly (throwing
// AssertionError on violation) are the exact finite-instance links:
//   - rate_det_formula(n,m,M) <= n/floor(t) - 1, and
//   - rate_converse >= its instantiation at l* = floor(m/(2M)) clipped to
//     [1, min(m,n)]   (det / naive / rand modes)
//   - achievable throughput <= upper throughput, exact rationals (reuse).
enum class GapMode { det, naive, rand, reuse };

struct GapCertificate {
    GapMode mode = GapMode::det;
    double t = 0;          // load (reuse mode: local load M*pi*r^2*n/m)
    std::string regime;    // matched regime row, human-readable
    double achievable = 0;  // rate (det/naive/rand) or upper throughput (reuse)
    double converse = 0;    // converse rate or achievable throughput (reuse)
    double ratio = 0;       // achievable rate / converse rate, or T_upper/T_ach
    double bound = 0;       // regime constant (with back-off terms where stated)
    double slack = 0;       // bound - ratio
    bool within = false;    // ratio <= bound
    bool advisory = true;   // regime constants are asymptotic statements
    double rho = 0;         // rand mode: back-off actually used (0 otherwise)
    std::string detail;
};

// det / naive / rand modes (geometry-free). rand mode solves the cache-hit
// fixed point itself with the given back-off epsilon.
GapCertificate gap_certificate(i64 n, i64 m, const Rational& M, GapMode mode,
                               double epsilon = 0.001);

// All modes; reuse draws r, delta, and the link-rate table from params.
GapCertificate gap_certificate(const SystemParams& p, GapMode mode, double epsilon = 0.001);

GapMode gap_mode_from_name(const std::string& name);
std::string gap_mode_name(GapMode mode);

// One row of the rate-comparison sweep; rationals exact, rand columns float.
struct RateReport {
    Rational M;
    Rational r_det;
    Rational r_det_naive;
    double r_rand_exact = 0;
    double r_rand_upper = 0;
    Rational r_converse;
    Rational r_bs;
    double rho = 0;  // back-off used for the rand columns (0 when t = 1)
    Rational t;
};
RateReport rate_report(i64 n, i64 m, const Rational& M, double epsilon = 0.001);

// Reports for M = M_lo..M_hi in integer steps (the Fig-5-style table).
std::vector<RateReport> sweep_rates(i64 n, i64 m, i64 M_lo, i64 M_hi, double epsilon = 0.001);

}  // namespace d2d
