#include "d2d/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "d2d/combinatorics.hpp"
#include "d2d/geometry.hpp"
#include "d2d/rand_scheme.hpp"

namespace d2d {

namespace {

void check_library_shape(i64 n, i64 m, const Rational& M) {
    if (n < 1 || m < 1) throw InvalidParams("need n >= 1 and m >= 1");
    if (M <= Rational(0) || M > Rational(m)) throw InvalidParams("need 0 < M <= m");
}

// (m/M)(1 - M/m) at an exact parameter point (no envelope).
Rational point_rate(i64 m, const Rational& M) {
    return (Rational(m) / M) * (Rational(1) - M / Rational(m));
}

Rational load(i64 n, i64 m, const Rational& M) { return M * Rational(n) / Rational(m); }

// max over l in 1..lmax of l - (l/floor(m/l)) * M, exact. For fixed
// d = floor(m/l) the term l*(1 - M/d) is affine in l, so only the first and
// last l of each constant-d block are candidates; the blocks are walked via
// the standard divisor-stride l -> m/(m/l), O(sqrt(m)) iterations.
Rational converse_first_family(i64 m, const Rational& M, i64 lmax) {
    Rational best(0);
    i64 l = 1;
    while (l <= lmax) {
        i64 d = m / l;
        i64 le = std::min(lmax, m / d);
        Rational coeff = Rational(1) - M / Rational(d);
        best = std::max(best, Rational(l) * coeff);
        best = std::max(best, Rational(le) * coeff);
        l = le + 1;
    }
    return best;
}

struct KahanSum {
    double s = 0, c = 0;
    void add(double x) {
        double y = x - c;
        double t = s + y;
        c = (t - s) - y;
        s = t;
    }
};

struct Regime {
    std::string name;
    double bound;
};

// The finite-instance reading of the multiplicative-gap table for the
// deterministic scheme. The asymptotic predicates are anchored as
// M = Theta(m) <-> M >= m/8, t -> infinity <-> t >= 10, n = omega(m) <->
// n > 8m; cache thresholds are compared exactly.
Regime det_regime(i64 n, i64 m, const Rational& M, const Rational& t) {
    double td = t.to_double();
    double tf = static_cast<double>(t.floor());
    if (M >= Rational(m, 8)) return {"cache comparable to library (M >= m/8)", 6.0};
    if (M >= Rational(1, 2)) {
        if (t >= Rational(10)) return {"large aggregate load (t >= 10), moderate cache", 4.0};
        return {"bounded aggregate load, moderate cache", 4.0 * td / tf};
    }
    if (n > 8 * m) return {"node-rich network (n > 8m), small cache", 2.0 / M.to_double()};
    if (n > m) return {"more nodes than files, small cache", (td / tf) * 2.0 / M.to_double()};
    return {"fewer nodes than files, small cache", 2.0};
}

Regime naive_regime(i64 m, const Rational& M, const Rational& t) {
    if (M >= Rational(m, 8)) return {"cache comparable to library (M >= m/8)", 6.0};
    if (M >= Rational(1, 2)) {
        if (t >= Rational(10)) return {"large aggregate load (t >= 10), moderate cache", 4.0};
        return {"bounded aggregate load, moderate cache",
                4.0 * t.to_double() / static_cast<double>(t.floor())};
    }
    return {"small cache (M < 1/2)", 2.0};
}

}  // namespace

Rational rate_det_formula(i64 n, i64 m, const Rational& M) {
    check_library_shape(n, m, M);
    Rational t = load(n, m, M);
    if (t < Rational(1))
        throw TLessThanOne("t = Mn/m = " + t.str() + "; caches cannot cover the library");
    if (t.is_integer()) return point_rate(m, M);
    i64 t1 = t.floor();
    i64 t2 = t1 + 1;
    Rational M1 = Rational(t1) * Rational(m) / Rational(n);
    Rational M2 = Rational(t2) * Rational(m) / Rational(n);
    Rational alpha = (M2 - M) / (M2 - M1);
    return alpha * point_rate(m, M1) + (Rational(1) - alpha) * point_rate(m, M2);
}

Rational rate_det_naive(i64 n, i64 m, const Rational& M) {
    check_library_shape(n, m, M);
    // Whole-library multicast (rate m) is available regardless of caches;
    // with t >= 1 the coded envelope competes. The raw curve (m/M)(1-M/m)
    // is NOT achievable at fractional t (it dips below the converse), so the
    // coded alternative is the envelope, same as rate_det_formula.
    if (load(n, m, M) < Rational(1)) return Rational(m);
    return std::min(rate_det_formula(n, m, M), Rational(m));
}

Rational rate_converse(i64 n, i64 m, const Rational& M) {
    check_library_shape(n, m, M);
    Rational best = converse_first_family(m, M, std::min(m, n));
    if (n > 1 && m > 1) {
        Rational second = Rational(n, n - 1) * (Rational(1) - M / Rational(m));
        best = std::max(best, second);
    }
    return best;
}

Rational rate_converse_brute(i64 n, i64 m, const Rational& M) {
    check_library_shape(n, m, M);
    Rational best(0);
    for (i64 l = 1; l <= std::min(m, n); ++l) {
        i64 d = m / l;
        best = std::max(best, Rational(l) - Rational(l, d) * M);
    }
    if (n > 1 && m > 1)
        best = std::max(best, Rational(n, n - 1) * (Rational(1) - M / Rational(m)));
    return best;
}

Rational rate_basestation_reference(i64 n, i64 m, const Rational& M) {
    check_library_shape(n, m, M);
    Rational t = load(n, m, M);
    return Rational(n) * (Rational(1) - M / Rational(m)) / (Rational(1) + t);
}

double expected_inv_s_plus_1(i64 n, double p) {
    if (!(p > 0.0 && p <= 1.0)) throw InvalidParams("probability must lie in (0, 1]");
    if (n < 0) throw InvalidParams("n must be non-negative");
    double l1p = p < 1.0 ? std::log1p(-p) : -HUGE_VAL;
    return (1.0 - std::exp(static_cast<double>(n + 1) * l1p)) / (static_cast<double>(n + 1) * p);
}

RandRate rate_rand_formula(i64 n, i64 m, const Rational& M, double rho) {
    check_library_shape(n, m, M);
    if (!(rho > 0.0 && rho <= 1.0)) throw InvalidParams("rho must lie in (0, 1]");
    Rational t = load(n, m, M);
    if (t < Rational(1))
        throw TLessThanOne("t = Mn/m = " + t.str() + "; caches cannot cover the library");

    RandRate r;
    r.t = t.to_double();
    r.rho = rho;
    if (t == Rational(1)) {
        double v = point_rate(m, M).to_double();
        r.p_cache = (M / Rational(m)).to_double() * rho;
        r.sum_term = r.upper_term = r.exact = r.upper = v;
        return r;
    }

    double p = (M / Rational(m)).to_double() * rho;
    r.p_cache = p;
    double lp = std::log(p);
    double l1p = p < 1.0 ? std::log1p(-p) : -HUGE_VAL;
    double lrho = std::log(rho);

    KahanSum sum;
    for (i64 s = 2; s <= n; ++s) {
        double ln = log_binomial(static_cast<int>(n), static_cast<int>(s)) +
                    std::log(static_cast<double>(s)) - std::log(static_cast<double>(s - 1)) +
                    static_cast<double>(s - 1) * lp + static_cast<double>(n - s + 1) * l1p - lrho;
        sum.add(std::exp(ln));
    }
    r.sum_term = sum.s;

    double np1 = static_cast<double>(n + 1);
    double a = 3.0 / (np1 * p) * (1.0 - std::exp(np1 * l1p));
    double b = 4.0 * std::exp(static_cast<double>(n) * l1p);
    double c = 2.5 * p * static_cast<double>(n) * std::exp(static_cast<double>(n - 1) * l1p);
    double bracket = 1.0 + a - b - c;
    r.upper_term = (Rational(m) / M).to_double() / (rho * rho) * (1.0 - p) * bracket;

    double residual = (Rational(n) - t).to_double();
    r.exact = std::min(r.sum_term, residual);
    r.upper = std::min(r.upper_term, residual);
    return r;
}

ThroughputBounds throughput_bounds(const SystemParams& p) {
    if (p.M == Rational(p.m))
        throw InvalidParams("every node caches the whole library; throughput is unbounded");
    Rational c_r = p.cr_at_r();
    ThroughputBounds tb;
    if (p.r * p.r >= Rational(2)) {
        tb.achievable = c_r / rate_det_formula(p.n, p.m, p.M);
        tb.upper = c_r / rate_converse(p.n, p.m, p.M);
        return tb;
    }
    ClusterLayout lay = build_clusters(p);
    tb.clustered = true;
    tb.colors = lay.colors;
    tb.gc = lay.gc;
    tb.cluster_rate = rate_det_formula(lay.gc, p.m, p.M);
    tb.achievable = c_r / (Rational(tb.colors) * tb.cluster_rate);
    tb.cap = concurrency_cap(p.delta);
    double area_nodes = 3.14159265358979323846 * (p.r * p.r).to_double() * p.n;
    i64 l_cap = std::min<i64>(p.m, static_cast<i64>(std::ceil(area_nodes)));
    if (l_cap < 1) l_cap = 1;
    Rational denom = converse_first_family(p.m, p.M, l_cap);
    if (denom <= Rational(0))
        throw InvalidParams("throughput upper bound degenerates (non-positive cut-set term)");
    tb.upper = c_r * Rational(tb.cap) / denom;
    return tb;
}

namespace {

// The exact links behind every certificate: the achievable envelope never
// exceeds n/floor(t) - 1, and the converse dominates its own instantiation
// at l* = floor(m/(2M)) (clipped to the valid range). Violations are
// implementation bugs, not statistical events, hence AssertionError.
void assert_exact_links(i64 n, i64 m, const Rational& M, const Rational& t,
                        const Rational& r_det, const Rational& r_conv) {
    Rational env_cap = Rational(n, t.floor()) - Rational(1);
    if (r_det > env_cap)
        throw AssertionError("envelope " + r_det.str() + " exceeds n/floor(t) - 1 = " +
                             env_cap.str());
    i64 l_star = (Rational(m) / (Rational(2) * M)).floor();
    l_star = std::clamp<i64>(l_star, 1, std::min(n, m));
    i64 d = m / l_star;
    Rational inst = Rational(l_star) - Rational(l_star, d) * M;
    if (r_conv < inst)
        throw AssertionError("converse " + r_conv.str() + " below its l* = " +
                             std::to_string(l_star) + " instantiation " + inst.str());
}

double safe_ratio(double achievable, double converse) {
    if (converse <= 0.0) return achievable <= 0.0 ? 1.0 : HUGE_VAL;
    return achievable / converse;
}

}  // namespace

GapCertificate gap_certificate(i64 n, i64 m, const Rational& M, GapMode mode, double epsilon) {
    if (mode == GapMode::reuse)
        throw InvalidParams("reuse-mode certificates need full system parameters (r, delta, cr)");
    check_library_shape(n, m, M);
    Rational t = load(n, m, M);
    if (t < Rational(1))
        throw TLessThanOne("t = Mn/m = " + t.str() + "; caches cannot cover the library");

    Rational r_det = rate_det_formula(n, m, M);
    Rational r_conv = rate_converse(n, m, M);
    assert_exact_links(n, m, M, t, r_det, r_conv);

    GapCertificate cert;
    cert.mode = mode;
    cert.t = t.to_double();
    cert.converse = r_conv.to_double();
    cert.advisory = true;

    if (mode == GapMode::det) {
        Regime reg = det_regime(n, m, M, t);
        cert.regime = reg.name;
        cert.bound = reg.bound;
        cert.achievable = r_det.to_double();
        cert.detail = "r_det = " + r_det.str() + ", r_converse = " + r_conv.str();
    } else if (mode == GapMode::naive) {
        Regime reg = naive_regime(m, M, t);
        cert.regime = reg.name;
        cert.bound = reg.bound;
        cert.achievable = rate_det_naive(n, m, M).to_double();
        cert.detail = "r_naive = " + rate_det_naive(n, m, M).str() + ", r_converse = " +
                      r_conv.str();
    } else {  // rand
        double backoff = 1.0 - epsilon;
        if (M >= Rational(m, 8)) {
            cert.regime = "cache comparable to library (M >= m/8)";
            cert.bound = 6.0;
        } else if (M >= Rational(1, 2) && t >= Rational(10)) {
            cert.regime = "large aggregate load (t >= 10), moderate cache";
            cert.bound = 8.0 / (backoff * backoff);
        } else if (M < Rational(1, 2) && n > 8 * m) {
            cert.regime = "node-rich network (n > 8m), small cache";
            cert.bound = 4.0 / (M.to_double() * backoff * backoff);
        } else if (t == Rational(1)) {
            // The finite-t prefactor f_g is undefined at t = 1 (no cache-hit
            // fixed point); the min{4t, f_g(t)} row collapses to 4t.
            cert.regime = "unit aggregate load";
            cert.bound = 4.0;
        } else {
            double td = t.to_double();
            RhoSolution sol = solve_rho_star(td, epsilon);
            double rho = sol.rho;
            double rt = rho * td;
            double f_rho = 3.0 / rt - std::exp(-rt) * (3.0 / rt + 4.0 + 2.5 * rt);
            double sub;
            std::string sub_name;
            if (M >= Rational(1, 2)) {
                sub = 4.0 * td / static_cast<double>(t.floor());
                sub_name = "moderate cache";
            } else if (n > m) {
                sub = (td / static_cast<double>(t.floor())) * 2.0 / M.to_double();
                sub_name = "more nodes than files, small cache";
            } else {
                sub = 2.0;
                sub_name = "fewer nodes than files, small cache";
            }
            double f_g = (1.0 / (rho * rho)) * (1.0 + f_rho) * sub;
            cert.regime = "bounded load, min{4t, f_g(t)} row (" + sub_name + ")";
            cert.bound = std::min(4.0 * td, f_g);
            cert.detail = "f_g(t) = " + std::to_string(f_g) + ", 4t = " + std::to_string(4.0 * td);
        }
        if (t == Rational(1)) {
            cert.achievable = point_rate(m, M).to_double();
        } else {
            RhoSolution sol = solve_rho_star(t.to_double(), epsilon);
            cert.rho = sol.rho;
            cert.achievable = rate_rand_formula(n, m, M, sol.rho).exact;
        }
        if (!cert.detail.empty()) cert.detail += "; ";
        cert.detail += "r_rand = " + std::to_string(cert.achievable) + ", r_converse = " +
                       r_conv.str();
    }

    cert.ratio = safe_ratio(cert.achievable, cert.converse);
    cert.slack = cert.bound - cert.ratio;
    cert.within = cert.ratio <= cert.bound + 1e-12;
    return cert;
}

GapCertificate gap_certificate(const SystemParams& p, GapMode mode, double epsilon) {
    if (mode != GapMode::reuse) return gap_certificate(p.n, p.m, p.M, mode, epsilon);

    ThroughputBounds tb = throughput_bounds(p);
    if (!tb.clustered)
        throw InvalidParams("reuse-mode certificates apply when r^2 < 2 (clustered operation)");
    if (tb.achievable > tb.upper)
        throw AssertionError("achievable throughput " + tb.achievable.str() +
                             " exceeds its upper bound " + tb.upper.str());

    // Local-regime predicates use the node count within range, pi*r^2*n
    // (the single floating-point quantity in this module's geometry).
    double n_r = 3.14159265358979323846 * (p.r * p.r).to_double() * p.n;
    double t_r = p.M.to_double() * n_r / p.m;
    if (t_r < 1.0)
        throw TLessThanOne("local load M*pi*r^2*n/m = " + std::to_string(t_r));

    GapCertificate cert;
    cert.mode = GapMode::reuse;
    cert.t = t_r;
    cert.advisory = true;
    cert.achievable = tb.upper.to_double();
    cert.converse = tb.achievable.to_double();
    cert.ratio = (tb.upper / tb.achievable).to_double();

    double row;
    std::string name;
    double tf = std::floor(t_r);
    if (p.M >= Rational(p.m, 8)) {
        row = 6.0;
        name = "cache comparable to library (M >= m/8)";
    } else if (p.M >= Rational(1, 2)) {
        if (t_r >= 10.0) {
            row = 4.0;
            name = "large local load, moderate cache";
        } else {
            row = 4.0 * t_r / tf;
            name = "bounded local load, moderate cache";
        }
    } else if (n_r > 8.0 * p.m) {
        row = 2.0 / p.M.to_double();
        name = "node-rich neighborhood, small cache";
    } else if (n_r > p.m) {
        row = (t_r / tf) * 2.0 / p.M.to_double();
        name = "more neighbors than files, small cache";
    } else {
        row = 2.0;
        name = "fewer neighbors than files, small cache";
    }
    cert.regime = "spatial reuse, " + name;
    cert.bound = row * static_cast<double>(tb.colors) * static_cast<double>(tb.cap);
    cert.slack = cert.bound - cert.ratio;
    cert.within = cert.ratio <= cert.bound + 1e-12;
    cert.detail = "T_ach = " + tb.achievable.str() + ", T_upper = " + tb.upper.str() +
                  ", colors = " + std::to_string(tb.colors) + ", cap = " + std::to_string(tb.cap);
    return cert;
}

GapMode gap_mode_from_name(const std::string& name) {
    if (name == "det") return GapMode::det;
    if (name == "naive") return GapMode::naive;
    if (name == "rand") return GapMode::rand;
    if (name == "reuse") return GapMode::reuse;
    throw ConfigError("unknown gap mode '" + name + "' (expected det|naive|rand|reuse)");
}

std::string gap_mode_name(GapMode mode) {
    switch (mode) {
        case GapMode::det: return "det";
        case GapMode::naive: return "naive";
        case GapMode::rand: return "rand";
        case GapMode::reuse: return "reuse";
    }
    return "?";
}

RateReport rate_report(i64 n, i64 m, const Rational& M, double epsilon) {
    RateReport row;
    row.M = M;
    row.t = load(n, m, M);
    row.r_det = rate_det_formula(n, m, M);
    row.r_det_naive = rate_det_naive(n, m, M);
    row.r_converse = rate_converse(n, m, M);
    row.r_bs = rate_basestation_reference(n, m, M);
    if (row.t > Rational(1)) {
        RhoSolution sol = solve_rho_star(row.t.to_double(), epsilon);
        row.rho = sol.rho;
        RandRate rr = rate_rand_formula(n, m, M, sol.rho);
        row.r_rand_exact = rr.exact;
        row.r_rand_upper = rr.upper;
    } else {
        double v = point_rate(m, M).to_double();
        row.r_rand_exact = v;
        row.r_rand_upper = v;
    }
    return row;
}

std::vector<RateReport> sweep_rates(i64 n, i64 m, i64 M_lo, i64 M_hi, double epsilon) {
    if (M_lo < 1 || M_hi > m || M_lo > M_hi)
        throw InvalidParams("sweep range must satisfy 1 <= M_lo <= M_hi <= m");
    std::vector<RateReport> rows;
    rows.reserve(static_cast<size_t>(M_hi - M_lo + 1));
    for (i64 Mi = M_lo; Mi <= M_hi; ++Mi) {
        if (load(n, m, Rational(Mi)) < Rational(1)) continue;  // caches cannot cover the library
        rows.push_back(rate_report(n, m, Rational(Mi), epsilon));
    }
    return rows;
}

}  // namespace d2d
