#include "d2d/rand_scheme.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <string>

#include "d2d/bits.hpp"
#include "d2d/combinatorics.hpp"
#include "d2d/rng.hpp"

namespace d2d {

namespace {

double fixed_point_residual(double t, double x) { return std::fabs(x - (1.0 - std::exp(-t * x))); }

// Coded indices grouped by the exact set of nodes caching them. The class of
// receiver u within group U is the entry at key U\{u}; such an index is held
// by every co-member of U and by nobody else, which is precisely what lets
// one XOR serve all of U\{v} at once.
std::map<std::vector<int>, std::vector<int>> classes_by_owner_set(const RandPlacement& pl) {
    int n = static_cast<int>(pl.index_sets.size());
    std::vector<std::vector<int>> owners(static_cast<size_t>(pl.nsym));
    for (int u = 1; u <= n; ++u)
        for (int idx : pl.index_sets[static_cast<size_t>(u - 1)])
            owners[static_cast<size_t>(idx)].push_back(u);
    std::map<std::vector<int>, std::vector<int>> classes;
    for (i64 idx = 0; idx < pl.nsym; ++idx) {
        const auto& o = owners[static_cast<size_t>(idx)];
        if (!o.empty()) classes[o].push_back(static_cast<int>(idx));
    }
    return classes;
}

const std::vector<int>* class_of(const std::map<std::vector<int>, std::vector<int>>& classes,
                                 const std::vector<int>& owner_set) {
    auto it = classes.find(owner_set);
    return it == classes.end() ? nullptr : &it->second;
}

std::vector<int> erase_one(const std::vector<int>& sorted, int v) {
    std::vector<int> out;
    out.reserve(sorted.size() - 1);
    for (int x : sorted)
        if (x != v) out.push_back(x);
    return out;
}

// 1-based rank of v within the sorted set `others` (v must be a member).
int rank_in(const std::vector<int>& others, int v) {
    auto it = std::lower_bound(others.begin(), others.end(), v);
    return static_cast<int>(it - others.begin()) + 1;
}

int cache_slot(const RandPlacement& pl, int node, int idx) {
    const auto& s = pl.index_sets[static_cast<size_t>(node - 1)];
    auto it = std::lower_bound(s.begin(), s.end(), idx);
    if (it == s.end() || *it != idx)
        throw AssertionError("coded index " + std::to_string(idx) + " not cached by node " +
                             std::to_string(node));
    return static_cast<int>(it - s.begin());
}

std::size_t file_packet_slot(const SystemParams& p, int file, int pkt) {
    return static_cast<std::size_t>(file - 1) * p.L + (pkt - 1);
}

}  // namespace

RhoSolution solve_rho_star(double t, double epsilon) {
    if (!(t > 1.0))
        throw NoSolution("x = 1 - exp(-t*x) has no root in (0,1] for t = " + std::to_string(t) +
                         "; the fixed point exists only for t > 1");
    if (!(epsilon >= 0.0 && epsilon < 1.0))
        throw InvalidParams("back-off epsilon must lie in [0, 1)");

    RhoSolution sol;
    sol.t = t;
    sol.epsilon = epsilon;

    // The iteration x <- 1 - exp(-t*x) from x = 1 decreases monotonically to
    // the positive root (contraction factor t*(1 - rho*) < 1, but close to 1
    // for t near 1, hence the generous cap)...
    double x = 1.0;
    int iters = 0;
    for (; iters < 20000; ++iters) {
        double nx = 1.0 - std::exp(-t * x);
        if (std::fabs(nx - x) < 1e-12) {
            x = nx;
            ++iters;
            break;
        }
        x = nx;
    }
    // ...and Newton on g(x) = x - 1 + exp(-t*x) polishes to machine
    // precision: g is convex with g' > 0 at the root, so steps from above
    // stay above the root.
    for (int k = 0; k < 60; ++k) {
        double g = x - 1.0 + std::exp(-t * x);
        double gp = 1.0 - t * std::exp(-t * x);
        if (gp <= 0.0) break;
        double step = g / gp;
        x -= step;
        ++iters;
        if (std::fabs(step) < 1e-17) break;
    }
    sol.rho_star = x;
    sol.residual = fixed_point_residual(t, x);
    sol.iterations = iters;
    sol.rho = (1.0 - epsilon) * x;
    return sol;
}

i64 adjust_K(const SystemParams& p, i64 K) {
    if (K < 1) throw InvalidParams("K must be positive");
    // M*K'/m = (a*K')/(b*m) with M = a/b reduced; integrality needs
    // K' to be a multiple of b*m/gcd(a, b*m).
    i64 a = p.M.num();
    i64 bm = p.M.den() * static_cast<i64>(p.m);
    i64 step = bm / std::gcd(a, bm);
    return ((K + step - 1) / step) * step;
}

RandPlacement place_random(const SystemParams& p, const Library& lib, i64 K, double rho,
                           u64 seed) {
    if (K < 1) throw InvalidParams("K must be positive");
    if (!(rho > 0.0 && rho <= 1.0)) throw InvalidParams("rho must lie in (0, 1]");

    Rational cache_frac = p.M * Rational(K) / Rational(p.m);
    if (!cache_frac.is_integer())
        throw IndivisibleK("M*K/m = " + cache_frac.str() + " symbols per node is not whole; " +
                           "use K = " + std::to_string(adjust_K(p, K)) + " instead of " +
                           std::to_string(K));
    i64 cache_syms = cache_frac.num();
    if (cache_syms < 1) throw InvalidParams("a node would cache zero coded symbols");
    if (p.F % K != 0)
        throw IndivisibleK("K = " + std::to_string(K) + " must divide the packet size F = " +
                           std::to_string(p.F));
    i64 sym_bits = p.F / K;
    if (sym_bits % 8 != 0)
        throw IndivisibleK("subpacket size F/K = " + std::to_string(sym_bits) +
                           " bits is not a whole number of bytes");

    // nsym = ceil(K / rho), snapping near-integer quotients down so that a
    // rho chosen as K/c yields exactly c symbols despite rounding.
    double quot = static_cast<double>(K) / rho;
    i64 fl = static_cast<i64>(std::floor(quot));
    i64 nsym = (quot - static_cast<double>(fl) <= 1e-9 * quot) ? fl : fl + 1;
    if (nsym < K) nsym = K;

    int q = GaloisField::width_for_symbols(nsym);
    if (sym_bits % q != 0)
        throw IndivisibleK("subpacket size F/K = " + std::to_string(sym_bits) +
                           " bits must be a multiple of the field width q = " + std::to_string(q));
    if (cache_syms > nsym)
        throw InvalidParams("cache would hold more symbols than the code emits");

    RandPlacement pl;
    pl.K = K;
    pl.nsym = nsym;
    pl.cache_syms = cache_syms;
    pl.q = q;
    pl.rho = rho;
    pl.sym_bytes = sym_bits / 8;

    pl.index_sets.resize(static_cast<size_t>(p.n));
    for (int u = 1; u <= p.n; ++u) {
        Rng rng(derive_seed(seed, "cache", static_cast<u64>(u)));
        pl.index_sets[static_cast<size_t>(u - 1)] =
            rng.sample_without_replacement(static_cast<int>(nsym), static_cast<int>(cache_syms));
    }

    MdsCode code(static_cast<int>(K), static_cast<int>(nsym), q);
    pl.content.resize(static_cast<size_t>(p.n));
    for (auto& per_node : pl.content)
        per_node.resize(static_cast<size_t>(p.m) * p.L);

    std::vector<Bytes> data(static_cast<size_t>(K));
    for (int f = 1; f <= p.m; ++f) {
        for (int pk = 1; pk <= p.L; ++pk) {
            const Bytes& packet = lib.packet(f, pk);
            for (i64 i = 0; i < K; ++i)
                data[static_cast<size_t>(i)] =
                    Bytes(packet.begin() + i * pl.sym_bytes, packet.begin() + (i + 1) * pl.sym_bytes);
            std::vector<Bytes> coded = mds_encode(code, data);
            std::size_t fp = file_packet_slot(p, f, pk);
            for (int u = 1; u <= p.n; ++u) {
                auto& slot = pl.content[static_cast<size_t>(u - 1)][fp];
                slot.reserve(static_cast<size_t>(cache_syms));
                for (int idx : pl.index_sets[static_cast<size_t>(u - 1)])
                    slot.push_back(coded[static_cast<size_t>(idx)]);
            }
        }
    }
    return pl;
}

LibraryCoverage check_library_cached(const RandPlacement& pl) {
    std::vector<char> seen(static_cast<size_t>(pl.nsym), 0);
    for (const auto& s : pl.index_sets)
        for (int idx : s) seen[static_cast<size_t>(idx)] = 1;
    LibraryCoverage cov;
    cov.distinct = std::count(seen.begin(), seen.end(), char(1));
    cov.complete = cov.distinct >= pl.K;
    return cov;
}

std::vector<RandTransmission> deliver_random(const SystemParams& p, const RandPlacement& pl,
                                             const Demand& d) {
    d.validate(p);
    auto classes = classes_by_owner_set(pl);
    std::vector<RandTransmission> out;
    if (p.n < 2) return out;

    for (int round = 1; round <= p.Lp; ++round) {
        for (int b = p.n; b >= 2; --b) {
            std::vector<int> U = first_subset(b);
            do {
                // Class of each receiver u in U: coded symbols of u's file
                // held by exactly the co-members U\{u}.
                std::vector<const std::vector<int>*> J(static_cast<size_t>(b));
                i64 j_max = 0;
                for (int i = 0; i < b; ++i) {
                    J[static_cast<size_t>(i)] = class_of(classes, erase_one(U, U[static_cast<size_t>(i)]));
                    if (J[static_cast<size_t>(i)])
                        j_max = std::max(j_max, static_cast<i64>(J[static_cast<size_t>(i)]->size()));
                }
                if (j_max == 0) continue;
                i64 c = (j_max + b - 2) / (b - 1);

                for (int vi = 0; vi < b; ++vi) {
                    int v = U[static_cast<size_t>(vi)];
                    // Window of receiver u served by sender v starts at
                    // (rank of v among u's other co-members - 1) * c.
                    i64 sym_count = 0;
                    for (int ui = 0; ui < b; ++ui) {
                        if (ui == vi || !J[static_cast<size_t>(ui)]) continue;
                        std::vector<int> others = erase_one(U, U[static_cast<size_t>(ui)]);
                        i64 ws = static_cast<i64>(rank_in(others, v) - 1) * c;
                        i64 have = static_cast<i64>(J[static_cast<size_t>(ui)]->size()) - ws;
                        sym_count = std::max(sym_count, std::clamp<i64>(have, 0, c));
                    }
                    if (sym_count == 0) continue;  // every receiver exhausted: drop the tail

                    RandTransmission tx;
                    tx.sender = v;
                    tx.group = U;
                    tx.round = round;
                    tx.j_max = j_max;
                    tx.part_len = c;
                    tx.sym_count = sym_count;
                    tx.payload.assign(static_cast<size_t>(sym_count * pl.sym_bytes), 0);
                    for (int ui = 0; ui < b; ++ui) {
                        if (ui == vi || !J[static_cast<size_t>(ui)]) continue;
                        int u = U[static_cast<size_t>(ui)];
                        const std::vector<int>& Ju = *J[static_cast<size_t>(ui)];
                        std::vector<int> others = erase_one(U, u);
                        i64 ws = static_cast<i64>(rank_in(others, v) - 1) * c;
                        int f = d.files[static_cast<size_t>(u - 1)];
                        int pk = d.segments[static_cast<size_t>(u - 1)] + round - 1;
                        std::size_t fp = file_packet_slot(p, f, pk);
                        for (i64 o = 0; o < sym_count && ws + o < static_cast<i64>(Ju.size()); ++o) {
                            int idx = Ju[static_cast<size_t>(ws + o)];
                            int slot = cache_slot(pl, v, idx);
                            const Bytes& val =
                                pl.content[static_cast<size_t>(v - 1)][fp][static_cast<size_t>(slot)];
                            for (i64 byte = 0; byte < pl.sym_bytes; ++byte)
                                tx.payload[static_cast<size_t>(o * pl.sym_bytes + byte)] ^=
                                    val[static_cast<size_t>(byte)];
                        }
                    }
                    out.push_back(std::move(tx));
                }
            } while (next_subset(U, p.n));
        }
    }
    return out;
}

RandDecodeResult decode_random(int u, const std::vector<RandTransmission>& received,
                               const RandPlacement& pl, const SystemParams& p, const Demand& d) {
    d.validate(p);
    if (u < 1 || u > p.n) throw InvalidParams("node id out of range");
    auto classes = classes_by_owner_set(pl);
    const auto& own_set = pl.index_sets[static_cast<size_t>(u - 1)];

    RandDecodeResult res;
    MdsCode code(static_cast<int>(pl.K), static_cast<int>(pl.nsym), pl.q);
    int f_u = d.files[static_cast<size_t>(u - 1)];

    for (int round = 1; round <= p.Lp; ++round) {
        int pk_u = d.segments[static_cast<size_t>(u - 1)] + round - 1;
        std::size_t fp_u = file_packet_slot(p, f_u, pk_u);
        std::map<int, Bytes> got;
        for (std::size_t i = 0; i < own_set.size(); ++i)
            got[own_set[i]] = pl.content[static_cast<size_t>(u - 1)][fp_u][i];

        for (const RandTransmission& tx : received) {
            if (tx.round != round || tx.sender == u) continue;
            if (!std::binary_search(tx.group.begin(), tx.group.end(), u)) continue;
            int b = static_cast<int>(tx.group.size());
            const std::vector<int>* Ju = class_of(classes, erase_one(tx.group, u));
            i64 c = tx.part_len;

            // Cancel every co-receiver's contribution from the local cache:
            // symbols meant for w are cached by all of U\{w}, which includes u.
            Bytes acc = tx.payload;
            for (int w : tx.group) {
                if (w == tx.sender || w == u) continue;
                const std::vector<int>* Jw = class_of(classes, erase_one(tx.group, w));
                if (!Jw) continue;
                std::vector<int> others = erase_one(tx.group, w);
                i64 ws = static_cast<i64>(rank_in(others, tx.sender) - 1) * c;
                int f_w = d.files[static_cast<size_t>(w - 1)];
                int pk_w = d.segments[static_cast<size_t>(w - 1)] + round - 1;
                std::size_t fp_w = file_packet_slot(p, f_w, pk_w);
                for (i64 o = 0; o < tx.sym_count && ws + o < static_cast<i64>(Jw->size()); ++o) {
                    int idx = (*Jw)[static_cast<size_t>(ws + o)];
                    int slot = cache_slot(pl, u, idx);
                    const Bytes& val =
                        pl.content[static_cast<size_t>(u - 1)][fp_w][static_cast<size_t>(slot)];
                    for (i64 byte = 0; byte < pl.sym_bytes; ++byte)
                        acc[static_cast<size_t>(o * pl.sym_bytes + byte)] ^=
                            val[static_cast<size_t>(byte)];
                }
            }

            std::vector<int> others_u = erase_one(tx.group, u);
            i64 ws_u = static_cast<i64>(rank_in(others_u, tx.sender) - 1) * c;
            for (i64 o = 0; o < tx.sym_count; ++o) {
                bool mine = Ju && ws_u + o < static_cast<i64>(Ju->size());
                auto first = acc.begin() + static_cast<std::ptrdiff_t>(o * pl.sym_bytes);
                auto last = first + static_cast<std::ptrdiff_t>(pl.sym_bytes);
                if (mine) {
                    got[(*Ju)[static_cast<size_t>(ws_u + o)]] = Bytes(first, last);
                } else if (std::any_of(first, last, [](u8 byte) { return byte != 0; })) {
                    // Positions past this receiver's class must cancel to
                    // zero; residue means the XOR bookkeeping diverged.
                    throw AssertionError("nonzero residue after cancelling transmission from node " +
                                         std::to_string(tx.sender) + " in group " +
                                         std::to_string(b) + " at symbol " + std::to_string(o));
                }
            }
        }

        res.distinct = static_cast<i64>(got.size());
        res.success = res.distinct >= pl.K;
        res.deficit = res.success ? 0 : pl.K - res.distinct;
        if (!res.success) {
            res.packets.clear();
            return res;
        }
        std::vector<CodedSymbol> syms;
        syms.reserve(got.size());
        for (auto& [idx, val] : got) syms.push_back({idx, std::move(val)});
        std::vector<Bytes> data = mds_decode(code, syms);
        Bytes packet;
        packet.reserve(static_cast<size_t>(p.F / 8));
        for (const Bytes& s : data) packet.insert(packet.end(), s.begin(), s.end());
        res.packets.push_back(std::move(packet));
    }
    return res;
}

Rational rate_random_measured(const std::vector<RandTransmission>& transmissions,
                              const SystemParams& p, i64 K) {
    i64 total = 0;
    for (const auto& tx : transmissions) total += tx.sym_count;
    return Rational(total, K * p.Lp);
}

std::vector<double> rand_counting_terms(int n, double p_cache, double rho) {
    if (n < 2) throw InvalidParams("counting mode needs at least two nodes");
    if (n > 20) throw InvalidParams("counting mode enumerates subsets; n capped at 20");
    if (!(p_cache > 0.0 && p_cache < 1.0)) throw InvalidParams("cache probability must lie in (0,1)");
    if (!(rho > 0.0 && rho <= 1.0)) throw InvalidParams("rho must lie in (0, 1]");

    std::vector<double> terms(static_cast<size_t>(n - 1), 0.0);
    for (int b = n; b >= 2; --b) {
        // Expected class size, in symbols per K (so contributions land
        // directly in rate units): |J| / K = (1/rho) p^(b-1) (1-p)^(n-b+1).
        double expect = std::exp(std::log(p_cache) * (b - 1) + std::log1p(-p_cache) * (n - b + 1)) / rho;
        double subtotal = 0.0;
        std::vector<int> U = first_subset(b);
        do {
            for (int vi = 0; vi < b; ++vi) {
                // Every receiver's remaining share of its class is
                // expect/(b-1) for each sender; the max over receivers is
                // the same value.
                double sym_count = expect / (b - 1);
                subtotal += sym_count;
            }
        } while (next_subset(U, n));
        terms[static_cast<size_t>(b - 2)] = subtotal;
    }
    return terms;
}

T1Result scheme_t1(const SystemParams& p, const Library& lib, const Demand& d, i64 K, int q,
                   u64 seed) {
    d.validate(p);
    if (K < 1) throw InvalidParams("K must be positive");
    if (q != 8 && q != 16) throw InvalidParams("field width must be 8 or 16");
    Rational cache_frac = p.M * Rational(K) / Rational(p.m);
    if (!cache_frac.is_integer())
        throw IndivisibleK("M*K/m = " + cache_frac.str() + " columns per node is not whole; " +
                           "use K = " + std::to_string(adjust_K(p, K)));
    i64 cache_syms = cache_frac.num();
    if (p.F % K != 0)
        throw IndivisibleK("K must divide the packet size F");
    i64 sym_bits = p.F / K;
    if (sym_bits % 8 != 0 || sym_bits % q != 0)
        throw IndivisibleK("subpacket size F/K must be a whole number of bytes and a multiple of q");
    i64 need = K - cache_syms;
    if (need > 0 && p.n < 2)
        throw InvalidParams("delivery needs at least two nodes");
    if (need > static_cast<i64>(p.n - 1) * cache_syms)
        throw InvalidParams("aggregate cache cannot supply K distinct projections");

    T1Result res;
    res.K = K;
    res.q = q;
    res.cache_syms = cache_syms;
    i64 sym_bytes = sym_bits / 8;

    std::vector<HashMatrix> G;
    G.reserve(static_cast<size_t>(p.n));
    for (int u = 1; u <= p.n; ++u)
        G.push_back(HashMatrix::generate(static_cast<int>(K), static_cast<int>(cache_syms), q,
                                         derive_seed(seed, "hash", static_cast<u64>(u))));

    // Projections of every requested (file, packet) pair under every node's
    // hashing matrix; proj[v-1][fp] has cache_syms wide symbols.
    std::map<std::size_t, std::vector<std::vector<Bytes>>> proj;  // fp -> [node-1] -> columns
    auto project = [&](std::size_t fp, int file, int pkt) {
        if (proj.count(fp)) return;
        const Bytes& packet = lib.packet(file, pkt);
        std::vector<Bytes> data(static_cast<size_t>(K));
        for (i64 i = 0; i < K; ++i)
            data[static_cast<size_t>(i)] =
                Bytes(packet.begin() + i * sym_bytes, packet.begin() + (i + 1) * sym_bytes);
        std::vector<std::vector<Bytes>> per_node;
        per_node.reserve(static_cast<size_t>(p.n));
        for (int v = 1; v <= p.n; ++v)
            per_node.push_back(hash_encode(G[static_cast<size_t>(v - 1)], data));
        proj[fp] = std::move(per_node);
    };
    for (int u = 1; u <= p.n; ++u)
        for (int round = 1; round <= p.Lp; ++round) {
            int f = d.files[static_cast<size_t>(u - 1)];
            int pk = d.segments[static_cast<size_t>(u - 1)] + round - 1;
            project(file_packet_slot(p, f, pk), f, pk);
        }

    // Sender v (the i-th other node, ascending) contributes its first
    // base(+1) cache columns; the loads differ by at most one column.
    auto share_of = [&](int rank1) {
        i64 base = p.n >= 2 ? need / (p.n - 1) : 0;
        i64 rem = p.n >= 2 ? need % (p.n - 1) : 0;
        return base + (rank1 <= rem ? 1 : 0);
    };

    res.rank_ok.assign(static_cast<size_t>(p.n), false);
    res.packets.resize(static_cast<size_t>(p.n));
    i64 sent_syms = 0;
    for (int u = 1; u <= p.n; ++u) {
        GfMatrix B(static_cast<int>(K), static_cast<int>(K), q);
        int row = 0;
        for (i64 j = 0; j < cache_syms; ++j, ++row)
            for (i64 i = 0; i < K; ++i)
                B.at(row, static_cast<int>(i)) =
                    G[static_cast<size_t>(u - 1)].at(static_cast<int>(i), static_cast<int>(j));
        struct Piece {
            int v;
            i64 col;
        };
        std::vector<Piece> pieces;
        int rank1 = 0;
        for (int v = 1; v <= p.n; ++v) {
            if (v == u) continue;
            ++rank1;
            i64 share = share_of(rank1);
            sent_syms += share * p.Lp;
            for (i64 jcol = 0; jcol < share; ++jcol, ++row) {
                for (i64 i = 0; i < K; ++i)
                    B.at(row, static_cast<int>(i)) =
                        G[static_cast<size_t>(v - 1)].at(static_cast<int>(i), static_cast<int>(jcol));
                pieces.push_back({v, jcol});
            }
        }
        if (row != K) throw AssertionError("projection system is not square");

        bool ok = rank_gf(B) == static_cast<int>(K);
        res.rank_ok[static_cast<size_t>(u - 1)] = ok;
        if (!ok) {
            ++res.rank_failures;
            continue;
        }
        for (int round = 1; round <= p.Lp; ++round) {
            int f = d.files[static_cast<size_t>(u - 1)];
            int pk = d.segments[static_cast<size_t>(u - 1)] + round - 1;
            std::size_t fp = file_packet_slot(p, f, pk);
            std::vector<Bytes> rhs;
            rhs.reserve(static_cast<size_t>(K));
            for (i64 j = 0; j < cache_syms; ++j)
                rhs.push_back(proj[fp][static_cast<size_t>(u - 1)][static_cast<size_t>(j)]);
            for (const Piece& pc : pieces)
                rhs.push_back(proj[fp][static_cast<size_t>(pc.v - 1)][static_cast<size_t>(pc.col)]);
            std::vector<Bytes> data = gf_solve(B, std::move(rhs));
            Bytes packet;
            packet.reserve(static_cast<size_t>(p.F / 8));
            for (const Bytes& s : data) packet.insert(packet.end(), s.begin(), s.end());
            res.packets[static_cast<size_t>(u - 1)].push_back(std::move(packet));
        }
    }
    res.measured_rate = Rational(sent_syms, K * p.Lp);
    return res;
}

}  // namespace d2d
