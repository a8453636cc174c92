#pragma once

#include <map>
#include <vector>

#include "d2d/common.hpp"
#include "d2d/demands.hpp"
#include "d2d/library.hpp"
#include "d2d/mds.hpp"
#include "d2d/params.hpp"
#include "d2d/rational.hpp"

namespace d2d {

// Solution of x = 1 - exp(-t*x) on (0, 1), the cache-hit fixed point that
// tunes the MDS expansion. Exists only for t > 1 (throws NoSolution below).
// rho = (1 - epsilon) * rho_star is the back-off actually used by placement.
struct RhoSolution {
    double t = 0;
    double rho_star = 0;
    double epsilon = 0;
    double rho = 0;       // (1 - epsilon) * rho_star
    double residual = 0;  // |rho_star - (1 - exp(-t*rho_star))|
    int iterations = 0;
};
RhoSolution solve_rho_star(double t, double epsilon = 0.001);

// Smallest K' >= K such that a node caching the fraction M/m of each of the
// K' coded symbols stores a whole number of symbols (M*K'/m integral).
i64 adjust_K(const SystemParams& p, i64 K);

// Random placement: each packet is cut into K subpackets of F/K bits,
// expanded by a (K, nsym = ceil(K/rho)) MDS code, and every node stores the
// coded symbols whose indices land in its sampled index set (same set for
// all files and packets; M*K/m indices drawn without replacement).
struct RandPlacement {
    i64 K = 0;
    i64 nsym = 0;
    i64 cache_syms = 0;  // M*K/m
    int q = 0;           // field width backing the MDS code
    double rho = 0;
    i64 sym_bytes = 0;  // (F/K)/8
    std::vector<std::vector<int>> index_sets;           // [node-1] sorted coded indices
    std::vector<std::vector<std::vector<Bytes>>> content;  // [node-1][(f-1)*L+p-1][slot]
};
RandPlacement place_random(const SystemParams& p, const Library& lib, i64 K, double rho,
                           u64 seed);

struct LibraryCoverage {
    i64 distinct = 0;  // distinct coded indices cached across all nodes
    bool complete = false;  // distinct >= K: every packet decodable network-wide
};
LibraryCoverage check_library_cached(const RandPlacement& pl);

// One coded-multicast transmission of the random scheme: sender v in group U
// XORs, for every co-member u, u's assigned window of the index class
// J(f_u, U\{u}) — the coded symbols of u's file that exactly the nodes
// U\{u} cache. Windows of length ceil(J_max/(|U|-1)) are assigned by sender
// rank; trailing windows that every receiver has exhausted are truncated.
struct RandTransmission {
    int sender = 0;
    std::vector<int> group;  // sorted, includes the sender
    int round = 0;           // 1..Lp
    i64 j_max = 0;           // largest class size in the group this round
    i64 part_len = 0;        // ceil(j_max / (|group|-1))
    i64 sym_count = 0;       // symbols actually carried (after truncation)
    Bytes payload;           // sym_count wide symbols
};
std::vector<RandTransmission> deliver_random(const SystemParams& p, const RandPlacement& pl,
                                             const Demand& d);

// Per-node decode outcome. A symbol deficit (fewer than K distinct coded
// symbols reachable) is reported as data, not thrown: it is the scheme's
// designed failure mode with probability controlled by the rho back-off.
struct RandDecodeResult {
    bool success = false;
    i64 distinct = 0;  // distinct coded indices available to this node
    i64 deficit = 0;   // max(0, K - distinct)
    std::vector<Bytes> packets;  // Lp requested packets, byte-exact when success
};
RandDecodeResult decode_random(int u, const std::vector<RandTransmission>& received,
                               const RandPlacement& pl, const SystemParams& p, const Demand& d);

// Sum of carried symbols over K*Lp: the delivered bits per requested bit.
Rational rate_random_measured(const std::vector<RandTransmission>& transmissions,
                              const SystemParams& p, i64 K);

// Expected-size ledger of the same delivery loop: every class size replaced
// by its expectation K/rho * p^(s-1) * (1-p)^(n-s+1) with no integer
// rounding. Returns the per-group-size contributions (index 0 <-> s=2), in
// rate units; their sum is the closed-form delivery-rate series.
std::vector<double> rand_counting_terms(int n, double p_cache, double rho);

// Coordinated hashing scheme for small t: every node stores M*K/m pseudo-
// random GF(2^q) projections of each packet, and delivery sends raw cache
// columns split evenly across the n-1 senders. Decoding solves the stacked
// K x K projection system; rank deficiency is counted per node, not thrown.
struct T1Result {
    i64 K = 0;
    int q = 0;
    i64 cache_syms = 0;            // M*K/m columns per node
    std::vector<bool> rank_ok;     // per node: stacked system invertible
    i64 rank_failures = 0;
    Rational measured_rate;        // sent symbols over K*Lp; equals n - t
    // packets[u-1] holds node u's Lp decoded packets (empty on rank failure)
    std::vector<std::vector<Bytes>> packets;
};
T1Result scheme_t1(const SystemParams& p, const Library& lib, const Demand& d, i64 K, int q,
                   u64 seed);

}  // namespace d2d
