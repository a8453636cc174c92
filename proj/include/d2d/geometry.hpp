#pragma once

#include <utility>
#include <vector>

#include "d2d/common.hpp"
#include "d2d/params.hpp"
#include "d2d/rational.hpp"

namespace d2d {

// Unit-square grid of n = side*side nodes.  Node u (1-based, row-major from
// the bottom-left corner) sits at the center of its grid cell.  Positions are
// stored as odd half-step integers (2*col+1, 2*row+1) in units of
// 1/(2*side), which makes every pairwise squared distance an exact rational
// with denominator 4*n.  All protocol-model comparisons are then decidable in
// integer arithmetic; no floating-point geometry is involved.
struct GridNetwork {
    int n = 0;
    int side = 0;
    std::vector<std::pair<i64, i64>> half;  // half[u-1] = (hx, hy)

    static GridNetwork make(int n);

    // Exact squared Euclidean distance between nodes a and b (1-based ids).
    Rational dist2(int a, int b) const;
};

// One transmitter and the receivers it serves within a slot.
struct Link {
    int tx = 0;
    std::vector<int> rx;
};

// A set of links intended to be active simultaneously.
struct Slot {
    std::vector<Link> links;
};

struct Violation {
    int tx = 0;          // transmitter of the offended link
    int rx = 0;          // receiver that is out of range / interfered with
    int interferer = 0;  // 0: rx out of range of tx; else the interfering tx
    Rational dist2;      // offending squared distance
    Rational limit2;     // squared threshold it was compared against
};

struct FeasibilityResult {
    bool ok = false;
    std::vector<Violation> violations;
};

// Protocol-model admissibility of a slot: every receiver must lie strictly
// within range r of its transmitter, and at distance at least (1+delta)*r
// from every other simultaneously active transmitter.  Exact arithmetic.
FeasibilityResult check_protocol_feasible(const GridNetwork& net, const Slot& slot,
                                          const Rational& r, const Rational& delta);

// Smallest integer k with k >= sqrt(2) * x, for rational x > 0 (exact).
i64 ceil_sqrt2_times(const Rational& x);

// Stride of the square TDMA coloring: one plus the smallest integer number of
// cluster widths that guarantees the guard-zone spacing.
i64 coloring_stride(const Rational& delta);

// Number of TDMA phases (colors) of the square reuse pattern: stride^2.
i64 reuse_factor(const Rational& delta);

// Upper bound on the number of simultaneously active transmitters whose
// receiver ranges can overlap a given point: ceil(4*(2+delta)^2 / delta^2).
i64 concurrency_cap(const Rational& delta);

// Partition of the grid into q x q clusters (boundary clusters may be
// smaller when q does not divide the grid side), with the square coloring
// that spaces concurrently active clusters by `kappa` cluster widths.
struct ClusterLayout {
    int q = 0;        // cluster side, in grid nodes
    i64 gc = 0;       // nodes per full cluster (q*q)
    int cx = 0;       // cluster-grid width
    int cy = 0;       // cluster-grid height
    i64 kappa = 0;    // coloring stride
    i64 colors = 0;   // kappa^2 TDMA phases
    bool partial = false;  // true when the grid side is not a multiple of q

    std::vector<int> cluster_of;            // node id-1 -> cluster index
    std::vector<std::vector<int>> members;  // cluster index -> ascending node ids
    std::vector<int> color_of;              // cluster index -> color in 1..colors
};

ClusterLayout make_layout(const GridNetwork& net, int q, const Rational& delta);

// Chooses the smallest admissible cluster size for params: q must divide the
// grid side, each cluster must collectively cache the whole library
// (gc * M >= m), and r must cover a cluster (r^2 >= 2*gc/n).  Requires
// r^2 < 2; throws NoFeasibleCluster when no q qualifies.
ClusterLayout build_clusters(const SystemParams& p);

}  // namespace d2d
