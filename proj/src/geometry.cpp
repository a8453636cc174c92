#include "d2d/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace d2d {

namespace {

int exact_isqrt(int n) {
    int s = static_cast<int>(std::lround(std::sqrt(static_cast<double>(n))));
    while (s > 0 && static_cast<i64>(s) * s > n) --s;
    while (static_cast<i64>(s + 1) * (s + 1) <= n) ++s;
    return s;
}

void check_node_id(const GridNetwork& net, int u, const char* role) {
    if (u < 1 || u > net.n)
        throw InvalidParams(std::string(role) + " node id " + std::to_string(u) +
                            " outside 1.." + std::to_string(net.n));
}

}  // namespace

GridNetwork GridNetwork::make(int n) {
    if (n <= 0) throw InvalidParams("grid needs a positive node count");
    int side = exact_isqrt(n);
    if (side * side != n)
        throw InvalidParams("grid layout needs a perfect-square node count, got n=" +
                            std::to_string(n));
    GridNetwork net;
    net.n = n;
    net.side = side;
    net.half.reserve(static_cast<size_t>(n));
    for (int u = 0; u < n; ++u) {
        int row = u / side;
        int col = u % side;
        net.half.emplace_back(2 * col + 1, 2 * row + 1);
    }
    return net;
}

Rational GridNetwork::dist2(int a, int b) const {
    check_node_id(*this, a, "distance");
    check_node_id(*this, b, "distance");
    i64 dx = half[static_cast<size_t>(a - 1)].first - half[static_cast<size_t>(b - 1)].first;
    i64 dy = half[static_cast<size_t>(a - 1)].second - half[static_cast<size_t>(b - 1)].second;
    return Rational(dx * dx + dy * dy, 4LL * n);
}

FeasibilityResult check_protocol_feasible(const GridNetwork& net, const Slot& slot,
                                          const Rational& r, const Rational& delta) {
    if (r <= Rational(0)) throw InvalidParams("transmission range must be positive");
    if (delta < Rational(0)) throw InvalidParams("interference margin must be non-negative");
    const Rational range2 = r * r;
    const Rational one_plus = Rational(1) + delta;
    const Rational guard2 = one_plus * one_plus * range2;

    FeasibilityResult res;
    for (const Link& link : slot.links) {
        check_node_id(net, link.tx, "transmitter");
        for (int rx : link.rx) {
            check_node_id(net, rx, "receiver");
            Rational d2 = net.dist2(link.tx, rx);
            if (!(d2 < range2))
                res.violations.push_back({link.tx, rx, 0, d2, range2});
            for (const Link& other : slot.links) {
                if (other.tx == link.tx) continue;
                Rational i2 = net.dist2(other.tx, rx);
                if (i2 < guard2)
                    res.violations.push_back({link.tx, rx, other.tx, i2, guard2});
            }
        }
    }
    res.ok = res.violations.empty();
    return res;
}

i64 ceil_sqrt2_times(const Rational& x) {
    if (x <= Rational(0)) throw InvalidParams("ceil_sqrt2_times expects a positive argument");
    // Smallest k with k >= sqrt(2)*x, i.e. k^2 * den^2 >= 2 * num^2.
    i64 num = x.num(), den = x.den();
    i64 k = static_cast<i64>(std::ceil(std::sqrt(2.0) * x.to_double()));
    if (k < 1) k = 1;
    auto ge = [&](i64 kk) {
        i128 lhs = static_cast<i128>(kk) * kk * den * den;
        i128 rhs = static_cast<i128>(2) * num * num;
        return lhs >= rhs;
    };
    while (k > 1 && ge(k - 1)) --k;
    while (!ge(k)) ++k;
    return k;
}

i64 coloring_stride(const Rational& delta) {
    if (delta <= Rational(0)) throw InvalidParams("interference margin must be positive");
    return ceil_sqrt2_times(Rational(1) + delta) + 1;
}

i64 reuse_factor(const Rational& delta) {
    i64 kappa = coloring_stride(delta);
    return kappa * kappa;
}

i64 concurrency_cap(const Rational& delta) {
    if (delta <= Rational(0)) throw InvalidParams("interference margin must be positive");
    Rational two_plus = Rational(2) + delta;
    Rational v = Rational(4) * two_plus * two_plus / (delta * delta);
    return v.ceil();
}

ClusterLayout make_layout(const GridNetwork& net, int q, const Rational& delta) {
    if (q < 1 || q > net.side)
        throw InvalidParams("cluster side must lie in 1..grid side");
    ClusterLayout lay;
    lay.q = q;
    lay.gc = static_cast<i64>(q) * q;
    lay.cx = (net.side + q - 1) / q;
    lay.cy = (net.side + q - 1) / q;
    lay.kappa = coloring_stride(delta);
    lay.colors = lay.kappa * lay.kappa;
    lay.partial = (net.side % q) != 0;
    lay.cluster_of.assign(static_cast<size_t>(net.n), -1);
    lay.members.assign(static_cast<size_t>(lay.cx) * static_cast<size_t>(lay.cy), {});
    for (int u = 0; u < net.n; ++u) {
        int row = u / net.side;
        int col = u % net.side;
        int c = (col / q) + lay.cx * (row / q);
        lay.cluster_of[static_cast<size_t>(u)] = c;
        lay.members[static_cast<size_t>(c)].push_back(u + 1);
    }
    lay.color_of.assign(lay.members.size(), 0);
    for (int by = 0; by < lay.cy; ++by)
        for (int bx = 0; bx < lay.cx; ++bx) {
            int c = bx + lay.cx * by;
            i64 color = (bx % lay.kappa) + lay.kappa * (by % lay.kappa) + 1;
            lay.color_of[static_cast<size_t>(c)] = static_cast<int>(color);
        }
    return lay;
}

ClusterLayout build_clusters(const SystemParams& p) {
    GridNetwork net = GridNetwork::make(p.n);
    if (!(p.r * p.r < Rational(2)))
        throw InvalidParams("clustering applies only when r^2 < 2; with full range use a flat schedule");
    std::string why;
    for (int q = 1; q <= net.side; ++q) {
        if (net.side % q != 0) continue;
        i64 gc = static_cast<i64>(q) * q;
        bool caches = Rational(gc) * p.M >= Rational(p.m);
        bool covers = p.r * p.r >= Rational(2 * gc, p.n);
        if (caches && covers) {
            ClusterLayout lay = make_layout(net, q, p.delta);
            return lay;
        }
        if (!caches)
            why += " q=" + std::to_string(q) + " caches only " +
                   (Rational(gc) * p.M).str() + " of " + std::to_string(p.m) + " files;";
        else
            why += " q=" + std::to_string(q) + " needs r^2 >= " + Rational(2 * gc, p.n).str() +
                   " but r^2 = " + (p.r * p.r).str() + ";";
    }
    throw NoFeasibleCluster("no divisor cluster side works for n=" + std::to_string(p.n) +
                            ":" + why);
}

}  // namespace d2d
