#pragma once

#include <map>
#include <vector>

#include "d2d/common.hpp"
#include "d2d/demands.hpp"
#include "d2d/library.hpp"
#include "d2d/params.hpp"
#include "d2d/rational.hpp"

namespace d2d {

// Every packet is cut into D = t*C(n,t) subpackets. Subpacket (T, j) is the
// piece with ordinal rank(T)*t + (j-1); node u caches (T, j) iff u is in T.
struct SubpacketLabel {
    std::vector<int> T;  // sorted t-subset of {1..n}
    int j = 0;           // 1..t

    bool operator==(const SubpacketLabel&) const = default;
    auto operator<=>(const SubpacketLabel&) const = default;
};

// A bit window of every packet: the whole packet for integer t, or one of
// the two prefix/suffix parts under memory sharing.
struct PacketView {
    i64 offset = 0;  // first bit
    i64 len = 0;     // bits in the window

    bool operator==(const PacketView&) const = default;
};

// One integer-t constituent scheme operating on a packet window.
struct DetPart {
    int t = 0;
    PacketView view;
    i64 D = 0;  // t * C(n, t) subpackets per window

    Rational nominal_subpacket_bits() const { return Rational(view.len, D); }
    i64 payload_bytes() const { return (view.len + 8 * D - 1) / (8 * D); }
};

// Convex split between the two neighboring integer-t placements for
// fractional t: a prefix of alpha*F bits runs at t1, the rest at t2.
struct SharingSplit {
    Rational alpha;  // fraction of each packet placed under t1
    int t1 = 0;
    int t2 = 0;
    Rational M1;  // t1*m/n
    Rational M2;  // t2*m/n
};

struct DetCaches {
    std::vector<DetPart> parts;  // one entry (integer t) or two (sharing)
    // bytes[node-1][part][(file-1)*L + (packet-1)][ordinal] = subpacket slice
    std::vector<std::vector<std::vector<std::map<i64, Bytes>>>> bytes;

    // Nominal stored bits for one node (rational-exact; must equal M*F*L).
    Rational stored_bits(int node) const;
};

struct CodedTransmission {
    int sender = 0;          // node id
    std::vector<int> group;  // sorted (t+1)-subset S containing the sender
    int round = 0;           // 1..Lp
    int t = 0;               // constituent scheme (distinguishes sharing parts)
    PacketView view;
    i64 D = 0;
    Bytes payload;  // XOR of t subpacket slices, zero-padded to whole bytes

    struct Constituent {
        int receiver = 0;
        int file = 0;
        int packet = 0;
        SubpacketLabel label;
    };
    std::vector<Constituent> constituents;

    Rational nominal_bits() const { return Rational(view.len, D); }
};

// Labels cached by `node` under parameter t: all (T, j) with node in T.
std::vector<SubpacketLabel> labels_for_node(int n, int t, int node);

// Bit range [start, end) of subpacket ordinal `ord` inside a window of
// `len` bits cut into D near-equal pieces.
std::pair<i64, i64> subpacket_bit_range(i64 len, i64 D, i64 ord);
i64 label_ordinal(const SubpacketLabel& label, int n, int t);

// Placement for integer t over whole packets; throws NonIntegerT otherwise.
DetCaches place_det(const SystemParams& p, const Library& lib);

// The fractional-t split; throws NotApplicable when t is an integer and
// InvalidParams when alpha*F is not a whole number of bits.
SharingSplit memory_share(const SystemParams& p);

// Placement that dispatches on t: integer t behaves like place_det, and
// fractional t places the two memory-sharing parts.
DetCaches place_det_any(const SystemParams& p, const Library& lib);

// Coded-multicast delivery: per part, per round, per (t+1)-subset S, every
// member of S sends one XOR of t subpackets, one per co-member.
std::vector<CodedTransmission> deliver_det(const SystemParams& p, const DetCaches& caches,
                                           const Demand& demand);

// Reconstructs node u's requested packets byte-exactly from its cache plus
// the received transmissions; throws MissingTransmission if any transmission
// addressed to a group containing u is absent.
std::vector<Bytes> decode_det(int u, const std::vector<CodedTransmission>& received,
                              const DetCaches& caches, const SystemParams& p,
                              const Demand& demand);

// Sum of nominal payload bits over F*Lp: equals (m/M)(1-M/m) exactly for
// integer t and the convex combination of the neighboring integer-t rates
// under memory sharing.
Rational rate_det_measured(const std::vector<CodedTransmission>& transmissions,
                           const SystemParams& p);

}  // namespace d2d
