#include "d2d/det_scheme.hpp"

#include <algorithm>
#include <string>
#include <tuple>

#include "d2d/bits.hpp"
#include "d2d/combinatorics.hpp"

namespace d2d {

namespace {

std::string subset_str(const std::vector<int>& s) {
    std::string out = "{";
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (i) out += ",";
        out += std::to_string(s[i]);
    }
    return out + "}";
}

std::vector<DetPart> parts_for(const SystemParams& p) {
    if (p.integer_t()) {
        int t = p.t_int();
        return {DetPart{t, PacketView{0, p.F}, t * binomial_i64(p.n, t)}};
    }
    SharingSplit split = memory_share(p);
    i64 f1 = (split.alpha * Rational(p.F)).num();  // integrality checked by memory_share
    std::vector<DetPart> parts;
    if (f1 > 0) {
        parts.push_back(DetPart{split.t1, PacketView{0, f1}, split.t1 * binomial_i64(p.n, split.t1)});
    }
    if (p.F - f1 > 0) {
        parts.push_back(
            DetPart{split.t2, PacketView{f1, p.F - f1}, split.t2 * binomial_i64(p.n, split.t2)});
    }
    return parts;
}

// Slice the subpacket `ord` of the given part out of a full packet buffer,
// zero-padded to whole bytes.
Bytes subpacket_slice(const Bytes& packet, const DetPart& part, i64 ord) {
    auto [start, end] = subpacket_bit_range(part.view.len, part.D, ord);
    return slice_bits(packet, part.view.offset + start, end - start);
}

}  // namespace

std::pair<i64, i64> subpacket_bit_range(i64 len, i64 D, i64 ord) {
    if (ord < 0 || ord >= D) throw InvalidParams("subpacket ordinal out of range");
    return {ord * len / D, (ord + 1) * len / D};
}

i64 label_ordinal(const SubpacketLabel& label, int n, int t) {
    return subset_rank(label.T, n) * t + (label.j - 1);
}

std::vector<SubpacketLabel> labels_for_node(int n, int t, int node) {
    std::vector<SubpacketLabel> out;
    auto T = first_subset(t);
    do {
        if (!std::binary_search(T.begin(), T.end(), node)) continue;
        for (int j = 1; j <= t; ++j) out.push_back(SubpacketLabel{T, j});
    } while (next_subset(T, n));
    return out;
}

Rational DetCaches::stored_bits(int node) const {
    Rational total(0);
    for (std::size_t pi = 0; pi < parts.size(); ++pi) {
        const DetPart& part = parts[pi];
        i64 labels = 0;
        for (const auto& per_packet : bytes[static_cast<std::size_t>(node - 1)][pi]) {
            labels += static_cast<i64>(per_packet.size());
        }
        total = total + Rational(labels) * part.nominal_subpacket_bits();
    }
    return total;
}

SharingSplit memory_share(const SystemParams& p) {
    Rational t = p.t();
    if (t.is_integer()) throw NotApplicable("t = " + t.str() + " is an integer; no split needed");
    SharingSplit s;
    s.t1 = static_cast<int>(t.floor());
    s.t2 = s.t1 + 1;
    s.M1 = Rational(s.t1) * Rational(p.m) / Rational(p.n);
    s.M2 = Rational(s.t2) * Rational(p.m) / Rational(p.n);
    s.alpha = (s.M2 - p.M) / (s.M2 - s.M1);
    if (s.alpha < Rational(0) || s.alpha > Rational(1)) {
        throw InvalidParams("memory-sharing fraction out of [0,1]");
    }
    if (s.alpha * s.M1 + (Rational(1) - s.alpha) * s.M2 != p.M) {
        throw InvalidParams("memory-sharing split failed to reproduce M");
    }
    Rational f1 = s.alpha * Rational(p.F);
    if (!f1.is_integer()) {
        throw InvalidParams("memory sharing needs alpha*F integral; alpha = " + s.alpha.str() +
                            ", F = " + std::to_string(p.F) + " gives " + f1.str() +
                            " bits — pick F divisible by " + std::to_string(s.alpha.den()));
    }
    return s;
}

DetCaches place_det_any(const SystemParams& p, const Library& lib) {
    DetCaches caches;
    caches.parts = parts_for(p);
    caches.bytes.assign(static_cast<std::size_t>(p.n), {});
    for (int u = 1; u <= p.n; ++u) {
        auto& node = caches.bytes[static_cast<std::size_t>(u - 1)];
        node.resize(caches.parts.size());
        for (std::size_t pi = 0; pi < caches.parts.size(); ++pi) {
            const DetPart& part = caches.parts[pi];
            auto labels = labels_for_node(p.n, part.t, u);
            node[pi].resize(static_cast<std::size_t>(p.m) * p.L);
            for (int f = 1; f <= p.m; ++f) {
                for (int pk = 1; pk <= p.L; ++pk) {
                    const Bytes& packet = lib.packet(f, pk);
                    auto& store = node[pi][static_cast<std::size_t>(f - 1) * p.L + (pk - 1)];
                    for (const auto& label : labels) {
                        i64 ord = label_ordinal(label, p.n, part.t);
                        store.emplace(ord, subpacket_slice(packet, part, ord));
                    }
                }
            }
        }
    }
    return caches;
}

DetCaches place_det(const SystemParams& p, const Library& lib) {
    if (!p.integer_t()) throw NonIntegerT("placement needs integer t, got " + p.t().str());
    return place_det_any(p, lib);
}

std::vector<CodedTransmission> deliver_det(const SystemParams& p, const DetCaches& caches,
                                           const Demand& demand) {
    demand.validate(p);
    std::vector<CodedTransmission> out;
    for (std::size_t pi = 0; pi < caches.parts.size(); ++pi) {
        const DetPart& part = caches.parts[pi];
        int t = part.t;
        if (t >= p.n) continue;  // no (t+1)-subsets: everything is cached
        i64 payload_bytes = part.payload_bytes();
        for (int round = 1; round <= p.Lp; ++round) {
            auto S = first_subset(t + 1);
            do {
                for (int sender : S) {
                    CodedTransmission tx;
                    tx.sender = sender;
                    tx.group = S;
                    tx.round = round;
                    tx.t = t;
                    tx.view = part.view;
                    tx.D = part.D;
                    tx.payload.assign(static_cast<std::size_t>(payload_bytes), 0);
                    for (int v : S) {
                        if (v == sender) continue;
                        SubpacketLabel label;
                        label.T.reserve(static_cast<std::size_t>(t));
                        for (int w : S) {
                            if (w != v) label.T.push_back(w);
                        }
                        label.j = static_cast<int>(std::lower_bound(label.T.begin(),
                                                                    label.T.end(), sender) -
                                                   label.T.begin()) +
                                  1;
                        int f = demand.files[static_cast<std::size_t>(v - 1)];
                        int pk = demand.segments[static_cast<std::size_t>(v - 1)] + round - 1;
                        i64 ord = label_ordinal(label, p.n, t);
                        const auto& store =
                            caches.bytes[static_cast<std::size_t>(sender - 1)][pi]
                                        [static_cast<std::size_t>(f - 1) * p.L + (pk - 1)];
                        auto it = store.find(ord);
                        if (it == store.end()) {
                            throw MissingTransmission("sender " + std::to_string(sender) +
                                                      " lacks cached subpacket for group " +
                                                      subset_str(S));
                        }
                        xor_into(tx.payload, it->second);
                        tx.constituents.push_back({v, f, pk, std::move(label)});
                    }
                    out.push_back(std::move(tx));
                }
            } while (next_subset(S, p.n));
        }
    }
    return out;
}

std::vector<Bytes> decode_det(int u, const std::vector<CodedTransmission>& received,
                              const DetCaches& caches, const SystemParams& p,
                              const Demand& demand) {
    demand.validate(p);
    // Index received transmissions by (t, round, group, sender).
    std::map<std::tuple<int, int, std::vector<int>, int>, const CodedTransmission*> index;
    for (const auto& tx : received) {
        index.emplace(std::make_tuple(tx.t, tx.round, tx.group, tx.sender), &tx);
    }

    int f_u = demand.files[static_cast<std::size_t>(u - 1)];
    int s_u = demand.segments[static_cast<std::size_t>(u - 1)];
    std::vector<Bytes> packets;
    packets.reserve(static_cast<std::size_t>(p.Lp));

    for (int round = 1; round <= p.Lp; ++round) {
        int pk = s_u + round - 1;
        Bytes packet(static_cast<std::size_t>(p.packet_bytes()), 0);
        for (std::size_t pi = 0; pi < caches.parts.size(); ++pi) {
            const DetPart& part = caches.parts[pi];
            int t = part.t;
            const auto& own =
                caches.bytes[static_cast<std::size_t>(u - 1)][pi]
                            [static_cast<std::size_t>(f_u - 1) * p.L + (pk - 1)];
            // Cached subpackets drop straight into place.
            for (const auto& [ord, slice] : own) {
                auto [start, end] = subpacket_bit_range(part.view.len, part.D, ord);
                write_bits(packet, part.view.offset + start, slice, end - start);
            }
            if (t >= p.n) continue;
            // Every missing piece (T, i) with u not in T arrives from the
            // i-th member of T inside group S = T + {u}.
            auto T = first_subset(t);
            do {
                if (std::binary_search(T.begin(), T.end(), u)) continue;
                std::vector<int> S = T;
                S.insert(std::lower_bound(S.begin(), S.end(), u), u);
                for (int i = 1; i <= t; ++i) {
                    int sender = T[static_cast<std::size_t>(i - 1)];
                    auto it = index.find(std::make_tuple(t, round, S, sender));
                    if (it == index.end()) {
                        throw MissingTransmission("node " + std::to_string(u) +
                                                  " missing transmission from " +
                                                  std::to_string(sender) + " in group " +
                                                  subset_str(S) + " round " +
                                                  std::to_string(round));
                    }
                    const CodedTransmission& tx = *it->second;
                    Bytes acc = tx.payload;
                    bool found_self = false;
                    for (const auto& c : tx.constituents) {
                        if (c.receiver == u) {
                            found_self = true;
                            continue;
                        }
                        // Constituents for other receivers have u in their T,
                        // so u holds them in its cache.
                        i64 ord = label_ordinal(c.label, p.n, t);
                        const auto& store =
                            caches.bytes[static_cast<std::size_t>(u - 1)][pi]
                                        [static_cast<std::size_t>(c.file - 1) * p.L +
                                         (c.packet - 1)];
                        auto sit = store.find(ord);
                        if (sit == store.end()) {
                            throw MissingTransmission(
                                "node " + std::to_string(u) +
                                " cannot cancel a constituent it should have cached");
                        }
                        xor_into(acc, sit->second);
                    }
                    if (!found_self) {
                        throw MissingTransmission("transmission carries no piece for node " +
                                                  std::to_string(u));
                    }
                    i64 ord = subset_rank(T, p.n) * t + (i - 1);
                    auto [start, end] = subpacket_bit_range(part.view.len, part.D, ord);
                    Bytes slice = slice_bits(acc, 0, end - start);
                    write_bits(packet, part.view.offset + start, slice, end - start);
                }
            } while (next_subset(T, p.n));
        }
        packets.push_back(std::move(packet));
    }
    return packets;
}

Rational rate_det_measured(const std::vector<CodedTransmission>& transmissions,
                           const SystemParams& p) {
    Rational bits(0);
    for (const auto& tx : transmissions) bits = bits + tx.nominal_bits();
    return bits / Rational(p.F * p.Lp);
}

}  // namespace d2d
