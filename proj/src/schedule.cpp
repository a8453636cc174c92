#include "d2d/schedule.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <string>

namespace d2d {

namespace {

Rational ceil_div(const Rational& a, const Rational& b) { return Rational((a / b).ceil()); }

std::string describe(const Violation& v) {
    if (v.interferer == 0)
        return "receiver " + std::to_string(v.rx) + " out of range of transmitter " +
               std::to_string(v.tx) + " (d^2 = " + v.dist2.str() + " >= r^2 = " + v.limit2.str() +
               ")";
    return "transmitter " + std::to_string(v.interferer) + " inside the guard zone of receiver " +
           std::to_string(v.rx) + " (d^2 = " + v.dist2.str() + " < (1+delta)^2 r^2 = " +
           v.limit2.str() + ")";
}

void sort_messages(std::vector<AirMessage>& msgs) {
    std::stable_sort(msgs.begin(), msgs.end(), [](const AirMessage& a, const AirMessage& b) {
        if (a.round != b.round) return a.round < b.round;
        if (a.group != b.group) return a.group < b.group;
        return a.sender < b.sender;
    });
}

Link link_of(const AirMessage& m) {
    Link l;
    l.tx = m.sender;
    for (int u : m.group)
        if (u != m.sender) l.rx.push_back(u);
    return l;
}

void audit_spans(const GridNetwork& net, const SystemParams& p,
                 const std::vector<SlotSpan>& spans) {
    for (const SlotSpan& span : spans) {
        FeasibilityResult fr = check_protocol_feasible(net, span.slot, p.r, p.delta);
        if (!fr.ok)
            throw InfeasibleTransmission("slot starting at channel use " +
                                         std::to_string(span.start) + ": " +
                                         describe(fr.violations.front()));
    }
}

}  // namespace

std::vector<AirMessage> air_messages(const std::vector<CodedTransmission>& txs) {
    std::vector<AirMessage> out;
    out.reserve(txs.size());
    for (const CodedTransmission& tx : txs)
        out.push_back({tx.sender, tx.group, tx.round, tx.nominal_bits()});
    return out;
}

std::vector<AirMessage> air_messages(const std::vector<RandTransmission>& txs,
                                     const RandPlacement& pl) {
    std::vector<AirMessage> out;
    out.reserve(txs.size());
    for (const RandTransmission& tx : txs)
        out.push_back({tx.sender, tx.group, tx.round, Rational(tx.sym_count * pl.sym_bytes * 8)});
    return out;
}

ScheduleResult schedule(const SystemParams& p, std::vector<AirMessage> messages,
                        const ClusterLayout* layout) {
    GridNetwork net = GridNetwork::make(p.n);
    Rational c_r = p.cr_at_r();
    ScheduleResult res;
    res.surplus_bits = Rational(0);

    for (const AirMessage& m : messages) {
        if (m.bits <= Rational(0)) throw InvalidParams("message with non-positive payload");
        if (m.group.size() < 2) throw InvalidParams("message group needs sender and receivers");
        if (!std::binary_search(m.group.begin(), m.group.end(), m.sender))
            throw InvalidParams("sender must belong to its group");
    }

    if (!layout) {
        sort_messages(messages);
        i64 cursor = 0;
        for (const AirMessage& m : messages) {
            i64 uses = ceil_div(m.bits, c_r).num();
            res.placed.push_back({m, cursor, uses, 0, -1});
            res.spans.push_back({Slot{{link_of(m)}}, cursor, uses, 0});
            res.surplus_bits += Rational(uses) * c_r - m.bits;
            cursor += uses;
        }
        res.t_s = cursor;
        audit_spans(net, p, res.spans);
        return res;
    }

    // Bucket messages by cluster; a coded group must fit inside one cluster
    // for a single intra-cluster transmission to cover it.
    std::map<int, std::vector<AirMessage>> per_cluster;
    for (AirMessage& m : messages) {
        int cid = layout->cluster_of[static_cast<size_t>(m.group.front() - 1)];
        for (int u : m.group) {
            if (layout->cluster_of[static_cast<size_t>(u - 1)] != cid)
                throw InfeasibleTransmission("group of sender " + std::to_string(m.sender) +
                                             " spans clusters " + std::to_string(cid) + " and " +
                                             std::to_string(
                                                 layout->cluster_of[static_cast<size_t>(u - 1)]));
        }
        per_cluster[cid].push_back(std::move(m));
    }

    // Local sequences first; the TDMA phase must fit the busiest cluster.
    struct Placed {
        AirMessage msg;
        i64 local_start;
        i64 uses;
        int cluster;
    };
    std::vector<Placed> staged;
    i64 phase = 0;
    for (auto& [cid, list] : per_cluster) {
        sort_messages(list);
        i64 cursor = 0;
        for (AirMessage& m : list) {
            i64 uses = ceil_div(m.bits, c_r).num();
            res.surplus_bits += Rational(uses) * c_r - m.bits;
            staged.push_back({std::move(m), cursor, uses, cid});
            cursor += uses;
        }
        phase = std::max(phase, cursor);
    }
    res.phase_len = phase;
    res.t_s = static_cast<i64>(layout->colors) * phase;

    for (Placed& pl : staged) {
        int color = layout->color_of[static_cast<size_t>(pl.cluster)];
        i64 start = static_cast<i64>(color - 1) * phase + pl.local_start;
        res.placed.push_back({std::move(pl.msg), start, pl.uses, color, pl.cluster});
    }
    std::stable_sort(res.placed.begin(), res.placed.end(),
                     [](const ScheduledMessage& a, const ScheduledMessage& b) {
                         return a.start < b.start;
                     });

    // Audit: inside each phase, cut time at every message boundary and check
    // each constant-link segment against the protocol model.
    for (int color = 1; color <= layout->colors; ++color) {
        std::vector<const ScheduledMessage*> active;
        std::set<i64> cuts;
        for (const ScheduledMessage& sm : res.placed) {
            if (sm.color != color) continue;
            active.push_back(&sm);
            cuts.insert(sm.start);
            cuts.insert(sm.start + sm.uses);
        }
        if (active.empty()) continue;
        std::vector<i64> edges(cuts.begin(), cuts.end());
        for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
            SlotSpan span;
            span.start = edges[i];
            span.len = edges[i + 1] - edges[i];
            span.color = color;
            for (const ScheduledMessage* sm : active)
                if (sm->start <= edges[i] && edges[i] < sm->start + sm->uses)
                    span.slot.links.push_back(link_of(sm->msg));
            if (!span.slot.links.empty()) res.spans.push_back(std::move(span));
        }
    }
    std::stable_sort(res.spans.begin(), res.spans.end(),
                     [](const SlotSpan& a, const SlotSpan& b) { return a.start < b.start; });
    audit_spans(net, p, res.spans);
    return res;
}

Rational throughput_measured(const SystemParams& p, i64 t_s) {
    if (t_s <= 0) throw ZeroSlots("no channel uses scheduled; throughput undefined");
    return Rational(p.F * p.Lp, t_s);
}

ClusteredDet clustered_det(const SystemParams& p, const Library& lib, const Demand& d,
                           const ClusterLayout& lay) {
    d.validate(p);
    if (lay.partial)
        throw InvalidParams("clustered delivery needs exact tiling (grid side divisible by the "
                            "cluster side); boundary clusters cannot cover the library");

    ClusteredDet run;
    for (std::size_t cid = 0; cid < lay.members.size(); ++cid) {
        ClusterRun cr;
        cr.members = lay.members[cid];
        cr.local = make_params(static_cast<int>(cr.members.size()), p.m, p.M, p.L, p.Lp, p.F, p.r,
                               p.delta, p.cr);
        cr.demand.files.reserve(cr.members.size());
        cr.demand.segments.reserve(cr.members.size());
        for (int g : cr.members) {
            cr.demand.files.push_back(d.files[static_cast<size_t>(g - 1)]);
            cr.demand.segments.push_back(d.segments[static_cast<size_t>(g - 1)]);
        }
        cr.caches = place_det_any(cr.local, lib);
        cr.txs = deliver_det(cr.local, cr.caches, cr.demand);

        for (const CodedTransmission& tx : cr.txs) {
            AirMessage m;
            m.sender = cr.members[static_cast<size_t>(tx.sender - 1)];
            m.round = tx.round;
            m.bits = tx.nominal_bits();
            m.group.reserve(tx.group.size());
            for (int lid : tx.group) m.group.push_back(cr.members[static_cast<size_t>(lid - 1)]);
            std::sort(m.group.begin(), m.group.end());
            run.messages.push_back(std::move(m));
        }
        run.clusters.push_back(std::move(cr));
    }
    return run;
}

}  // namespace d2d
