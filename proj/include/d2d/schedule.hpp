#pragma once

#include <vector>

#include "d2d/det_scheme.hpp"
#include "d2d/geometry.hpp"
#include "d2d/params.hpp"
#include "d2d/rand_scheme.hpp"
#include "d2d/rational.hpp"

namespace d2d {

// One over-the-air coded message, scheme-agnostic: the scheduler only needs
// who transmits, who must receive, and how many bits the payload holds.
struct AirMessage {
    int sender = 0;
    std::vector<int> group;  // sorted, includes the sender
    int round = 0;
    Rational bits;  // exact payload size in bits
};

std::vector<AirMessage> air_messages(const std::vector<CodedTransmission>& txs);
std::vector<AirMessage> air_messages(const std::vector<RandTransmission>& txs,
                                     const RandPlacement& pl);

// Where and when one message was placed on the air.
struct ScheduledMessage {
    AirMessage msg;
    i64 start = 0;    // first channel use (0-based)
    i64 uses = 0;     // ceil(bits / C_r)
    int color = 0;    // TDMA phase (0 without a layout)
    int cluster = -1;  // cluster index (-1 without a layout)
};

// A maximal run of channel uses during which the set of active links is
// constant; these are the units the protocol-model checker audits.
struct SlotSpan {
    Slot slot;
    i64 start = 0;
    i64 len = 0;
    int color = 0;
};

struct ScheduleResult {
    i64 t_s = 0;        // total channel uses
    i64 phase_len = 0;  // with layout: per-phase length P, t_s = colors * P
    Rational surplus_bits;  // integer-rounding overhead: sum(uses * C_r - bits)
    std::vector<ScheduledMessage> placed;
    std::vector<SlotSpan> spans;
};

// Serializes messages onto the channel. Without a layout every message gets
// its own consecutive block of ceil(bits/C_r) uses (natural for r^2 >= 2).
// With a layout, same-color clusters run their local sequences concurrently
// inside fixed TDMA phases of length P = max intra-cluster uses, so
// t_s = colors * P. Messages within a cluster (or the flat sequence) are
// ordered by (round, group, sender). Every emitted span is verified against
// the protocol model; a violation or a group spanning two clusters throws
// InfeasibleTransmission.
ScheduleResult schedule(const SystemParams& p, std::vector<AirMessage> messages,
                        const ClusterLayout* layout = nullptr);

// Useful bits per channel use per node: F*Lp / t_s. Throws ZeroSlots.
Rational throughput_measured(const SystemParams& p, i64 t_s);

// The clustered deterministic run: every cluster independently executes
// placement and coded delivery over its own members (local node ids 1..gc),
// all against the same library. Kept per cluster so decode can be verified
// locally; `messages` carries the same transmissions with global node ids,
// ready for schedule().
struct ClusterRun {
    std::vector<int> members;  // ascending global node ids
    SystemParams local;        // n = gc copy of the parameters
    Demand demand;             // global demand restricted to the members
    DetCaches caches;
    std::vector<CodedTransmission> txs;
};

struct ClusteredDet {
    std::vector<ClusterRun> clusters;
    std::vector<AirMessage> messages;
};

ClusteredDet clustered_det(const SystemParams& p, const Library& lib, const Demand& d,
                           const ClusterLayout& lay);

}  // namespace d2d
