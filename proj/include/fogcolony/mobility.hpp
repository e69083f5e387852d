#pragma once

#include "fogcolony/topology.hpp"

#include <cstdint>
#include <map>
#include <string>
#include <variant>
#include <vector>

namespace fogcolony {

/// One trace row: a position sample or a pre-resolved AP attachment.
struct TraceSample {
    double time = 0;
    std::string user_id;
    bool resolved = false; // true: ap_id carries the attachment, x/y unused
    double x = 0;
    double y = 0;
    std::string ap_id;
};

struct RawTrace {
    std::vector<TraceSample> samples; // sorted per user by time
};

struct HandoverEvent {
    double time = 0;
    std::string user_id;
    std::string from_ap;
    std::string to_ap;
};

/// Per-user AP attachment timeline plus the derived handover events.
struct MobilitySchedule {
    // (time, ap) steps per user, time-sorted; the attachment at time t is the
    // last step with step.time <= t.
    std::map<std::string, std::vector<std::pair<double, std::string>>> timeline;
    std::vector<HandoverEvent> handovers; // time-sorted

    /// Attachment of a user at a given time; empty before its first sample.
    std::string ap_at(const std::string& user_id, double time) const;
};

/// Reads a trace CSV. Accepted headers: `time,user_id,x_m,y_m` (positions)
/// or `time,user_id,ap_id` (pre-resolved). Malformed rows and per-user
/// non-monotone timestamps are reported with their line number.
RawTrace load_trace(const std::string& path);

void save_trace(const RawTrace& trace, const std::string& path);

/// AP minimising Euclidean distance to the position; ties break to the
/// smallest node id.
std::string nearest_ap(double x_m, double y_m, const Topology& topo);

/// Maps positions to nearest APs and derives handover events.
MobilitySchedule resolve_schedule(const RawTrace& trace, const Topology& topo);

struct SyntheticTraceParams {
    std::uint64_t seed = 0;
    int users = 0;
    double area_w = 0;
    double area_h = 0;
    int epochs = 1; // total sample epochs; moves may happen from epoch 1 on
    double epoch_period = 1;
    double move_prob = 0; // per user per epoch
};

/// Random-waypoint positions, one sample per user per epoch. A pure function
/// of its parameters: the same seed always yields the same trace.
RawTrace gen_synthetic_trace(const SyntheticTraceParams& params);

/// Handover events with t0 < time <= t1.
int handovers_between(const MobilitySchedule& schedule, double t0, double t1);

} // namespace fogcolony
