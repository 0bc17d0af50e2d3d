// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "lbsim/engine/simulator.hpp"

namespace lbsim {

class Network;

enum class RunStatus : std::uint8_t {
    Complete,
    Incomplete,  // time horizon reached with receivers still waiting
    Livelock,    // event cap tripped
    Failed,      // the run threw
};

std::string_view to_string(RunStatus s);

struct FlowStats {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint64_t sent = 0;
    std::uint64_t retransmits = 0;
    std::uint64_t spurious = 0;
    std::uint64_t delivered = 0;
    std::uint64_t dropped = 0;
    std::uint64_t trimmed = 0;
    std::uint64_t wire_dropped = 0;
    SimTime complete_time = -1;

    std::uint64_t lost() const { return dropped + trimmed + wire_dropped; }
    friend bool operator==(const FlowStats&, const FlowStats&) = default;
};

struct RunMetrics {
    std::uint64_t seed = 0;
    RunStatus status = RunStatus::Incomplete;
    SimTime cct = -1;
    SimTime ideal_cct = 0;
    double normalized_cct = 0.0;
    std::uint64_t worst_flow_drops = 0;
    std::uint64_t spurious_retx = 0;
    std::uint64_t spurious_fast = 0;     // dupACK-triggered retransmits of packets not lost
    std::uint64_t spurious_timeout = 0;
    std::uint64_t retransmits = 0;
    std::uint64_t fast_retransmits = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t data_sent = 0;
    std::uint64_t data_delivered = 0;
    std::uint64_t total_drops = 0;       // data lost to full queues or on the wire
    std::uint64_t congestive_drops = 0;
    std::uint64_t wire_drops = 0;
    std::uint64_t control_drops = 0;
    std::uint64_t trims = 0;
    std::uint64_t ecn_marks = 0;
    std::uint64_t pfc_pauses = 0;
    std::uint64_t repaths = 0;
    std::uint64_t flows = 0;
    std::uint64_t flows_completed = 0;
    std::uint64_t events = 0;
    SimTime end_time = 0;
    bool conservation_ok = false;
    std::string conservation_detail;
    std::vector<FlowStats> per_flow;
    double runtime_wall_ms = 0.0;  // not part of the outcome

    double mean_spurious_per_flow() const { return flows ? static_cast<double>(spurious_retx) / static_cast<double>(flows) : 0.0; }
    double mean_spurious_fast_per_flow() const { return flows ? static_cast<double>(spurious_fast) / static_cast<double>(flows) : 0.0; }
    // Equal in everything the simulation decides (wall time excluded).
    bool same_outcome(const RunMetrics& o) const;
};

// Time for one host to push its share of the collective through its access
// link: per-host data bytes / line rate. With payload_only the per-packet
// header bytes are left out of the numerator.
SimTime ideal_cct(std::uint64_t packets_per_host, std::uint32_t packet_bytes, std::uint32_t header_bytes,
                  double link_rate_bps, bool payload_only = false);

double normalized_cct(SimTime cct, SimTime ideal);

std::uint64_t worst_hit_flow(std::span<const FlowStats> flows);

// Exact integer identities: per flow, per port and network-wide. Returns an
// empty string when every identity holds, otherwise the first violation.
std::string audit_conservation(const Network& net);

// Snapshot of a finished (or aborted) run.
RunMetrics collect_metrics(const Network& net, std::uint64_t seed, RunStatus status, SimTime ideal,
                           std::uint64_t events, SimTime end_time);

struct AggregateStats {
    std::size_t n = 0;
    double mean = 0.0;
    double sd = 0.0;  // sample SD; 0 for a single run
    double min = 0.0;
    double max = 0.0;
};

AggregateStats aggregate(std::span<const double> values);

} // namespace lbsim
