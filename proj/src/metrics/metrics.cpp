// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/metrics/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "lbsim/network/network.hpp"

namespace lbsim {

std::string_view to_string(RunStatus s) {
    switch (s) {
    case RunStatus::Complete: return "complete";
    case RunStatus::Incomplete: return "incomplete";
    case RunStatus::Livelock: return "livelock";
    case RunStatus::Failed: return "failed";
    }
    return "?";
}

bool RunMetrics::same_outcome(const RunMetrics& o) const {
    return seed == o.seed && status == o.status && cct == o.cct && ideal_cct == o.ideal_cct &&
           normalized_cct == o.normalized_cct && worst_flow_drops == o.worst_flow_drops &&
           spurious_retx == o.spurious_retx && spurious_fast == o.spurious_fast &&
           spurious_timeout == o.spurious_timeout && retransmits == o.retransmits &&
           fast_retransmits == o.fast_retransmits && timeouts == o.timeouts && data_sent == o.data_sent &&
           data_delivered == o.data_delivered && total_drops == o.total_drops &&
           congestive_drops == o.congestive_drops && wire_drops == o.wire_drops &&
           control_drops == o.control_drops && trims == o.trims && ecn_marks == o.ecn_marks &&
           pfc_pauses == o.pfc_pauses && repaths == o.repaths && flows == o.flows &&
           flows_completed == o.flows_completed && events == o.events && end_time == o.end_time &&
           conservation_ok == o.conservation_ok && per_flow == o.per_flow;
}

SimTime ideal_cct(std::uint64_t packets_per_host, std::uint32_t packet_bytes, std::uint32_t header_bytes,
                  double link_rate_bps, bool payload_only) {
    if (link_rate_bps <= 0.0)
        throw std::invalid_argument("link rate must be positive");
    std::uint32_t per_pkt = payload_only ? packet_bytes - std::min(header_bytes, packet_bytes) : packet_bytes;
    long double bits = static_cast<long double>(packets_per_host) * per_pkt * 8.0L;
    return static_cast<SimTime>(std::llround(bits * 1e12L / static_cast<long double>(link_rate_bps)));
}

double normalized_cct(SimTime cct, SimTime ideal) {
    if (ideal <= 0 || cct < 0)
        return 0.0;
    return static_cast<double>(cct) / static_cast<double>(ideal);
}

std::uint64_t worst_hit_flow(std::span<const FlowStats> flows) {
    std::uint64_t worst = 0;
    for (const auto& f : flows)
        worst = std::max(worst, f.lost());
    return worst;
}

std::string audit_conservation(const Network& net) {
    const auto live = net.live_data_per_flow();
    const auto& flows = net.flows();
    for (std::size_t i = 0; i < flows.size(); ++i) {
        const FlowCounters& c = flows[i].counters();
        if (c.sent != c.delivered + c.dropped + c.trimmed + c.wire_dropped + live[i])
            return "flow " + std::to_string(i) + ": sent " + std::to_string(c.sent) + " != delivered " +
                   std::to_string(c.delivered) + " + dropped " + std::to_string(c.dropped) + " + trimmed " +
                   std::to_string(c.trimmed) + " + wire " + std::to_string(c.wire_dropped) + " + in network " +
                   std::to_string(live[i]);
    }
    const auto& links = net.topology().links();
    for (std::size_t i = 0; i < links.size(); ++i) {
        const QueueCounters& q = links[i].queue.counters();
        if (q.arrived != q.enqueued + q.dropped + q.bounced)
            return "link " + std::to_string(i) + ": arrived != enqueued + dropped + bounced";
        if (q.enqueued != q.dequeued + links[i].queue.residual_packets())
            return "link " + std::to_string(i) + ": enqueued != dequeued + residual";
    }
    const NetworkCounters& n = net.counters();
    std::uint64_t live_total = 0;
    for (auto v : live)
        live_total += v;
    if (n.data_sent != n.data_delivered + n.data_dropped + n.data_trimmed + n.data_wire_dropped + live_total)
        return "network: data sent != delivered + dropped + trimmed + wire + in network";
    return {};
}

RunMetrics collect_metrics(const Network& net, std::uint64_t seed, RunStatus status, SimTime ideal,
                           std::uint64_t events, SimTime end_time) {
    RunMetrics m;
    m.seed = seed;
    m.status = status;
    m.ideal_cct = ideal;
    m.events = events;
    m.end_time = end_time;
    const auto& flows = net.flows();
    m.flows = flows.size();
    m.per_flow.reserve(flows.size());
    SimTime cct = 0;
    for (const Flow& f : flows) {
        const FlowCounters& c = f.counters();
        FlowStats s;
        s.src = f.params().src;
        s.dst = f.params().dst;
        s.sent = c.sent;
        s.retransmits = c.retransmits;
        s.spurious = c.spurious;
        s.delivered = c.delivered;
        s.dropped = c.dropped;
        s.trimmed = c.trimmed;
        s.wire_dropped = c.wire_dropped;
        s.complete_time = f.complete_time();
        m.per_flow.push_back(s);
        m.spurious_retx += c.spurious;
        m.spurious_fast += c.spurious_fast;
        m.spurious_timeout += c.spurious_timeout;
        m.retransmits += c.retransmits;
        m.fast_retransmits += c.fast_retransmits;
        m.timeouts += c.timeouts;
        m.repaths += c.repaths;
        if (f.complete()) {
            ++m.flows_completed;
            cct = std::max(cct, f.complete_time());
        }
    }
    const NetworkCounters& n = net.counters();
    m.data_sent = n.data_sent;
    m.data_delivered = n.data_delivered;
    m.congestive_drops = n.data_dropped;
    m.wire_drops = n.data_wire_dropped;
    m.total_drops = n.data_dropped + n.data_wire_dropped;
    m.control_drops = n.control_dropped + n.control_wire_dropped;
    m.trims = n.data_trimmed;
    for (const Link& l : net.topology().links()) {
        m.ecn_marks += l.queue.counters().ecn_marked;
        m.pfc_pauses += l.queue.counters().pfc_pauses;
    }
    m.worst_flow_drops = worst_hit_flow(m.per_flow);
    if (m.flows_completed == m.flows) {
        m.cct = cct;
        m.normalized_cct = normalized_cct(cct, ideal);
    }
    m.conservation_detail = audit_conservation(net);
    m.conservation_ok = m.conservation_detail.empty();
    return m;
}

AggregateStats aggregate(std::span<const double> values) {
    if (values.empty())
        throw std::invalid_argument("aggregate needs at least one run");
    AggregateStats a;
    a.n = values.size();
    a.min = *std::min_element(values.begin(), values.end());
    a.max = *std::max_element(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values)
        sum += v;
    a.mean = sum / static_cast<double>(a.n);
    if (a.n > 1) {
        double ss = 0.0;
        for (double v : values)
            ss += (v - a.mean) * (v - a.mean);
        a.sd = std::sqrt(ss / static_cast<double>(a.n - 1));
    }
    // Guard rounding at the edges.
    a.mean = std::clamp(a.mean, a.min, a.max);
    return a;
}

} // namespace lbsim
