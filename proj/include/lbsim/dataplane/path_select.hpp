// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <span>
#include <unordered_map>

#include "lbsim/engine/rng.hpp"
#include "lbsim/engine/simulator.hpp"

namespace lbsim {

struct FiveTuple {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint16_t src_port = 0;
    std::uint16_t dst_port = 0;
    std::uint8_t proto = 17;

    std::uint64_t fingerprint() const;
};

// Keyed 64-bit mix of (five-tuple, label, per-switch salt).
std::uint64_t ecmp_hash(const FiveTuple& key, std::uint32_t flow_label, std::uint64_t switch_salt);

std::uint32_t ecmp_select(const FiveTuple& key, std::uint32_t flow_label, std::uint64_t switch_salt,
                          std::uint32_t n_ports);

// In-switch round robin, one counter per output set shared by all flows.
class RoundRobinSpray {
public:
    // Switches do not power up in lockstep; `start` sets the phase.
    explicit RoundRobinSpray(std::uint32_t start = 0) : next_(start) {}

    std::uint32_t select(std::uint32_t n_ports) {
        std::uint32_t p = next_ % n_ports;
        next_ = p + 1;
        return p;
    }

private:
    std::uint32_t next_ = 0;
};

// Index of a minimum-occupancy queue; ties broken uniformly.
std::uint32_t adaptive_spray_select(std::span<const std::uint64_t> occupancies, RngStream& rng);

class FlowletTable {
public:
    explicit FlowletTable(SimTime gap_threshold) : gap_(gap_threshold) {}

    // Reuse the flow's port while packets keep arriving within the gap
    // (boundary inclusive); otherwise pick the shortest queue.
    std::uint32_t select(std::uint64_t flow, SimTime now, std::span<const std::uint64_t> occupancies,
                         RngStream& rng);

    SimTime gap_threshold() const { return gap_; }
    std::size_t size() const { return entries_.size(); }
    std::uint64_t reselections() const { return reselections_; }

private:
    struct Entry {
        SimTime last_packet_time;
        std::uint32_t port;
    };
    SimTime gap_;
    std::unordered_map<std::uint64_t, Entry> entries_;
    std::uint64_t reselections_ = 0;
};

class EcmpArTable {
public:
    explicit EcmpArTable(double remap_fraction) : remap_fraction_(remap_fraction) {}

    // First packet of a flow hashes; if that port's occupancy is above
    // remap_fraction * capacity the flow moves to a shortest queue. Either
    // way the choice is pinned for the flow's lifetime.
    std::uint32_t select(std::uint64_t flow, const FiveTuple& key, std::uint32_t flow_label,
                         std::uint64_t switch_salt, std::span<const std::uint64_t> occupancies,
                         std::uint64_t capacity_bytes, RngStream& rng);

    std::uint64_t remapped() const { return remapped_; }
    std::size_t size() const { return pinned_.size(); }

private:
    double remap_fraction_;
    std::unordered_map<std::uint64_t, std::uint32_t> pinned_;
    std::uint64_t remapped_ = 0;
};

enum class PfcSignal : std::uint8_t { NoChange, Pause, Resume };

// Per-ingress PFC accounting: bytes buffered at this switch that arrived on
// one link. Pause at the threshold, resume one packet below it.
struct PfcState {
    std::uint64_t pause_threshold = 32 * 1024;
    std::uint64_t resume_threshold = 28 * 1024;
    std::uint64_t buffered = 0;
    bool paused = false;
};

PfcSignal pfc_update(PfcState& state);

} // namespace lbsim
