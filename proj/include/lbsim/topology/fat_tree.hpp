// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lbsim/dataplane/path_select.hpp"
#include "lbsim/dataplane/port_queue.hpp"
#include "lbsim/engine/rng.hpp"
#include "lbsim/engine/simulator.hpp"

namespace lbsim {

class TopologyError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class LinkRole : std::uint8_t { HostUp, TorDown, TorUp, AggDown, AggUp, CoreDown };

enum class FailureMode : std::uint8_t { None, Static, Flaky };

struct BurstInterval {
    SimTime start;
    SimTime end;
};

struct LinkFailureState {
    FailureMode mode = FailureMode::None;
    double frac_lost = 0.0;
    std::vector<BurstInterval> bursts;  // sorted, disjoint (overlapping bursts merged)
    std::uint64_t burst_arrivals = 0;   // Poisson arrivals before merging
    std::size_t cursor = 0;

    // Queries must come in nondecreasing time order (wire placements do).
    bool bursting(SimTime now) {
        while (cursor < bursts.size() && bursts[cursor].end <= now)
            ++cursor;
        return cursor < bursts.size() && bursts[cursor].start <= now;
    }
};

struct Link {
    std::uint32_t from = 0;
    std::uint32_t to = 0;
    std::uint32_t reverse = 0;
    LinkRole role = LinkRole::HostUp;
    std::uint64_t nominal_bps = 0;
    std::uint64_t effective_bps = 0;
    SimTime latency = 0;
    PortQueue queue;
    LinkFailureState failure;
    PfcState pfc;  // ingress accounting at `to`
    std::uint64_t delivered = 0;

    SimTime tx_time(std::uint32_t bytes) const {
        // ceil(bytes * 8 * 1e12 / bps)
        unsigned __int128 num = static_cast<unsigned __int128>(bytes) * 8ULL * 1'000'000'000'000ULL;
        return static_cast<SimTime>((num + effective_bps - 1) / effective_bps);
    }
};

struct LinkSpec {
    std::uint64_t rate_bps = 100'000'000'000ULL;
    SimTime latency = 1 * kPicosPerMicro;
    QueueConfig switch_queue;
};

// Three-tier k-ary fat-tree: k pods of k/2 ToRs and k/2 aggregation switches,
// (k/2)^2 cores, k^3/4 hosts. Node ids: hosts, then ToRs, aggs, cores.
class FatTree {
public:
    std::uint32_t k() const { return k_; }
    std::uint32_t half() const { return k_ / 2; }
    std::uint32_t num_hosts() const { return k_ * k_ * k_ / 4; }
    std::uint32_t num_tors() const { return k_ * k_ / 2; }
    std::uint32_t num_aggs() const { return k_ * k_ / 2; }
    std::uint32_t num_cores() const { return k_ * k_ / 4; }
    std::uint32_t num_pods() const { return k_; }
    std::uint32_t hosts_per_pod() const { return k_ * k_ / 4; }
    std::uint32_t uplinks_per_pod() const { return k_ * k_ / 4; }

    std::uint32_t tor_node(std::uint32_t t) const { return num_hosts() + t; }
    std::uint32_t agg_node(std::uint32_t a) const { return num_hosts() + num_tors() + a; }
    std::uint32_t core_node(std::uint32_t c) const { return num_hosts() + num_tors() + num_aggs() + c; }
    std::uint32_t num_nodes() const { return num_hosts() + num_tors() + num_aggs() + num_cores(); }

    std::uint32_t tor_of_host(std::uint32_t h) const { return h / half(); }
    std::uint32_t pod_of_host(std::uint32_t h) const { return h / hosts_per_pod(); }
    std::uint32_t pod_of_tor(std::uint32_t t) const { return t / half(); }
    std::uint32_t pod_of_agg(std::uint32_t a) const { return a / half(); }

    bool is_host(std::uint32_t node) const { return node < num_hosts(); }

    std::uint32_t host_up(std::uint32_t h) const { return host_up_[h]; }
    std::uint32_t tor_down(std::uint32_t t, std::uint32_t i) const { return tor_down_[t * half() + i]; }
    std::uint32_t tor_up(std::uint32_t t, std::uint32_t j) const { return tor_up_[t * half() + j]; }
    std::uint32_t agg_down(std::uint32_t a, std::uint32_t i) const { return agg_down_[a * half() + i]; }
    std::uint32_t agg_up(std::uint32_t a, std::uint32_t j) const { return agg_up_[a * half() + j]; }
    std::uint32_t core_down(std::uint32_t c, std::uint32_t pod) const { return core_down_[c * k_ + pod]; }

    // The pod-to-core links (agg up) of one pod, in a fixed order.
    std::vector<std::uint32_t> pod_uplinks(std::uint32_t pod) const;

    std::vector<Link>& links() { return links_; }
    const std::vector<Link>& links() const { return links_; }
    Link& link(std::uint32_t id) { return links_[id]; }
    const Link& link(std::uint32_t id) const { return links_[id]; }

    // Number of distinct up-paths between hosts in different pods: (k/2)^2.
    std::uint32_t inter_pod_paths() const { return half() * half(); }

private:
    friend FatTree build_fat_tree(std::uint32_t, const LinkSpec&, const QueueConfig&);
    std::uint32_t add_pair(std::uint32_t a, std::uint32_t b, LinkRole up_role, LinkRole down_role,
                           const LinkSpec& spec, const QueueConfig& a_side, const QueueConfig& b_side);

    std::uint32_t k_ = 0;
    std::vector<Link> links_;
    std::vector<std::uint32_t> host_up_, tor_down_, tor_up_, agg_down_, agg_up_, core_down_;
};

// k even and >= 4. Switch ports get spec.switch_queue; host NIC queues are
// unbounded (the host paces its own traffic).
FatTree build_fat_tree(std::uint32_t k, const LinkSpec& spec, const QueueConfig& host_nic);
FatTree build_fat_tree(std::uint32_t k, const LinkSpec& spec);

// Degrades f pod-to-core links per pod (both directions) to (1 - frac_lost)
// of nominal rate for the whole run.
void apply_static_failures(FatTree& ft, std::uint32_t links_per_pod, double frac_lost, RngStream& rng);

// Installs Poisson burst arrivals with exponential durations on
// links_per_pod pod-to-core links per pod, up to horizon. Packets placed on
// the wire during a burst are lost.
void schedule_flaky_failures(FatTree& ft, std::uint32_t links_per_pod, double arrival_mean_us,
                             double duration_mean_us, RngStream& rng, SimTime horizon);

// Whether an all-to-all stays bottlenecked on host links with f degraded
// uplinks per pod each losing fraction p of bandwidth.
bool check_capacity(std::uint32_t k, double f, double p);
// LHS - RHS of the same inequality (flows per host link minus flows per
// effective uplink); negative means insufficient.
double capacity_margin(std::uint32_t k, double f, double p);

} // namespace lbsim
