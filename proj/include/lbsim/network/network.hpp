// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "lbsim/dataplane/path_select.hpp"
#include "lbsim/engine/rng.hpp"
#include "lbsim/engine/simulator.hpp"
#include "lbsim/topology/fat_tree.hpp"
#include "lbsim/transport/flow.hpp"

namespace lbsim {

// How a switch picks among its equal-cost up ports.
enum class SwitchLb : std::uint8_t {
    Hash,        // ECMP on five-tuple + flow label
    RoundRobin,  // one shared counter per switch
    Adaptive,    // shortest queue, random ties
    Flowlet,     // adaptive, sticky while the flow's gaps stay short
    EcmpAr,      // hash, remap once at flow start if the hashed queue is long
};

struct NetworkConfig {
    SwitchLb switch_lb = SwitchLb::Hash;
    SimTime flowlet_gap = 10 * kPicosPerMicro;
    double ecmp_ar_remap = 0.5;
    bool pfc = false;
};

struct NetworkCounters {
    std::uint64_t data_sent = 0;
    std::uint64_t data_delivered = 0;
    std::uint64_t data_dropped = 0;
    std::uint64_t data_trimmed = 0;
    std::uint64_t data_wire_dropped = 0;
    std::uint64_t control_sent = 0;
    std::uint64_t control_delivered = 0;
    std::uint64_t control_dropped = 0;
    std::uint64_t control_wire_dropped = 0;
    std::uint64_t headers_bounced = 0;   // RTS headers re-routed toward their sender
    std::uint64_t pfc_frames = 0;
};

// Wires flows, hosts and switches of one fat-tree into the event loop.
class Network : public EventHandler, private TransportEnv {
public:
    enum Tag : std::uint32_t { kArrive = 1, kService, kPacer, kTimer, kTrimRtx, kPfc };

    Network(Simulator& sim, FatTree topo, const NetworkConfig& cfg, std::uint64_t seed);
    ~Network() override;

    Network(const Network&) = delete;
    Network& operator=(const Network&) = delete;

    // Flow ids must be dense, 0..n-1, in insertion order.
    void add_flow(const FlowParams& params, SimTime start);

    void handle_event(std::uint32_t tag, std::uint64_t arg) override;

    FatTree& topology() { return topo_; }
    const FatTree& topology() const { return topo_; }
    std::vector<Flow>& flows() { return flows_; }
    const std::vector<Flow>& flows() const { return flows_; }
    const NetworkCounters& counters() const { return counters_; }
    std::size_t live_packets() const { return pool_.size() - free_.size(); }
    std::uint64_t live_data_packets() const;
    std::vector<std::uint64_t> live_data_per_flow() const;
    std::uint64_t flowlet_reselections() const;
    std::uint64_t ecmp_ar_remaps() const;
    bool all_complete() const { return completed_ == flows_.size(); }
    std::size_t completed() const { return completed_; }

private:
    struct SwitchState {
        std::uint64_t salt = 0;
        RoundRobinSpray rr;
        std::unique_ptr<FlowletTable> flowlets;
        std::unique_ptr<EcmpArTable> ecmp_ar;
    };

    // TransportEnv
    SimTime now() const override { return sim_.now(); }
    void emit(const Packet& pkt) override;
    void wake_pacer(std::uint32_t flow, SimTime at) override;
    void arm_timer(std::uint32_t flow, std::uint16_t subflow, SimTime at) override;
    void schedule_trim_retransmit(std::uint32_t flow, std::uint16_t subflow, std::uint32_t seq, SimTime at) override;
    RngStream& label_rng() override { return label_rng_; }
    RngStream& desync_rng() override { return desync_rng_; }

    PacketRef alloc(const Packet& pkt);
    void release(PacketRef ref);

    void on_arrive(std::uint32_t link_id, PacketRef ref);
    void deliver(std::uint32_t host, PacketRef ref);
    void forward(std::uint32_t node, PacketRef ref);
    void send_on(std::uint32_t link_id, PacketRef ref);
    void try_serve(std::uint32_t link_id);
    void on_pacer(std::uint32_t flow);
    void pfc_signal(std::uint32_t ingress, PfcSignal sig);
    void packet_lost(const Packet& pkt, bool on_wire);

    std::uint32_t route(std::uint32_t node, const Packet& pkt);
    std::uint32_t choose_up(std::uint32_t node, const Packet& pkt, const std::uint32_t* links, std::uint32_t n);
    FiveTuple tuple_of(const Packet& pkt) const;

    Simulator& sim_;
    FatTree topo_;
    NetworkConfig cfg_;
    std::vector<Flow> flows_;
    std::vector<SimTime> pacer_at_;
    std::vector<SwitchState> switches_;   // indexed by node - num_hosts
    std::vector<Packet> pool_;
    std::vector<PacketRef> free_;
    RngStream tie_rng_;
    RngStream label_rng_;
    RngStream desync_rng_;
    NetworkCounters counters_;
    std::size_t completed_ = 0;
    std::vector<std::uint64_t> occ_scratch_;
};

} // namespace lbsim
