// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "lbsim/engine/rng.hpp"
#include "lbsim/engine/simulator.hpp"
#include "lbsim/transport/packet.hpp"
#include "lbsim/transport/recovery.hpp"

namespace lbsim {

// What a flow needs from the host/network around it.
class TransportEnv {
public:
    virtual ~TransportEnv() = default;
    virtual SimTime now() const = 0;
    // Hand a packet to the local host NIC (sender side for DATA, receiver
    // side for ACK/NACK).
    virtual void emit(const Packet& pkt) = 0;
    virtual void wake_pacer(std::uint32_t flow, SimTime at) = 0;
    virtual void arm_timer(std::uint32_t flow, std::uint16_t subflow, SimTime at) = 0;
    virtual void schedule_trim_retransmit(std::uint32_t flow, std::uint16_t subflow, std::uint32_t seq,
                                          SimTime at) = 0;
    virtual RngStream& label_rng() = 0;
    virtual RngStream& desync_rng() = 0;
};

enum class RetxCause : std::uint8_t { None = 0, FastRetransmit, Timeout, Nack, Trim };

struct FlowParams {
    std::uint32_t id = 0;
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t message_packets = 500;
    std::uint32_t subflows = 1;
    std::uint32_t packet_bytes = 4096;
    std::uint32_t header_bytes = 64;
    SimTime send_interval = 0;  // packet_bytes / pacing rate
    RecoveryScheme scheme;
    LabelPolicy label_policy = LabelPolicy::Ecmp;
    PlbConfig plb;
};

struct FlowCounters {
    std::uint64_t sent = 0;          // DATA packets handed to the NIC
    std::uint64_t retransmits = 0;
    std::uint64_t spurious = 0;
    std::uint64_t spurious_fast = 0; // dupACK-triggered and spurious
    std::uint64_t spurious_timeout = 0;
    std::uint64_t fast_retransmits = 0;
    std::uint64_t timeouts = 0;
    std::uint64_t nacks = 0;
    std::uint64_t trim_signals = 0;
    std::uint64_t repaths = 0;
    std::uint64_t delivered = 0;     // DATA arrivals at the receiver host
    std::uint64_t dropped = 0;       // DATA refused by a full queue
    std::uint64_t trimmed = 0;
    std::uint64_t wire_dropped = 0;
    std::uint64_t discarded = 0;     // out-of-order DATA thrown away by an in-order receiver

    std::uint64_t lost() const { return dropped + trimmed + wire_dropped; }
};

struct SubflowSender {
    std::uint32_t count = 0;         // packets carried by this subflow
    std::uint32_t next_new = 0;      // next sequence to send (rewound by go-back-N)
    std::uint32_t high_water = 0;    // one past the highest sequence ever sent
    std::uint32_t cum_ack = 0;
    std::vector<std::uint32_t> top_reported;  // highest `dupack_threshold` reported sequences, ascending
    std::uint32_t loss_scan = 0;      // holes below this were already judged
    std::uint32_t epoch = 0;
    std::uint32_t last_rewind = 0xffffffffu;
    std::deque<std::uint32_t> rtx;
    // bit 0 acked, bit 1 queued, bit 2 reported by the receiver, bit 3
    // already retransmitted for loss; cause in bits 4..7
    std::vector<std::uint8_t> status;
    std::vector<std::uint16_t> inflight;
    std::vector<SimTime> sent_at;       // trimming only
    SimTime next_allowed = 0;
    SimTime rto_deadline = -1;          // -1: disarmed
    std::uint32_t backoff = 0;
    SimTime timer_at = -1;              // fire time of the live timer event

    bool acked(std::uint32_t s) const { return status[s] & 1; }
    bool reported(std::uint32_t s) const { return status[s] & 4; }
    bool queued(std::uint32_t s) const { return status[s] & 2; }
    bool has_work() const { return !rtx.empty() || next_new < count; }
    bool outstanding() const { return cum_ack < high_water; }
};

struct SubflowReceiver {
    std::vector<std::uint8_t> received;
    std::uint32_t count = 0;
    std::uint32_t cum = 0;              // next in-order sequence expected
    std::uint32_t unique = 0;
    std::uint32_t last_nack_expected = 0xffffffffu;
    std::uint32_t last_nack_epoch = 0;
};

// Sender and receiver state of one flow. Holding both in one object lets the
// simulator check spuriousness omnisciently; no protocol decision reads the
// receiver state from the sender side.
class Flow {
public:
    explicit Flow(const FlowParams& params);

    const FlowParams& params() const { return p_; }
    std::uint32_t id() const { return p_.id; }

    // ---- sender ----
    bool sender_done() const { return sender_done_; }
    bool has_work(SimTime now) const;
    // Emits exactly one DATA packet; returns the time of the next send, or
    // nullopt when the flow has nothing left to send right now.
    std::optional<SimTime> pace_and_send(TransportEnv& env);
    std::uint32_t host_label(std::uint16_t subflow);
    bool plb_maybe_repath(bool ecn_echo, RngStream& rng);
    void on_control(TransportEnv& env, const Packet& pkt);
    // `reported` is the data sequence that triggered the ACK. A hole counts
    // as lost once dupack_threshold sequences above it have been reported;
    // with a single hole that is plain duplicate-ACK counting.
    void on_ack_tcp(TransportEnv& env, std::uint16_t sub, std::uint32_t cum, std::uint32_t reported);
    void on_timer(TransportEnv& env, std::uint16_t sub);
    void on_timeout(TransportEnv& env, std::uint16_t sub);
    void on_nack_roce(TransportEnv& env, std::uint16_t sub, std::uint32_t nack_seq, std::uint32_t epoch);
    void on_trim_signal(TransportEnv& env, std::uint16_t sub, std::uint32_t seq);
    void on_trim_retransmit(TransportEnv& env, std::uint16_t sub, std::uint32_t seq);

    // ---- receiver ----
    // Returns the control packet the receiver sends back, if any.
    std::optional<Packet> on_data(TransportEnv& env, const Packet& pkt);
    std::optional<Packet> on_trimmed_header(TransportEnv& env, const Packet& hdr);
    bool complete() const { return complete_time_ >= 0; }
    SimTime complete_time() const { return complete_time_; }
    std::uint32_t completion_target() const { return completion_target_; }
    std::uint64_t symbols_received() const { return symbols_received_; }
    bool receiver_has(std::uint16_t sub, std::uint32_t seq) const;

    // ---- network oracle ----
    void note_data_gone(const Packet& pkt);  // delivered, dropped, trimmed or lost on the wire

    FlowCounters& counters() { return counters_; }
    const FlowCounters& counters() const { return counters_; }
    SimTime min_send_gap() const { return min_gap_; }
    std::uint32_t current_label() const { return label_; }
    const SubflowSender& subflow_tx(std::uint16_t s) const { return tx_[s]; }
    const SubflowReceiver& subflow_rx(std::uint16_t s) const { return rx_[s]; }
    std::uint32_t subflow_count() const { return static_cast<std::uint32_t>(tx_.size()); }

private:
    void queue_retransmit(TransportEnv& env, std::uint16_t sub, std::uint32_t seq, RetxCause cause);
    void arm_rto(TransportEnv& env, std::uint16_t sub, SimTime deadline);
    void progress(TransportEnv& env, std::uint16_t sub);
    void check_sender_done();
    SimTime current_rto(const SubflowSender& s) const;
    Packet make_control(PacketKind kind, const Packet& trigger) const;
    std::optional<Packet> on_data_coding(TransportEnv& env, const Packet& pkt);
    std::optional<Packet> on_data_sequence(TransportEnv& env, const Packet& pkt);
    std::optional<Packet> on_data_roce(TransportEnv& env, const Packet& pkt);

    FlowParams p_;
    std::vector<SubflowSender> tx_;
    std::vector<SubflowReceiver> rx_;
    std::uint32_t rr_cursor_ = 0;
    SimTime next_send_time_ = 0;
    SimTime last_send_time_ = -1;
    SimTime min_gap_ = -1;
    bool sender_done_ = false;

    // coding
    std::uint64_t symbols_sent_ = 0;
    std::uint64_t symbols_received_ = 0;
    std::uint32_t completion_target_ = 0;
    SimTime complete_time_ = -1;

    // labels
    std::uint32_t label_ = 0;
    std::uint32_t label_counter_ = 0;
    std::uint32_t plb_acked_ = 0;
    std::uint32_t plb_marked_ = 0;

    FlowCounters counters_;
};

} // namespace lbsim
