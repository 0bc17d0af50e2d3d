// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <limits>
#include <vector>

#include "lbsim/engine/simulator.hpp"
#include "lbsim/transport/packet.hpp"

namespace lbsim {

// Growable power-of-two ring of (packet, size) entries.
class PacketFifo {
public:
    struct Entry {
        PacketRef pkt;
        std::uint32_t size;
    };

    bool empty() const { return head_ == tail_; }
    std::size_t size() const { return tail_ - head_; }
    void push(Entry e) {
        if (tail_ - head_ == buf_.size())
            grow();
        buf_[tail_++ & (buf_.size() - 1)] = e;
    }
    Entry front() const { return buf_[head_ & (buf_.size() - 1)]; }
    Entry pop() { return buf_[head_++ & (buf_.size() - 1)]; }

private:
    void grow();
    std::vector<Entry> buf_;
    std::size_t head_ = 0;
    std::size_t tail_ = 0;
};

enum class EnqueueResult : std::uint8_t {
    Enqueued,
    EnqueuedMarked,
    Trimmed,      // header queued at high priority (or bounced, see trim_bounce)
    TrimmedLost,  // trimmed, then the header found no control headroom
    Dropped,
};

struct QueueCounters {
    std::uint64_t arrived = 0;      // every packet offered to enqueue()
    std::uint64_t enqueued = 0;     // accepted into either fifo (trimmed headers included)
    std::uint64_t dequeued = 0;
    std::uint64_t dropped = 0;      // data or control refused at enqueue
    std::uint64_t trimmed = 0;
    std::uint64_t ecn_marked = 0;
    std::uint64_t wire_dropped = 0; // lost on a flaky link after dequeue
    std::uint64_t pfc_pauses = 0;   // pause frames received for this port
    std::uint64_t bounced = 0;      // trimmed headers handed back to the caller
};

struct QueueConfig {
    std::uint64_t capacity_bytes = 32 * 1024;
    std::uint64_t control_headroom_bytes = 4 * 1024;
    double ecn_threshold = 0.6;
    std::uint32_t header_bytes = 64;
    bool trim_enabled = false;
    // Return-to-sender: a trimmed header is not queued here; the caller
    // routes it back toward the source.
    bool trim_bounce = false;
    bool lossless = false;   // PFC fabric: data is never refused at this port
    bool unbounded = false;  // host NIC: neither fifo ever refuses
};

// One egress port. Control packets (ACK/NACK/trimmed headers) sit in a
// strict-priority fifo with their own small headroom so they never eat data
// capacity. Occupancy counts the packet being serialized until it leaves.
class PortQueue {
public:
    PortQueue() = default;
    explicit PortQueue(const QueueConfig& cfg) : cfg_(cfg) {}

    const QueueConfig& config() const { return cfg_; }
    QueueConfig& config() { return cfg_; }

    // On Trimmed the packet is rewritten in place into its header.
    // Per port: arrived = enqueued + dropped + bounced, and
    // enqueued = dequeued + residual.
    EnqueueResult enqueue(Packet& pkt, PacketRef ref, SimTime now);

    std::uint64_t data_occupancy(SimTime now) const {
        return data_bytes_ + (now < busy_until_ && in_service_is_data_ ? in_service_bytes_ : 0);
    }
    std::uint64_t control_occupancy(SimTime now) const {
        return control_bytes_ + (now < busy_until_ && !in_service_is_data_ ? in_service_bytes_ : 0);
    }
    std::uint64_t occupancy(SimTime now) const { return data_occupancy(now) + control_occupancy(now); }

    bool busy(SimTime now) const { return now < busy_until_; }
    SimTime busy_until() const { return busy_until_; }

    // Whether dequeue() would return something, honoring a PFC pause on data.
    bool has_servable() const { return !control_.empty() || (!paused_ && !data_.empty()); }
    bool empty() const { return control_.empty() && data_.empty(); }
    std::size_t queued_packets() const { return control_.size() + data_.size(); }

    // The entry dequeue() would return; has_servable() must hold.
    PacketFifo::Entry peek() const { return control_.empty() ? data_.front() : control_.front(); }
    // Pops the next packet (control first) and marks the port busy until
    // now + tx_time.
    PacketFifo::Entry dequeue(SimTime now, SimTime tx_time);

    bool paused() const { return paused_; }
    void set_paused(bool p) {
        if (p && !paused_)
            ++counters_.pfc_pauses;
        paused_ = p;
    }

    bool service_scheduled = false;

    QueueCounters& counters() { return counters_; }
    const QueueCounters& counters() const { return counters_; }
    std::uint64_t residual_packets() const { return control_.size() + data_.size(); }

private:
    QueueConfig cfg_;
    PacketFifo data_;
    PacketFifo control_;
    std::uint64_t data_bytes_ = 0;
    std::uint64_t control_bytes_ = 0;
    std::uint64_t in_service_bytes_ = 0;
    bool in_service_is_data_ = false;
    SimTime busy_until_ = 0;
    bool paused_ = false;
    QueueCounters counters_;
};

} // namespace lbsim
