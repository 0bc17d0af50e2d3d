// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/dataplane/port_queue.hpp"

namespace lbsim {

void PacketFifo::grow() {
    std::size_t n = buf_.size();
    std::vector<Entry> next(n == 0 ? 16 : n * 2);
    for (std::size_t i = 0; i < n; ++i)
        next[i] = buf_[(head_ + i) & (n - 1)];
    buf_.swap(next);
    head_ = 0;
    tail_ = n;
}

EnqueueResult PortQueue::enqueue(Packet& pkt, PacketRef ref, SimTime now) {
    ++counters_.arrived;
    pkt.enqueue_time = now;
    if (is_control(pkt.kind)) {
        if (!cfg_.unbounded && control_occupancy(now) + pkt.size > cfg_.control_headroom_bytes) {
            ++counters_.dropped;
            return EnqueueResult::Dropped;
        }
        control_.push({ref, pkt.size});
        control_bytes_ += pkt.size;
        ++counters_.enqueued;
        return EnqueueResult::Enqueued;
    }

    std::uint64_t occ = data_occupancy(now);
    bool fits = cfg_.unbounded || cfg_.lossless || occ + pkt.size <= cfg_.capacity_bytes;
    if (!fits) {
        if (cfg_.trim_enabled) {
            ++counters_.trimmed;
            pkt.kind = PacketKind::TrimmedHeader;
            pkt.size = cfg_.header_bytes;
            if (cfg_.trim_bounce) {
                ++counters_.bounced;
                return EnqueueResult::Trimmed;
            }
            if (control_occupancy(now) + pkt.size > cfg_.control_headroom_bytes) {
                ++counters_.dropped;
                return EnqueueResult::TrimmedLost;
            }
            control_.push({ref, pkt.size});
            control_bytes_ += pkt.size;
            ++counters_.enqueued;
            return EnqueueResult::Trimmed;
        }
        ++counters_.dropped;
        return EnqueueResult::Dropped;
    }

    data_.push({ref, pkt.size});
    data_bytes_ += pkt.size;
    ++counters_.enqueued;
    if (!cfg_.unbounded && static_cast<double>(occ) >= cfg_.ecn_threshold * static_cast<double>(cfg_.capacity_bytes)) {
        pkt.set(pktflag::kEcn);
        ++counters_.ecn_marked;
        return EnqueueResult::EnqueuedMarked;
    }
    return EnqueueResult::Enqueued;
}

PacketFifo::Entry PortQueue::dequeue(SimTime now, SimTime tx_time) {
    PacketFifo::Entry e;
    if (!control_.empty()) {
        e = control_.pop();
        control_bytes_ -= e.size;
        in_service_is_data_ = false;
    } else {
        e = data_.pop();
        data_bytes_ -= e.size;
        in_service_is_data_ = true;
    }
    in_service_bytes_ = e.size;
    busy_until_ = now + tx_time;
    ++counters_.dequeued;
    return e;
}

} // namespace lbsim
