// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/engine/simulator.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <stdexcept>
#include <utility>

namespace lbsim {

EventQueue::EventQueue() : ring_(kRing), occupied_(kRing / 64, 0) {}

void EventQueue::ring_insert(std::int64_t b, const Event& e) {
    const auto slot = static_cast<std::size_t>(b & kRingMask);
    ring_[slot].push_back(e);
    occupied_[slot >> 6] |= std::uint64_t{1} << (slot & 63);
    ++ring_count_;
}

void EventQueue::push(const Event& e) {
    ++size_;
    const std::int64_t b = bucket_of(e.fire_time);
    if (b <= cur_) {
        // Lands in the bucket being drained (or before it after an idle jump).
        auto it = std::upper_bound(active_.begin() + static_cast<std::ptrdiff_t>(head_), active_.end(), e, before);
        active_.insert(it, e);
    } else if (b < cur_ + kRing) {
        ring_insert(b, e);
    } else {
        far_.push_back(e);
        std::push_heap(far_.begin(), far_.end(), after);
    }
}

void EventQueue::advance() {
    active_.clear();
    head_ = 0;
    std::int64_t next = std::numeric_limits<std::int64_t>::max();
    if (ring_count_ > 0) {
        // First occupied slot strictly after cur_, scanning the ring once.
        const std::int64_t start = cur_ + 1;
        for (std::int64_t off = 0; off < kRing;) {
            const std::int64_t abs = start + off;
            const auto slot = static_cast<std::size_t>(abs & kRingMask);
            const std::uint64_t word = occupied_[slot >> 6] >> (slot & 63);
            if (word) {
                next = abs + std::countr_zero(word);
                break;
            }
            off += 64 - static_cast<std::int64_t>(slot & 63);
        }
    }
    if (!far_.empty())
        next = std::min(next, bucket_of(far_.front().fire_time));
    cur_ = next;
    const auto slot = static_cast<std::size_t>(cur_ & kRingMask);
    if (ring_count_ > 0 && (occupied_[slot >> 6] >> (slot & 63) & 1)) {
        active_.swap(ring_[slot]);
        occupied_[slot >> 6] &= ~(std::uint64_t{1} << (slot & 63));
        ring_count_ -= active_.size();
    }
    // Pull in far events the ring now covers.
    while (!far_.empty() && bucket_of(far_.front().fire_time) < cur_ + kRing) {
        std::pop_heap(far_.begin(), far_.end(), after);
        const Event e = far_.back();
        far_.pop_back();
        const std::int64_t b = bucket_of(e.fire_time);
        if (b == cur_)
            active_.push_back(e);
        else
            ring_insert(b, e);
    }
    std::sort(active_.begin(), active_.end(), before);
}

void EventQueue::clear() {
    for (auto& b : ring_)
        b.clear();
    std::fill(occupied_.begin(), occupied_.end(), 0);
    active_.clear();
    far_.clear();
    head_ = 0;
    cur_ = 0;
    ring_count_ = 0;
    size_ = 0;
}

EventHandle Simulator::schedule(SimTime fire_time, EventHandler& target, std::uint32_t tag,
                                std::uint64_t arg) {
    if (fire_time < clock_)
        throw PastEventError("event scheduled at " + std::to_string(fire_time) +
                             "ps before clock " + std::to_string(clock_) + "ps");
    std::uint64_t seq = next_seq_++;
    queue_.push(Event{fire_time, seq, &target, arg, tag});
    return EventHandle{seq};
}

void Simulator::cancel(EventHandle h) {
    if (h.valid())
        cancelled_.insert(h.seq);
}

SimTime Simulator::run_until_idle(SimTime limit) {
    while (!queue_.empty()) {
        if (queue_.top_time() > limit) {
            clock_ = limit;
            return clock_;
        }
        Event e = queue_.pop();
        if (!cancelled_.empty() && cancelled_.erase(e.tiebreak_seq))
            continue;
        clock_ = e.fire_time;
        if (++processed_ > event_cap_)
            throw LivelockError(processed_, clock_);
        e.target->handle_event(e.tag, e.arg);
    }
    return clock_;
}

} // namespace lbsim
