// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_set>
#include <vector>

namespace lbsim {

// Virtual time in integer picoseconds. 4 KB at 100 Gbps is 327680 ps exactly.
using SimTime = std::int64_t;

constexpr SimTime kPicosPerNano = 1000;
constexpr SimTime kPicosPerMicro = 1000 * kPicosPerNano;
constexpr SimTime kPicosPerMilli = 1000 * kPicosPerMicro;

constexpr SimTime from_ns(double ns) { return static_cast<SimTime>(ns * kPicosPerNano + 0.5); }
constexpr SimTime from_us(double us) { return static_cast<SimTime>(us * kPicosPerMicro + 0.5); }
constexpr double to_ns(SimTime t) { return static_cast<double>(t) / kPicosPerNano; }
constexpr double to_us(SimTime t) { return static_cast<double>(t) / kPicosPerMicro; }
constexpr double to_ms(SimTime t) { return static_cast<double>(t) / kPicosPerMilli; }

class EventHandler {
public:
    virtual ~EventHandler() = default;
    virtual void handle_event(std::uint32_t tag, std::uint64_t arg) = 0;
};

struct EventHandle {
    std::uint64_t seq = 0;
    bool valid() const { return seq != 0; }
};

// Scheduling in the past is a simulator logic bug, not a runtime condition.
class PastEventError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

class LivelockError : public std::runtime_error {
public:
    LivelockError(std::uint64_t processed, SimTime clock)
        : std::runtime_error("event cap exceeded after " + std::to_string(processed) +
                             " events at t=" + std::to_string(clock) + "ps"),
          events_processed(processed), clock_at_abort(clock) {}
    std::uint64_t events_processed;
    SimTime clock_at_abort;
};

struct Event {
    SimTime fire_time;
    std::uint64_t tiebreak_seq;
    EventHandler* target;
    std::uint64_t arg;
    std::uint32_t tag;
};

// Calendar queue ordered on (fire_time, tiebreak_seq). Events within the
// ring span go into fixed-width buckets; the bucket being drained is kept
// sorted. Anything further out waits in a heap until the ring reaches it.
class EventQueue {
public:
    EventQueue();
    bool empty() const { return size_ == 0; }
    std::size_t size() const { return size_; }
    // Both require !empty().
    SimTime top_time() {
        if (head_ == active_.size())
            advance();
        return active_[head_].fire_time;
    }
    Event pop() {
        if (head_ == active_.size())
            advance();
        --size_;
        return active_[head_++];
    }
    void push(const Event& e);
    void clear();

private:
    static constexpr unsigned kWidthBits = 13;   // 8.192 ns per bucket
    static constexpr unsigned kRingBits = 18;    // ~2.1 ms of lookahead
    static constexpr std::int64_t kRing = std::int64_t{1} << kRingBits;
    static constexpr std::int64_t kRingMask = kRing - 1;

    static bool before(const Event& a, const Event& b) {
        return a.fire_time < b.fire_time || (a.fire_time == b.fire_time && a.tiebreak_seq < b.tiebreak_seq);
    }
    static bool after(const Event& a, const Event& b) { return before(b, a); }
    static std::int64_t bucket_of(SimTime t) { return t >> kWidthBits; }

    void ring_insert(std::int64_t b, const Event& e);
    void advance();

    std::vector<std::vector<Event>> ring_;
    std::vector<std::uint64_t> occupied_;   // one bit per ring slot
    std::vector<Event> active_;             // sorted, drained from head_
    std::size_t head_ = 0;
    std::int64_t cur_ = 0;                  // bucket held in active_
    std::size_t ring_count_ = 0;
    std::vector<Event> far_;                // min-heap via after()
    std::size_t size_ = 0;
};

class Simulator {
public:
    static constexpr std::uint64_t kDefaultEventCap = 1'000'000'000ULL;

    explicit Simulator(std::uint64_t event_cap = kDefaultEventCap) : event_cap_(event_cap) {}

    SimTime now() const { return clock_; }

    EventHandle schedule(SimTime fire_time, EventHandler& target, std::uint32_t tag,
                         std::uint64_t arg = 0);
    EventHandle schedule_in(SimTime delay, EventHandler& target, std::uint32_t tag,
                            std::uint64_t arg = 0) {
        return schedule(clock_ + delay, target, tag, arg);
    }

    // Lazy deletion: the event stays queued and is skipped when popped.
    void cancel(EventHandle h);

    // Processes every event with fire_time <= limit. Returns the time of the
    // last processed event, or limit when later events remain queued.
    SimTime run_until_idle(SimTime limit);

    std::uint64_t events_processed() const { return processed_; }
    std::size_t pending() const { return queue_.size(); }
    void set_event_cap(std::uint64_t cap) { event_cap_ = cap; }

private:
    EventQueue queue_;
    std::unordered_set<std::uint64_t> cancelled_;
    SimTime clock_ = 0;
    std::uint64_t next_seq_ = 1;
    std::uint64_t processed_ = 0;
    std::uint64_t event_cap_;
};

} // namespace lbsim
