// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace lbsim {

// One independent stream per concern so that, e.g., changing how many
// failure draws happen never perturbs flow start jitter.
enum class StreamId : std::uint32_t {
    StartJitter = 1,
    HashSalt = 2,
    FailureSelect = 3,
    FailureArrivals = 4,
    TieBreak = 5,
    Workload = 6,
    Labels = 7,
    TrimDesync = 8,
};

std::uint64_t splitmix64(std::uint64_t x);

// std::mt19937_64 is bit-specified by the standard; the conversions below are
// written out so draws match across standard libraries (std distributions are
// implementation-defined).
class RngStream {
public:
    RngStream(std::uint64_t seed, StreamId id, std::uint64_t sub_id = 0);

    std::uint64_t seed() const { return seed_; }
    StreamId stream_id() const { return id_; }

    std::uint64_t next_u64() { return engine_(); }
    // Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    // Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n);
    // Uniform integer in [lo, hi).
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
        return lo + static_cast<std::int64_t>(below(static_cast<std::uint64_t>(hi - lo)));
    }
    double exponential(double mean);

private:
    std::uint64_t seed_;
    StreamId id_;
    std::mt19937_64 engine_;
};

} // namespace lbsim
