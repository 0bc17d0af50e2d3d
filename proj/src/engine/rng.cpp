// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/engine/rng.hpp"

#include <cmath>

namespace lbsim {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

RngStream::RngStream(std::uint64_t seed, StreamId id, std::uint64_t sub_id)
    : seed_(seed), id_(id),
      engine_(splitmix64(splitmix64(seed) ^ splitmix64(static_cast<std::uint64_t>(id) << 32 | 0x5eedULL) ^
                         splitmix64(sub_id + 0x1234567ULL))) {}

std::uint64_t RngStream::below(std::uint64_t n) {
    // Lemire-style rejection to avoid modulo bias.
    std::uint64_t threshold = (0 - n) % n;
    for (;;) {
        std::uint64_t r = engine_();
        if (r >= threshold)
            return r % n;
    }
}

double RngStream::exponential(double mean) {
    if (mean <= 0.0)
        return 0.0;
    return -mean * std::log1p(-uniform01());
}

} // namespace lbsim
