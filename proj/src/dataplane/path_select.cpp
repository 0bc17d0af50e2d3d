// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/dataplane/path_select.hpp"

#include <algorithm>
#include <array>

namespace lbsim {

std::uint64_t FiveTuple::fingerprint() const {
    std::uint64_t x = (static_cast<std::uint64_t>(src) << 32) | dst;
    std::uint64_t y = (static_cast<std::uint64_t>(src_port) << 24) |
                      (static_cast<std::uint64_t>(dst_port) << 8) | proto;
    return splitmix64(x ^ splitmix64(y));
}

std::uint64_t ecmp_hash(const FiveTuple& key, std::uint32_t flow_label, std::uint64_t switch_salt) {
    std::uint64_t h = key.fingerprint();
    h = splitmix64(h ^ (static_cast<std::uint64_t>(flow_label) * 0xd6e8feb86659fd93ULL));
    return splitmix64(h ^ switch_salt);
}

std::uint32_t ecmp_select(const FiveTuple& key, std::uint32_t flow_label, std::uint64_t switch_salt,
                          std::uint32_t n_ports) {
    if (n_ports <= 1)
        return 0;
    return static_cast<std::uint32_t>(ecmp_hash(key, flow_label, switch_salt) % n_ports);
}

std::uint32_t adaptive_spray_select(std::span<const std::uint64_t> occupancies, RngStream& rng) {
    std::array<std::uint32_t, 256> best{};
    std::uint32_t n_best = 0;
    std::uint64_t min = ~0ULL;
    for (std::uint32_t i = 0; i < occupancies.size(); ++i) {
        if (occupancies[i] < min) {
            min = occupancies[i];
            n_best = 0;
        }
        if (occupancies[i] == min && n_best < best.size())
            best[n_best++] = i;
    }
    if (n_best == 1)
        return best[0];
    return best[rng.below(n_best)];
}

std::uint32_t FlowletTable::select(std::uint64_t flow, SimTime now,
                                   std::span<const std::uint64_t> occupancies, RngStream& rng) {
    auto [it, inserted] = entries_.try_emplace(flow, Entry{now, 0});
    Entry& e = it->second;
    if (!inserted && now - e.last_packet_time <= gap_) {
        e.last_packet_time = now;
        return e.port;
    }
    e.port = adaptive_spray_select(occupancies, rng);
    e.last_packet_time = now;
    ++reselections_;
    return e.port;
}

std::uint32_t EcmpArTable::select(std::uint64_t flow, const FiveTuple& key, std::uint32_t flow_label,
                                  std::uint64_t switch_salt, std::span<const std::uint64_t> occupancies,
                                  std::uint64_t capacity_bytes, RngStream& rng) {
    auto it = pinned_.find(flow);
    if (it != pinned_.end())
        return it->second;
    auto n = static_cast<std::uint32_t>(occupancies.size());
    std::uint32_t port = ecmp_select(key, flow_label, switch_salt, n);
    if (static_cast<double>(occupancies[port]) > remap_fraction_ * static_cast<double>(capacity_bytes)) {
        port = adaptive_spray_select(occupancies, rng);
        ++remapped_;
    }
    pinned_.emplace(flow, port);
    return port;
}

PfcSignal pfc_update(PfcState& s) {
    if (!s.paused && s.buffered >= s.pause_threshold) {
        s.paused = true;
        return PfcSignal::Pause;
    }
    if (s.paused && s.buffered <= s.resume_threshold) {
        s.paused = false;
        return PfcSignal::Resume;
    }
    return PfcSignal::NoChange;
}

} // namespace lbsim
