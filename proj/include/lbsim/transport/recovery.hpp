// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <string_view>

#include "lbsim/engine/simulator.hpp"

namespace lbsim {

enum class RecoveryKind : std::uint8_t {
    IdealCoding,  // rateless symbols, zero decoding overhead
    Coding,       // rateless symbols, fixed overhead
    TcpLike,      // cumulative ACKs, dupACK fast retransmit, RTO
    RoceLike,     // in-order receiver, NACK + go-back-N, PFC fabric
    Trimming,     // switch trimming, explicit loss signals
};

enum class TrimMode : std::uint8_t { Reflect, ReturnToSender };
enum class RoceRestart : std::uint8_t { FromNack, FromStart };

struct RecoveryScheme {
    RecoveryKind kind = RecoveryKind::IdealCoding;
    double overhead = 0.0;
    std::uint32_t dupack_threshold = 3;
    SimTime rto = 64 * kPicosPerMicro;
    SimTime rto_cap = 1600 * kPicosPerMicro;
    TrimMode trim_mode = TrimMode::Reflect;
    RoceRestart roce_restart = RoceRestart::FromNack;

    bool is_coding() const { return kind == RecoveryKind::IdealCoding || kind == RecoveryKind::Coding; }
    bool is_sequence() const { return !is_coding(); }
};

enum class LabelPolicy : std::uint8_t {
    Ecmp,     // one label for the whole flow
    Spray,    // label increments every packet
    Subflow,  // one distinct label per subflow
    Plb,      // constant until an ECN-driven repath
};

struct PlbConfig {
    std::uint32_t min_packets = 10;
    double mark_fraction = 0.4;
};

// Least subflow count s for which spraying-induced reordering cannot produce
// t duplicate ACKs: the worst queueing-delay gap across the 4 queues that
// can differ is 4q/b, and a subflow paced at b/(f*s) fits 4q/(f*s) packets
// into it. q is buffer capacity in packets.
std::uint32_t compute_subflows(std::uint32_t q_pkts, std::uint32_t dupack_threshold, std::uint32_t flows_per_host);

std::string_view to_string(RecoveryKind k);
std::string_view to_string(LabelPolicy p);

} // namespace lbsim
