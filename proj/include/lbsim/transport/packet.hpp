// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>

#include "lbsim/engine/simulator.hpp"

namespace lbsim {

enum class PacketKind : std::uint8_t {
    Data,
    Ack,
    Nack,
    TrimmedHeader,
    Pfc,
};

inline bool is_control(PacketKind k) { return k != PacketKind::Data; }

namespace pktflag {
constexpr std::uint8_t kEcn = 1;         // CE mark on data, ECN echo on ACKs
constexpr std::uint8_t kRetransmit = 2;
constexpr std::uint8_t kReturnToSender = 4;
constexpr std::uint8_t kComplete = 8;    // receiver finished the message
} // namespace pktflag

using PacketRef = std::uint32_t;
constexpr PacketRef kNoPacket = 0xffffffffu;

struct Packet {
    SimTime sent_time = 0;
    SimTime enqueue_time = 0;
    SimTime dequeue_time = 0;
    std::uint32_t flow = 0;
    std::uint32_t seq = 0;       // DATA: index within the (sub)flow; headers keep it
    std::uint32_t ack = 0;       // ACK: cumulative ack / symbol count; NACK: requested seq
    std::uint32_t label = 0;     // flow label hashed by ECMP switches
    std::uint32_t src = 0;       // host ids
    std::uint32_t dst = 0;
    std::uint32_t size = 0;
    std::uint32_t epoch = 0;     // go-back-N round (RoCE-like) that produced this packet
    std::uint32_t in_link = 0xffffffffu; // ingress link at the current switch, for PFC
    std::uint16_t subflow = 0;
    PacketKind kind = PacketKind::Data;
    std::uint8_t flags = 0;

    bool has(std::uint8_t f) const { return (flags & f) != 0; }
    void set(std::uint8_t f) { flags |= f; }
    void clear(std::uint8_t f) { flags &= static_cast<std::uint8_t>(~f); }
};

} // namespace lbsim
