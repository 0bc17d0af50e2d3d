// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/transport/recovery.hpp"

#include <algorithm>
#include <stdexcept>

namespace lbsim {

std::uint32_t compute_subflows(std::uint32_t q_pkts, std::uint32_t dupack_threshold, std::uint32_t flows_per_host) {
    if (q_pkts < 1 || dupack_threshold < 1 || flows_per_host < 1)
        throw std::invalid_argument("compute_subflows: arguments must be >= 1");
    std::uint64_t num = 4ULL * q_pkts;
    std::uint64_t den = static_cast<std::uint64_t>(dupack_threshold) * flows_per_host;
    std::uint64_t s = (num + den - 1) / den;
    return static_cast<std::uint32_t>(std::max<std::uint64_t>(1, s));
}

std::string_view to_string(RecoveryKind k) {
    switch (k) {
    case RecoveryKind::IdealCoding: return "ideal_coding";
    case RecoveryKind::Coding: return "coding";
    case RecoveryKind::TcpLike: return "tcp";
    case RecoveryKind::RoceLike: return "roce";
    case RecoveryKind::Trimming: return "trim";
    }
    return "?";
}

std::string_view to_string(LabelPolicy p) {
    switch (p) {
    case LabelPolicy::Ecmp: return "ecmp";
    case LabelPolicy::Spray: return "spray";
    case LabelPolicy::Subflow: return "subflow";
    case LabelPolicy::Plb: return "plb";
    }
    return "?";
}

} // namespace lbsim
