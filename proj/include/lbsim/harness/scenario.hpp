// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "lbsim/network/network.hpp"
#include "lbsim/topology/fat_tree.hpp"
#include "lbsim/transport/recovery.hpp"
#include "lbsim/workload/traffic.hpp"

namespace lbsim {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

enum class LbScheme : std::uint8_t {
    Ecmp,
    EcmpAr,
    HostSpray,
    SwitchSprayRr,
    SwitchSprayAr,
    FlowletAr,
    Plb,
    Subflow,  // ECMP with several differently-labelled subflows per flow
};

std::string_view to_string(LbScheme s);
LbScheme parse_lb_scheme(std::string_view s);

struct TopologyConfig {
    std::uint32_t k = 8;
    double link_rate_gbps = 100.0;
    double latency_ns = 1000.0;
    std::uint64_t buffer_bytes = 32 * 1024;
    std::uint32_t packet_bytes = 4096;
    std::uint32_t header_bytes = 64;
    std::uint64_t control_headroom_bytes = 4 * 1024;
    double ecn_threshold = 0.6;
};

struct WorkloadConfig {
    WorkloadKind type = WorkloadKind::AllToAll;
    std::uint32_t m = 1;
    std::uint32_t message_packets = 500;
    PermutationFamily family = PermutationFamily::Random;
};

struct LbConfig {
    LbScheme scheme = LbScheme::HostSpray;
    std::uint32_t subflows = 2;           // subflow scheme only
    double flowlet_gap_us = 10.0;
    double ecmp_ar_remap_fraction = 0.5;
    std::uint32_t plb_min_packets = 10;
    double plb_mark_fraction = 0.4;
};

struct RecoveryConfig {
    RecoveryKind kind = RecoveryKind::IdealCoding;
    double overhead = 0.05;               // coding only; ideal coding is 0
    std::uint32_t dupack_threshold = 3;
    double rto_us = 64.0;
    double rto_cap_us = 1600.0;
    std::uint32_t subflows = 1;           // accounting subflows (tcp)
    bool subflows_auto = false;           // size them from the buffer, threshold and flows per host
    TrimMode trim_mode = TrimMode::Reflect;
    RoceRestart roce_restart = RoceRestart::FromNack;
};

struct FailureConfig {
    FailureMode mode = FailureMode::None;
    std::uint32_t links_per_pod = 0;
    double frac_lost = 0.0;
    double arrival_mean_us = 100.0;
    double duration_mean_us = 10.0;
};

struct CapsConfig {
    std::uint64_t max_events = Simulator::kDefaultEventCap;
    double max_sim_time_ms = 0.0;         // 0: 200x the ideal completion time
};

struct Scenario {
    std::string name;                     // free-form label, not part of the fingerprint
    TopologyConfig topology;
    WorkloadConfig workload;
    LbConfig lb;
    RecoveryConfig recovery;
    double rate_coefficient = 1.0;
    FailureConfig failures;
    std::vector<std::uint64_t> seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    CapsConfig caps;
    bool ideal_payload_only = false;

    std::uint32_t hosts() const { return topology.k * topology.k * topology.k / 4; }
    std::uint32_t flows_per_host() const;
    // Transport subflows per flow after resolving "auto".
    std::uint32_t resolved_subflows() const;
    LabelPolicy label_policy() const;
    NetworkConfig network_config() const;
    RecoveryScheme recovery_scheme() const;
    LinkSpec link_spec() const;
    double link_rate_bps() const { return topology.link_rate_gbps * 1e9; }
    // Inter-send time of one flow, in ticks.
    SimTime send_interval() const;
    bool capacity_sufficient() const;
};

// Throws ConfigError naming the offending key path.
Scenario parse_scenario(const nlohmann::json& j);
Scenario parse_scenario_text(std::string_view text);
void validate(const Scenario& s);

// Fully resolved tree holding only keys meaningful for this scenario.
nlohmann::json to_json(const Scenario& s, bool with_seeds = true);
// FNV-1a over the canonical resolved JSON (seeds and name excluded).
std::string scenario_hash(const Scenario& s);

// Every scalar key path the schema accepts, e.g. "topology.k".
const std::vector<std::string>& scalar_paths();
bool is_scalar_path(std::string_view path);
// Writes value at a dotted path, creating objects on the way.
void set_path(nlohmann::json& j, std::string_view path, const nlohmann::json& value);

} // namespace lbsim
