// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "lbsim/engine/rng.hpp"

namespace lbsim {

class WorkloadError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct FlowSpec {
    std::uint32_t src = 0;
    std::uint32_t dst = 0;
    std::uint32_t message_packets = 0;

    friend bool operator==(const FlowSpec&, const FlowSpec&) = default;
    friend auto operator<=>(const FlowSpec&, const FlowSpec&) = default;
};

enum class WorkloadKind : std::uint8_t { AllToAll, Permutations };

// Random: independent uniform derangements. Shift: the i-th matrix sends
// host h to (h + i) mod n, so n-1 of them compose an all-to-all.
enum class PermutationFamily : std::uint8_t { Random, Shift };

struct TrafficMatrix {
    WorkloadKind kind = WorkloadKind::AllToAll;
    std::uint32_t hosts = 0;
    std::uint32_t matrices = 0;       // m for permutations, n-1 for all-to-all
    std::uint32_t flows_per_host = 0;
    std::vector<FlowSpec> flows;
};

TrafficMatrix gen_all_to_all(std::uint32_t n, std::uint32_t message_packets);

TrafficMatrix gen_permutations(std::uint32_t n, std::uint32_t m, std::uint32_t message_packets, RngStream& rng,
                               PermutationFamily family = PermutationFamily::Random);

// Uniform derangement of [0, n) by rejection sampling.
std::vector<std::uint32_t> random_derangement(std::uint32_t n, RngStream& rng);

// Fair-share pacing rate c * b / f, in bits per second.
double calc_rate(double link_rate_bps, std::uint32_t flows_per_host, double coefficient);

} // namespace lbsim
