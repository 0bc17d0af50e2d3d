// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/workload/traffic.hpp"

#include <numeric>
#include <string>

namespace lbsim {

TrafficMatrix gen_all_to_all(std::uint32_t n, std::uint32_t message_packets) {
    if (n < 2)
        throw WorkloadError("all-to-all needs at least 2 hosts, got " + std::to_string(n));
    TrafficMatrix tm;
    tm.kind = WorkloadKind::AllToAll;
    tm.hosts = n;
    tm.matrices = n - 1;
    tm.flows_per_host = n - 1;
    tm.flows.reserve(static_cast<std::size_t>(n) * (n - 1));
    for (std::uint32_t s = 0; s < n; ++s)
        for (std::uint32_t d = 0; d < n; ++d)
            if (s != d)
                tm.flows.push_back({s, d, message_packets});
    return tm;
}

std::vector<std::uint32_t> random_derangement(std::uint32_t n, RngStream& rng) {
    std::vector<std::uint32_t> p(n);
    for (;;) {
        std::iota(p.begin(), p.end(), 0u);
        for (std::uint32_t i = n - 1; i > 0; --i)
            std::swap(p[i], p[rng.below(i + 1)]);
        bool ok = true;
        for (std::uint32_t i = 0; i < n && ok; ++i)
            ok = p[i] != i;
        if (ok)
            return p;
    }
}

TrafficMatrix gen_permutations(std::uint32_t n, std::uint32_t m, std::uint32_t message_packets, RngStream& rng,
                               PermutationFamily family) {
    if (n < 2)
        throw WorkloadError("permutations need at least 2 hosts, got " + std::to_string(n));
    if (m < 1)
        throw WorkloadError("need at least one permutation matrix");
    if (family == PermutationFamily::Shift && m > n - 1)
        throw WorkloadError("shift family has only n-1 distinct matrices");
    TrafficMatrix tm;
    tm.kind = WorkloadKind::Permutations;
    tm.hosts = n;
    tm.matrices = m;
    tm.flows_per_host = m;
    tm.flows.reserve(static_cast<std::size_t>(n) * m);
    for (std::uint32_t i = 0; i < m; ++i) {
        if (family == PermutationFamily::Shift) {
            for (std::uint32_t h = 0; h < n; ++h)
                tm.flows.push_back({h, (h + i + 1) % n, message_packets});
        } else {
            std::vector<std::uint32_t> p = random_derangement(n, rng);
            for (std::uint32_t h = 0; h < n; ++h)
                tm.flows.push_back({h, p[h], message_packets});
        }
    }
    return tm;
}

double calc_rate(double link_rate_bps, std::uint32_t flows_per_host, double coefficient) {
    if (flows_per_host < 1)
        throw WorkloadError("flows per host must be >= 1");
    if (!(coefficient > 0.0 && coefficient <= 1.0))
        throw WorkloadError("rate coefficient must be in (0, 1]");
    return coefficient * link_rate_bps / static_cast<double>(flows_per_host);
}

} // namespace lbsim
