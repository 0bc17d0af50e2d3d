// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/topology/fat_tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace lbsim {

std::uint32_t FatTree::add_pair(std::uint32_t a, std::uint32_t b, LinkRole up_role, LinkRole down_role,
                                const LinkSpec& spec, const QueueConfig& a_side, const QueueConfig& b_side) {
    auto id = static_cast<std::uint32_t>(links_.size());
    Link ab;
    ab.from = a;
    ab.to = b;
    ab.reverse = id + 1;
    ab.role = up_role;
    ab.nominal_bps = ab.effective_bps = spec.rate_bps;
    ab.latency = spec.latency;
    ab.queue = PortQueue(a_side);
    ab.pfc.pause_threshold = spec.switch_queue.capacity_bytes;
    Link ba = ab;
    ba.from = b;
    ba.to = a;
    ba.reverse = id;
    ba.role = down_role;
    ba.queue = PortQueue(b_side);
    links_.push_back(std::move(ab));
    links_.push_back(std::move(ba));
    return id;
}

FatTree build_fat_tree(std::uint32_t k, const LinkSpec& spec, const QueueConfig& host_nic) {
    if (k < 4 || k % 2 != 0)
        throw TopologyError("fat-tree radix must be even and >= 4, got " + std::to_string(k));
    FatTree ft;
    ft.k_ = k;
    const std::uint32_t h = k / 2;
    const QueueConfig& sw = spec.switch_queue;

    ft.host_up_.resize(ft.num_hosts());
    ft.tor_down_.resize(ft.num_tors() * h);
    ft.tor_up_.resize(ft.num_tors() * h);
    ft.agg_down_.resize(ft.num_aggs() * h);
    ft.agg_up_.resize(ft.num_aggs() * h);
    ft.core_down_.resize(ft.num_cores() * k);

    for (std::uint32_t host = 0; host < ft.num_hosts(); ++host) {
        std::uint32_t t = ft.tor_of_host(host);
        std::uint32_t id = ft.add_pair(host, ft.tor_node(t), LinkRole::HostUp, LinkRole::TorDown, spec, host_nic, sw);
        ft.host_up_[host] = id;
        ft.tor_down_[t * h + host % h] = id + 1;
    }
    for (std::uint32_t t = 0; t < ft.num_tors(); ++t) {
        std::uint32_t pod = ft.pod_of_tor(t);
        for (std::uint32_t j = 0; j < h; ++j) {
            std::uint32_t a = pod * h + j;
            std::uint32_t id = ft.add_pair(ft.tor_node(t), ft.agg_node(a), LinkRole::TorUp, LinkRole::AggDown, spec, sw, sw);
            ft.tor_up_[t * h + j] = id;
            ft.agg_down_[a * h + t % h] = id + 1;
        }
    }
    for (std::uint32_t a = 0; a < ft.num_aggs(); ++a) {
        std::uint32_t pod = ft.pod_of_agg(a);
        std::uint32_t j = a % h;
        for (std::uint32_t i = 0; i < h; ++i) {
            std::uint32_t c = j * h + i;
            std::uint32_t id = ft.add_pair(ft.agg_node(a), ft.core_node(c), LinkRole::AggUp, LinkRole::CoreDown, spec, sw, sw);
            ft.agg_up_[a * h + i] = id;
            ft.core_down_[c * k + pod] = id + 1;
        }
    }
    return ft;
}

FatTree build_fat_tree(std::uint32_t k, const LinkSpec& spec) {
    QueueConfig nic = spec.switch_queue;
    nic.unbounded = true;
    nic.trim_enabled = false;
    return build_fat_tree(k, spec, nic);
}

std::vector<std::uint32_t> FatTree::pod_uplinks(std::uint32_t pod) const {
    std::vector<std::uint32_t> out;
    out.reserve(uplinks_per_pod());
    for (std::uint32_t j = 0; j < half(); ++j)
        for (std::uint32_t i = 0; i < half(); ++i)
            out.push_back(agg_up(pod * half() + j, i));
    return out;
}

namespace {

std::vector<std::uint32_t> choose_uplinks(const FatTree& ft, std::uint32_t pod, std::uint32_t count,
                                          RngStream& rng) {
    std::vector<std::uint32_t> links = ft.pod_uplinks(pod);
    // Partial Fisher-Yates.
    for (std::uint32_t i = 0; i < count; ++i) {
        auto j = i + static_cast<std::uint32_t>(rng.below(links.size() - i));
        std::swap(links[i], links[j]);
    }
    links.resize(count);
    return links;
}

void check_links_per_pod(const FatTree& ft, std::uint32_t f) {
    if (f > ft.uplinks_per_pod())
        throw TopologyError("failed links per pod " + std::to_string(f) + " exceeds " +
                            std::to_string(ft.uplinks_per_pod()) + " uplinks");
}

} // namespace

void apply_static_failures(FatTree& ft, std::uint32_t links_per_pod, double frac_lost, RngStream& rng) {
    check_links_per_pod(ft, links_per_pod);
    if (frac_lost < 0.0 || frac_lost >= 1.0)
        throw TopologyError("static failure fraction must be in [0, 1)");
    if (links_per_pod == 0)
        return;
    for (std::uint32_t pod = 0; pod < ft.num_pods(); ++pod) {
        for (std::uint32_t id : choose_uplinks(ft, pod, links_per_pod, rng)) {
            for (std::uint32_t l : {id, ft.link(id).reverse}) {
                Link& link = ft.link(l);
                link.failure.mode = FailureMode::Static;
                link.failure.frac_lost = frac_lost;
                link.effective_bps = static_cast<std::uint64_t>(
                    std::llround(static_cast<double>(link.nominal_bps) * (1.0 - frac_lost)));
            }
        }
    }
}

void schedule_flaky_failures(FatTree& ft, std::uint32_t links_per_pod, double arrival_mean_us,
                             double duration_mean_us, RngStream& rng, SimTime horizon) {
    check_links_per_pod(ft, links_per_pod);
    if (horizon <= 0)
        throw TopologyError("flaky failure horizon must be positive");
    if (arrival_mean_us <= 0.0)
        throw TopologyError("flaky burst arrival mean must be positive");
    for (std::uint32_t pod = 0; pod < ft.num_pods(); ++pod) {
        for (std::uint32_t id : choose_uplinks(ft, pod, links_per_pod, rng)) {
            std::vector<BurstInterval> bursts;
            std::uint64_t arrivals = 0;
            double t_us = 0.0;
            for (;;) {
                t_us += rng.exponential(arrival_mean_us);
                SimTime start = from_us(t_us);
                if (start >= horizon)
                    break;
                ++arrivals;
                SimTime end = start + from_us(rng.exponential(duration_mean_us));
                if (end <= start)
                    continue;
                if (!bursts.empty() && start <= bursts.back().end)
                    bursts.back().end = std::max(bursts.back().end, end);
                else
                    bursts.push_back({start, end});
            }
            for (std::uint32_t l : {id, ft.link(id).reverse}) {
                Link& link = ft.link(l);
                link.failure.mode = FailureMode::Flaky;
                link.failure.bursts = bursts;
                link.failure.burst_arrivals = arrivals;
                link.failure.cursor = 0;
            }
        }
    }
}

double capacity_margin(std::uint32_t k, double f, double p) {
    const double kk = static_cast<double>(k);
    const double hosts = kk * kk * kk / 4.0;
    const double per_pod = kk * kk / 4.0;
    const double effective_uplinks = per_pod - f * p;
    const double lhs = hosts - 1.0;
    if (effective_uplinks <= 0.0)
        return -std::numeric_limits<double>::infinity();
    const double rhs = per_pod * (hosts - per_pod) / effective_uplinks;
    return lhs - rhs;
}

bool check_capacity(std::uint32_t k, double f, double p) {
    return capacity_margin(k, f, p) > 0.0;
}

} // namespace lbsim
