// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include <doctest.h>

#include <cmath>
#include <map>
#include <set>

#include "lbsim/topology/fat_tree.hpp"

using namespace lbsim;

namespace {

// Test-side capacity oracle: time for one host link to carry its hosts-1
// messages against time for the busiest pod's surviving uplink capacity to
// carry every inter-pod message that leaves the pod.
bool oracle_sufficient(double k, double f, double p) {
    const double hosts = k * k * k / 4.0;
    const double pod_hosts = k * k / 4.0;
    const double host_link_time = hosts - 1.0;
    const double leaving = pod_hosts * (hosts - pod_hosts);
    const double uplink_capacity = pod_hosts - f * p;
    return host_link_time > leaving / uplink_capacity;
}

std::map<LinkRole, int> count_roles(const FatTree& ft) {
    std::map<LinkRole, int> m;
    for (const Link& l : ft.links())
        ++m[l.role];
    return m;
}

} // namespace

TEST_SUITE("topology") {

TEST_CASE("k=8 node and link counts") {
    FatTree ft = build_fat_tree(8, LinkSpec{});
    CHECK(ft.num_hosts() == 128);
    CHECK(ft.num_tors() == 32);
    CHECK(ft.num_aggs() == 32);
    CHECK(ft.num_cores() == 16);
    // 128 host links + 128 tor-agg + 128 agg-core, both directions
    CHECK(ft.links().size() == 3 * 128 * 2);
    auto roles = count_roles(ft);
    CHECK(roles[LinkRole::HostUp] == 128);
    CHECK(roles[LinkRole::AggUp] == 128);
    CHECK(roles[LinkRole::CoreDown] == 128);
}

TEST_CASE("k=4 counts") {
    FatTree ft = build_fat_tree(4, LinkSpec{});
    CHECK(ft.num_hosts() == 16);
    CHECK(ft.num_tors() == 8);
    CHECK(ft.num_aggs() == 8);
    CHECK(ft.num_cores() == 4);
    CHECK(ft.links().size() == 3 * 16 * 2);
}

TEST_CASE("odd or small radix is rejected") {
    CHECK_THROWS_AS(build_fat_tree(3, LinkSpec{}), TopologyError);
    CHECK_THROWS_AS(build_fat_tree(2, LinkSpec{}), TopologyError);
}

TEST_CASE("full bisection: every tier carries the host capacity") {
    for (std::uint32_t k : {4u, 8u}) {
        FatTree ft = build_fat_tree(k, LinkSpec{});
        std::map<LinkRole, std::uint64_t> bw;
        for (const Link& l : ft.links())
            bw[l.role] += l.effective_bps;
        const std::uint64_t host_total = bw[LinkRole::HostUp];
        CHECK(host_total == std::uint64_t{ft.num_hosts()} * 100'000'000'000ULL);
        CHECK(bw[LinkRole::TorUp] == host_total);
        CHECK(bw[LinkRole::AggUp] == host_total);
        CHECK(bw[LinkRole::CoreDown] == host_total);
    }
}

TEST_CASE("links are wired consistently") {
    FatTree ft = build_fat_tree(8, LinkSpec{});
    for (std::uint32_t id = 0; id < ft.links().size(); ++id) {
        const Link& l = ft.link(id);
        const Link& r = ft.link(l.reverse);
        CHECK(r.reverse == id);
        CHECK(r.from == l.to);
        CHECK(r.to == l.from);
    }
    for (std::uint32_t h = 0; h < ft.num_hosts(); ++h) {
        CHECK(ft.link(ft.host_up(h)).from == h);
        CHECK(ft.link(ft.host_up(h)).to == ft.tor_node(ft.tor_of_host(h)));
    }
}

TEST_CASE("(k/2)^2 distinct up-paths between pods and one down-path") {
    const std::uint32_t k = 8;
    FatTree ft = build_fat_tree(k, LinkSpec{});
    CHECK(ft.inter_pod_paths() == 16);
    // Enumerate host 0 (pod 0) to a host in pod 3 by walking the links.
    const std::uint32_t src = 0, dst = 3 * ft.hosts_per_pod() + 5;
    const std::uint32_t t = ft.tor_of_host(src);
    std::set<std::uint32_t> cores;
    int paths = 0;
    for (std::uint32_t j = 0; j < ft.half(); ++j) {
        const Link& tu = ft.link(ft.tor_up(t, j));
        const std::uint32_t agg = tu.to - ft.agg_node(0);
        CHECK(ft.pod_of_agg(agg) == 0);
        for (std::uint32_t i = 0; i < ft.half(); ++i) {
            const Link& au = ft.link(ft.agg_up(agg, i));
            const std::uint32_t core = au.to - ft.core_node(0);
            cores.insert(core);
            ++paths;
            // From the core there is exactly one link to the destination pod,
            // one agg down link to its ToR and one ToR down link to the host.
            int down = 0;
            for (const Link& l : ft.links())
                if (l.role == LinkRole::CoreDown && l.from == ft.core_node(core) &&
                    ft.pod_of_agg(l.to - ft.agg_node(0)) == ft.pod_of_host(dst))
                    ++down;
            CHECK(down == 1);
            const Link& cd = ft.link(ft.core_down(core, ft.pod_of_host(dst)));
            const std::uint32_t dagg = cd.to - ft.agg_node(0);
            const Link& ad = ft.link(ft.agg_down(dagg, ft.tor_of_host(dst) % ft.half()));
            CHECK(ad.to == ft.tor_node(ft.tor_of_host(dst)));
            const Link& td = ft.link(ft.tor_down(ft.tor_of_host(dst), dst % ft.half()));
            CHECK(td.to == dst);
        }
    }
    CHECK(paths == 16);
    CHECK(cores.size() == 16);
}

TEST_CASE("static failures degrade f uplinks per pod in both directions") {
    struct Case {
        std::uint32_t f;
        double p;
        std::uint64_t bps;
    };
    for (Case c : {Case{2, 0.9, 10'000'000'000ULL}, Case{9, 0.2, 80'000'000'000ULL}, Case{4, 0.6, 40'000'000'000ULL}}) {
        FatTree ft = build_fat_tree(8, LinkSpec{});
        RngStream rng(11, StreamId::FailureSelect);
        apply_static_failures(ft, c.f, c.p, rng);
        std::map<std::uint32_t, int> per_pod;
        int degraded = 0;
        for (std::uint32_t id = 0; id < ft.links().size(); ++id) {
            const Link& l = ft.link(id);
            if (l.effective_bps == l.nominal_bps)
                continue;
            ++degraded;
            CHECK(l.effective_bps == c.bps);
            CHECK(ft.link(l.reverse).effective_bps == c.bps);
            CHECK(l.failure.mode == FailureMode::Static);
            if (l.role == LinkRole::AggUp)
                ++per_pod[ft.pod_of_agg(l.from - ft.agg_node(0))];
            else
                CHECK(l.role == LinkRole::CoreDown);
        }
        CHECK(degraded == static_cast<int>(2 * c.f * 8));
        CHECK(per_pod.size() == 8);
        for (auto [pod, n] : per_pod)
            CHECK(n == static_cast<int>(c.f));
    }
}

TEST_CASE("f=0 leaves the topology untouched") {
    FatTree ft = build_fat_tree(8, LinkSpec{});
    RngStream rng(1, StreamId::FailureSelect);
    apply_static_failures(ft, 0, 0.9, rng);
    for (const Link& l : ft.links()) {
        CHECK(l.effective_bps == l.nominal_bps);
        CHECK(l.failure.mode == FailureMode::None);
    }
}

TEST_CASE("too many failed links is rejected") {
    FatTree ft = build_fat_tree(8, LinkSpec{});
    RngStream rng(1, StreamId::FailureSelect);
    CHECK_THROWS_AS(apply_static_failures(ft, 17, 0.5, rng), TopologyError);
    CHECK_THROWS_AS(schedule_flaky_failures(ft, 17, 100, 10, rng, kPicosPerMilli), TopologyError);
    CHECK_THROWS_AS(apply_static_failures(ft, 2, 1.0, rng), TopologyError);
}

TEST_CASE("flaky bursts with zero duration never fail a packet") {
    FatTree ft = build_fat_tree(8, LinkSpec{});
    RngStream rng(5, StreamId::FailureArrivals);
    schedule_flaky_failures(ft, 2, 100.0, 0.0, rng, 100 * kPicosPerMilli);
    int flaky = 0;
    for (Link& l : ft.links()) {
        if (l.failure.mode != FailureMode::Flaky)
            continue;
        ++flaky;
        CHECK(l.failure.burst_arrivals > 0);
        CHECK(l.failure.bursts.empty());
        for (SimTime t = 0; t < 100 * kPicosPerMilli; t += 37 * kPicosPerMicro)
            CHECK_FALSE(l.failure.bursting(t));
    }
    CHECK(flaky == 2 * 2 * 8);
}

TEST_CASE("flaky burst arrivals are Poisson with the configured mean") {
    // 1 s horizon, 100 us mean gap: 10000 arrivals per link, SD 100.
    const SimTime horizon = 1000 * kPicosPerMilli;
    std::uint64_t total = 0;
    int links = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        FatTree ft = build_fat_tree(4, LinkSpec{});
        RngStream rng(seed, StreamId::FailureArrivals);
        schedule_flaky_failures(ft, 1, 100.0, 10.0, rng, horizon);
        for (const Link& l : ft.links()) {
            if (l.failure.mode != FailureMode::Flaky || l.role != LinkRole::AggUp)
                continue;
            const double n = static_cast<double>(l.failure.burst_arrivals);
            CHECK(std::abs(n - 10000.0) <= 3.0 * 100.0);
            total += l.failure.burst_arrivals;
            ++links;
            // Merged intervals are sorted and disjoint.
            for (std::size_t i = 1; i < l.failure.bursts.size(); ++i)
                CHECK(l.failure.bursts[i].start > l.failure.bursts[i - 1].end);
        }
    }
    REQUIRE(links == 20 * 4);
    const double mean = static_cast<double>(total) / links;
    CHECK(std::abs(mean - 10000.0) <= 3.0 * 100.0 / std::sqrt(double(links)));
}

TEST_CASE("flaky bursts cover about duration/(arrival) of the time") {
    FatTree ft = build_fat_tree(4, LinkSpec{});
    RngStream rng(9, StreamId::FailureArrivals);
    const SimTime horizon = 1000 * kPicosPerMilli;
    schedule_flaky_failures(ft, 1, 100.0, 10.0, rng, horizon);
    for (const Link& l : ft.links()) {
        if (l.failure.mode != FailureMode::Flaky)
            continue;
        SimTime down = 0;
        for (auto b : l.failure.bursts)
            down += std::min(b.end, horizon) - b.start;
        // Overlaps are merged so the covered share is 1 - exp(-0.1) ~ 0.095.
        const double share = static_cast<double>(down) / static_cast<double>(horizon);
        CHECK(share == doctest::Approx(1.0 - std::exp(-0.1)).epsilon(0.08));
    }
}

TEST_CASE("capacity anchors") {
    CHECK(check_capacity(8, 2, 0.9));
    CHECK_FALSE(check_capacity(8, 3, 0.9));
    CHECK(check_capacity(8, 9, 0.2));
    CHECK(check_capacity(8, 0, 0.0));
    CHECK(capacity_margin(8, 3, 0.9) == doctest::Approx(127.0 - 16.0 * 112.0 / 13.3));
}

TEST_CASE("capacity check agrees with the oracle and is monotone") {
    for (std::uint32_t k : {4u, 8u, 16u}) {
        const double per_pod = k * k / 4.0;
        for (std::uint32_t f = 0; f <= per_pod; ++f) {
            bool prev = true;
            for (int pi = 0; pi < 100; ++pi) {
                const double p = pi / 100.0;
                const bool ok = check_capacity(k, f, p);
                CHECK(ok == oracle_sufficient(k, f, p));
                // More loss never helps.
                if (!prev)
                    CHECK_FALSE(ok);
                prev = ok;
            }
        }
        for (int pi = 1; pi < 100; ++pi) {
            const double p = pi / 100.0;
            for (std::uint32_t f = 1; f <= per_pod; ++f)
                CHECK(capacity_margin(k, f, p) <= capacity_margin(k, f - 1, p));
        }
    }
}

}
