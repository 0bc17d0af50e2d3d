// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include <doctest.h>

#include <cmath>
#include <vector>

#include "lbsim/metrics/metrics.hpp"

using namespace lbsim;

TEST_SUITE("metrics") {

TEST_CASE("ideal completion time of a k=8 all-to-all") {
    // 127 * 500 packets of 4096 B at 100 Gbps.
    const SimTime ideal = ideal_cct(127 * 500, 4096, 64, 100e9);
    CHECK(ideal == 127LL * 500 * 327680);
    CHECK(to_ms(ideal) == doctest::Approx(20.808).epsilon(1e-4));
    // Payload-only accounting leaves the header out.
    CHECK(ideal_cct(127 * 500, 4096, 64, 100e9, true) == 127LL * 500 * 322560);
    CHECK_THROWS(ideal_cct(1, 4096, 64, 0.0));
}

TEST_CASE("normalized completion time") {
    CHECK(normalized_cct(200, 100) == 2.0);
    CHECK(normalized_cct(-1, 100) == 0.0);
    CHECK(normalized_cct(5, 0) == 0.0);
}

TEST_CASE("worst-hit flow counts every kind of loss") {
    std::vector<FlowStats> flows(3);
    flows[0].dropped = 4;
    flows[1].trimmed = 2;
    flows[1].wire_dropped = 3;
    flows[2].dropped = 1;
    CHECK(worst_hit_flow(flows) == 5);
    CHECK(worst_hit_flow(std::span<const FlowStats>{}) == 0);
}

TEST_CASE("aggregate mean and sample SD") {
    std::vector<double> v{1.0, 2.0, 3.0, 4.0};
    auto a = aggregate(v);
    CHECK(a.n == 4);
    CHECK(a.mean == doctest::Approx(2.5));
    CHECK(a.sd == doctest::Approx(std::sqrt(5.0 / 3.0)));
    CHECK(a.min == 1.0);
    CHECK(a.max == 4.0);
    std::vector<double> one{7.0};
    CHECK(aggregate(one).sd == 0.0);
    CHECK_THROWS(aggregate(std::span<const double>{}));
}

TEST_CASE("aggregate is shift and scale equivariant") {
    std::vector<double> v{1.3, 1.7, 1.1, 1.45, 1.9};
    auto a = aggregate(v);
    std::vector<double> w;
    for (double x : v)
        w.push_back(3.0 * x + 2.0);
    auto b = aggregate(w);
    CHECK(b.mean == doctest::Approx(3.0 * a.mean + 2.0));
    CHECK(b.sd == doctest::Approx(3.0 * a.sd));
    CHECK(a.min <= a.mean);
    CHECK(a.mean <= a.max);
}

}
