// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include <doctest.h>

#include <array>
#include <map>
#include <vector>

#include "lbsim/dataplane/path_select.hpp"
#include "lbsim/dataplane/port_queue.hpp"

using namespace lbsim;

namespace {

Packet data_pkt(std::uint32_t seq, std::uint32_t size = 4096) {
    Packet p;
    p.kind = PacketKind::Data;
    p.seq = seq;
    p.size = size;
    return p;
}

double chi_square(const std::vector<std::uint64_t>& counts, double expected) {
    double x = 0.0;
    for (auto c : counts) {
        const double d = static_cast<double>(c) - expected;
        x += d * d / expected;
    }
    return x;
}

} // namespace

TEST_SUITE("dataplane") {

TEST_CASE("eight 4 KB packets fill a 32 KB port; the ninth is dropped") {
    PortQueue q(QueueConfig{});
    for (std::uint32_t i = 0; i < 8; ++i) {
        Packet p = data_pkt(i);
        CHECK(q.enqueue(p, i, 0) != EnqueueResult::Dropped);
    }
    CHECK(q.data_occupancy(0) == 32 * 1024);
    Packet p = data_pkt(8);
    CHECK(q.enqueue(p, 8, 0) == EnqueueResult::Dropped);
    const auto& c = q.counters();
    CHECK(c.arrived == 9);
    CHECK(c.enqueued == 8);
    CHECK(c.dropped == 1);
}

TEST_CASE("ECN marks once occupancy reaches 60% of capacity") {
    PortQueue q(QueueConfig{});
    // 0.6 * 32768 = 19660.8: the 6th arrival sees 20480 bytes queued.
    std::vector<EnqueueResult> r;
    for (std::uint32_t i = 0; i < 8; ++i) {
        Packet p = data_pkt(i);
        r.push_back(q.enqueue(p, i, 0));
        CHECK(p.has(pktflag::kEcn) == (r.back() == EnqueueResult::EnqueuedMarked));
    }
    for (int i = 0; i < 5; ++i)
        CHECK(r[i] == EnqueueResult::Enqueued);
    for (int i = 5; i < 8; ++i)
        CHECK(r[i] == EnqueueResult::EnqueuedMarked);
    CHECK(q.counters().ecn_marked == 3);
}

TEST_CASE("with trimming the ninth packet becomes a 64 B header at high priority") {
    QueueConfig cfg;
    cfg.trim_enabled = true;
    PortQueue q(cfg);
    for (std::uint32_t i = 0; i < 8; ++i) {
        Packet p = data_pkt(i);
        q.enqueue(p, i, 0);
    }
    Packet p = data_pkt(8);
    CHECK(q.enqueue(p, 8, 0) == EnqueueResult::Trimmed);
    CHECK(p.kind == PacketKind::TrimmedHeader);
    CHECK(p.size == 64);
    CHECK(p.seq == 8);
    CHECK(q.control_occupancy(0) == 64);
    CHECK(q.data_occupancy(0) == 32 * 1024);
    // Control goes out first.
    auto e = q.dequeue(0, 100);
    CHECK(e.pkt == 8);
    CHECK(e.size == 64);
    e = q.dequeue(100, 100);
    CHECK(e.pkt == 0);
}

TEST_CASE("return-to-sender trimming hands the header back") {
    QueueConfig cfg;
    cfg.trim_enabled = true;
    cfg.trim_bounce = true;
    PortQueue q(cfg);
    for (std::uint32_t i = 0; i < 8; ++i) {
        Packet p = data_pkt(i);
        q.enqueue(p, i, 0);
    }
    Packet p = data_pkt(8);
    CHECK(q.enqueue(p, 8, 0) == EnqueueResult::Trimmed);
    CHECK(q.control_occupancy(0) == 0);
    CHECK(q.counters().bounced == 1);
    CHECK(q.counters().arrived == q.counters().enqueued + q.counters().dropped + q.counters().bounced);
}

TEST_CASE("control headroom overflow drops headers") {
    QueueConfig cfg;
    cfg.trim_enabled = true;
    PortQueue q(cfg);
    for (std::uint32_t i = 0; i < 8; ++i) {
        Packet p = data_pkt(i);
        q.enqueue(p, i, 0);
    }
    int trimmed = 0, lost = 0;
    for (std::uint32_t i = 8; i < 8 + 70; ++i) {
        Packet p = data_pkt(i);
        auto r = q.enqueue(p, i, 0);
        trimmed += r == EnqueueResult::Trimmed;
        lost += r == EnqueueResult::TrimmedLost;
    }
    CHECK(trimmed == 64);  // 4096 / 64
    CHECK(lost == 6);
}

TEST_CASE("the packet in service still counts toward occupancy") {
    PortQueue q(QueueConfig{});
    Packet p = data_pkt(0);
    q.enqueue(p, 0, 0);
    q.dequeue(0, 327680);
    CHECK(q.data_occupancy(0) == 4096);
    CHECK(q.data_occupancy(327679) == 4096);
    CHECK(q.data_occupancy(327680) == 0);
    CHECK(q.busy(100));
    CHECK_FALSE(q.busy(327680));
}

TEST_CASE("lossless and unbounded ports never refuse data") {
    QueueConfig cfg;
    cfg.lossless = true;
    PortQueue q(cfg);
    for (std::uint32_t i = 0; i < 50; ++i) {
        Packet p = data_pkt(i);
        CHECK(q.enqueue(p, i, 0) != EnqueueResult::Dropped);
    }
    QueueConfig nic;
    nic.unbounded = true;
    PortQueue h(nic);
    for (std::uint32_t i = 0; i < 500; ++i) {
        Packet p = data_pkt(i);
        CHECK(h.enqueue(p, i, 0) == EnqueueResult::Enqueued);
    }
    // FIFO order survives ring growth.
    for (std::uint32_t i = 0; i < 500; ++i)
        CHECK(h.dequeue(i, 1).pkt == i);
}

TEST_CASE("a PFC pause holds data but not control") {
    PortQueue q(QueueConfig{});
    Packet d = data_pkt(0);
    q.enqueue(d, 0, 0);
    q.set_paused(true);
    CHECK_FALSE(q.has_servable());
    Packet a;
    a.kind = PacketKind::Ack;
    a.size = 64;
    q.enqueue(a, 1, 0);
    CHECK(q.has_servable());
    CHECK(q.dequeue(0, 1).pkt == 1);
    CHECK_FALSE(q.has_servable());
    q.set_paused(false);
    CHECK(q.has_servable());
    CHECK(q.counters().pfc_pauses == 1);
}

TEST_CASE("ECMP spreads 10000 flows evenly over 4 ports") {
    std::vector<std::uint64_t> counts(4, 0);
    for (std::uint32_t f = 0; f < 10000; ++f) {
        FiveTuple t{f % 128, (f * 7 + 3) % 128, static_cast<std::uint16_t>(1000 + f), 4791, 17};
        ++counts[ecmp_select(t, 0, 0x1234567ULL, 4)];
    }
    for (auto c : counts) {
        CHECK(c >= 2375);
        CHECK(c <= 2625);
    }
    // 3 degrees of freedom; 11.34 is the 1% critical value.
    CHECK(chi_square(counts, 2500.0) < 11.34);
}

TEST_CASE("ECMP choices at different salts are independent") {
    // Joint distribution of (port at salt A, port at salt B) over 16 cells.
    std::vector<std::uint64_t> joint(16, 0);
    for (std::uint32_t f = 0; f < 16000; ++f) {
        FiveTuple t{f, f ^ 0x55, 1, 2, 17};
        auto a = ecmp_select(t, 0, 111, 4);
        auto b = ecmp_select(t, 0, 222, 4);
        ++joint[a * 4 + b];
    }
    // 15 degrees of freedom; 30.58 is the 1% critical value.
    CHECK(chi_square(joint, 1000.0) < 30.58);
}

TEST_CASE("ECMP is deterministic and label-sensitive") {
    FiveTuple t{1, 2, 3, 4, 17};
    CHECK(ecmp_select(t, 9, 77, 8) == ecmp_select(t, 9, 77, 8));
    std::vector<std::uint64_t> counts(8, 0);
    for (std::uint32_t label = 0; label < 8000; ++label)
        ++counts[ecmp_select(t, label, 77, 8)];
    CHECK(chi_square(counts, 1000.0) < 18.48);  // 7 dof, 1%
    CHECK(ecmp_select(t, 0, 77, 1) == 0);
}

TEST_CASE("round robin cycles and spreads evenly") {
    RoundRobinSpray rr;
    std::vector<std::uint32_t> seq;
    for (int i = 0; i < 8; ++i)
        seq.push_back(rr.select(4));
    CHECK(seq == std::vector<std::uint32_t>{0, 1, 2, 3, 0, 1, 2, 3});
    RoundRobinSpray rr2;
    std::vector<int> per(4, 0);
    for (int i = 0; i < 4000; ++i)
        ++per[rr2.select(4)];
    for (int c : per)
        CHECK(c == 1000);
    RoundRobinSpray rr3(6);
    CHECK(rr3.select(4) == 2);
    CHECK(rr3.select(4) == 3);
    CHECK(rr3.select(4) == 0);
}

TEST_CASE("adaptive spraying picks the shortest queue") {
    RngStream rng(1, StreamId::TieBreak);
    std::array<std::uint64_t, 3> a{3, 1, 2};
    CHECK(adaptive_spray_select(a, rng) == 1);
    std::array<std::uint64_t, 4> b{5, 5, 0, 5};
    CHECK(adaptive_spray_select(b, rng) == 2);
}

TEST_CASE("adaptive spraying breaks ties uniformly") {
    RngStream rng(2, StreamId::TieBreak);
    std::array<std::uint64_t, 4> occ{7, 7, 9, 7};
    std::map<std::uint32_t, std::uint64_t> hits;
    for (int i = 0; i < 30000; ++i)
        ++hits[adaptive_spray_select(occ, rng)];
    CHECK(hits.count(2) == 0);
    std::vector<std::uint64_t> v{hits[0], hits[1], hits[3]};
    CHECK(chi_square(v, 10000.0) < 9.21);  // 2 dof, 1%
}

TEST_CASE("flowlets keep the port within the gap and reselect after it") {
    const SimTime gap = from_ns(41600);
    FlowletTable t(gap);
    RngStream rng(3, StreamId::TieBreak);
    std::array<std::uint64_t, 4> occ{9, 9, 0, 9};
    CHECK(t.select(1, 0, occ, rng) == 2);
    // The old choice sticks even though another port is now emptier.
    std::array<std::uint64_t, 4> occ2{0, 9, 9, 9};
    CHECK(t.select(1, gap, occ2, rng) == 2);           // exactly at the boundary
    CHECK(t.select(1, 2 * gap, occ2, rng) == 2);        // gap measured from the last packet
    CHECK(t.select(1, 3 * gap + 1, occ2, rng) == 0);    // one tick past the boundary
    CHECK(t.reselections() == 2);
    CHECK(t.select(2, 3 * gap + 1, occ, rng) == 2);     // flows are independent
    CHECK(t.size() == 2);
}

TEST_CASE("ECMP-AR pins the hashed port unless it is congested") {
    RngStream rng(4, StreamId::TieBreak);
    FiveTuple t{10, 20, 30, 40, 17};
    const std::uint32_t hashed = ecmp_select(t, 0, 5, 4);
    std::array<std::uint64_t, 4> calm{0, 0, 0, 0};
    EcmpArTable ar(0.5);
    CHECK(ar.select(1, t, 0, 5, calm, 32768, rng) == hashed);
    CHECK(ar.remapped() == 0);

    std::array<std::uint64_t, 4> busy{};
    busy.fill(20000);
    const std::uint32_t empty = (hashed + 1) % 4;
    busy[empty] = 0;
    EcmpArTable ar2(0.5);
    CHECK(ar2.select(1, t, 0, 5, busy, 32768, rng) == empty);
    CHECK(ar2.remapped() == 1);
    // Pinned for life.
    CHECK(ar2.select(1, t, 0, 5, calm, 32768, rng) == empty);
    CHECK(ar2.remapped() == 1);
}

TEST_CASE("PFC pauses at the threshold and resumes below the resume mark") {
    PfcState s;
    s.pause_threshold = 32768;
    s.resume_threshold = 28672;
    s.buffered = 28672;
    CHECK(pfc_update(s) == PfcSignal::NoChange);
    s.buffered = 32768;
    CHECK(pfc_update(s) == PfcSignal::Pause);
    CHECK(s.paused);
    CHECK(pfc_update(s) == PfcSignal::NoChange);
    s.buffered = 30000;
    CHECK(pfc_update(s) == PfcSignal::NoChange);
    s.buffered = 28672;
    CHECK(pfc_update(s) == PfcSignal::Resume);
    CHECK_FALSE(s.paused);
}

}
