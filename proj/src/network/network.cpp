// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/network/network.hpp"

#include <algorithm>
#include <array>

namespace lbsim {

namespace {
constexpr std::uint32_t kMaxUp = 64;
constexpr std::uint32_t kNoLink = 0xffffffffu;
}

Network::Network(Simulator& sim, FatTree topo, const NetworkConfig& cfg, std::uint64_t seed)
    : sim_(sim), topo_(std::move(topo)), cfg_(cfg),
      tie_rng_(seed, StreamId::TieBreak), label_rng_(seed, StreamId::Labels),
      desync_rng_(seed, StreamId::TrimDesync) {
    RngStream salt_rng(seed, StreamId::HashSalt);
    const std::uint32_t n_switches = topo_.num_nodes() - topo_.num_hosts();
    switches_.resize(n_switches);
    for (auto& sw : switches_) {
        sw.salt = salt_rng.next_u64();
        sw.rr = RoundRobinSpray(static_cast<std::uint32_t>(sw.salt >> 40));
        if (cfg_.switch_lb == SwitchLb::Flowlet)
            sw.flowlets = std::make_unique<FlowletTable>(cfg_.flowlet_gap);
        if (cfg_.switch_lb == SwitchLb::EcmpAr)
            sw.ecmp_ar = std::make_unique<EcmpArTable>(cfg_.ecmp_ar_remap);
    }
    occ_scratch_.resize(kMaxUp);
    pool_.reserve(1 << 16);
}

Network::~Network() = default;

void Network::add_flow(const FlowParams& params, SimTime start) {
    flows_.emplace_back(params);
    pacer_at_.push_back(-1);
    Flow& f = flows_.back();
    if (f.complete())
        ++completed_;
    if (f.has_work(start))
        wake_pacer(f.id(), start);
}

PacketRef Network::alloc(const Packet& pkt) {
    PacketRef ref;
    if (!free_.empty()) {
        ref = free_.back();
        free_.pop_back();
        pool_[ref] = pkt;
    } else {
        ref = static_cast<PacketRef>(pool_.size());
        pool_.push_back(pkt);
    }
    return ref;
}

void Network::release(PacketRef ref) { free_.push_back(ref); }

std::uint64_t Network::live_data_packets() const {
    std::vector<char> is_free(pool_.size(), 0);
    for (PacketRef r : free_)
        is_free[r] = 1;
    std::uint64_t n = 0;
    for (std::size_t i = 0; i < pool_.size(); ++i)
        if (!is_free[i] && pool_[i].kind == PacketKind::Data)
            ++n;
    return n;
}

std::vector<std::uint64_t> Network::live_data_per_flow() const {
    std::vector<char> is_free(pool_.size(), 0);
    for (PacketRef r : free_)
        is_free[r] = 1;
    std::vector<std::uint64_t> n(flows_.size(), 0);
    for (std::size_t i = 0; i < pool_.size(); ++i)
        if (!is_free[i] && pool_[i].kind == PacketKind::Data)
            ++n[pool_[i].flow];
    return n;
}

std::uint64_t Network::flowlet_reselections() const {
    std::uint64_t n = 0;
    for (const auto& sw : switches_)
        if (sw.flowlets)
            n += sw.flowlets->reselections();
    return n;
}

std::uint64_t Network::ecmp_ar_remaps() const {
    std::uint64_t n = 0;
    for (const auto& sw : switches_)
        if (sw.ecmp_ar)
            n += sw.ecmp_ar->remapped();
    return n;
}

// ---- TransportEnv ----

void Network::emit(const Packet& pkt) {
    if (pkt.kind == PacketKind::Data)
        ++counters_.data_sent;
    else
        ++counters_.control_sent;
    PacketRef ref = alloc(pkt);
    send_on(topo_.host_up(pkt.src), ref);
}

void Network::wake_pacer(std::uint32_t flow, SimTime at) {
    SimTime& cur = pacer_at_[flow];
    if (cur >= 0 && cur <= at)
        return;
    cur = at;
    sim_.schedule(at, *this, kPacer, flow);
}

void Network::arm_timer(std::uint32_t flow, std::uint16_t subflow, SimTime at) {
    sim_.schedule(at, *this, kTimer, (static_cast<std::uint64_t>(flow) << 16) | subflow);
}

void Network::schedule_trim_retransmit(std::uint32_t flow, std::uint16_t subflow, std::uint32_t seq, SimTime at) {
    std::uint64_t arg = (static_cast<std::uint64_t>(flow) << 40) | (static_cast<std::uint64_t>(subflow & 0xff) << 32) | seq;
    sim_.schedule(at, *this, kTrimRtx, arg);
}

// ---- event dispatch ----

void Network::handle_event(std::uint32_t tag, std::uint64_t arg) {
    switch (tag) {
    case kArrive:
        on_arrive(static_cast<std::uint32_t>(arg >> 32), static_cast<PacketRef>(arg & 0xffffffffu));
        break;
    case kService: {
        auto id = static_cast<std::uint32_t>(arg);
        topo_.link(id).queue.service_scheduled = false;
        try_serve(id);
        break;
    }
    case kPacer:
        on_pacer(static_cast<std::uint32_t>(arg));
        break;
    case kTimer:
        flows_[arg >> 16].on_timer(*this, static_cast<std::uint16_t>(arg & 0xffff));
        break;
    case kTrimRtx:
        flows_[arg >> 40].on_trim_retransmit(*this, static_cast<std::uint16_t>((arg >> 32) & 0xff),
                                             static_cast<std::uint32_t>(arg & 0xffffffffu));
        break;
    case kPfc: {
        Link& l = topo_.link(static_cast<std::uint32_t>(arg >> 1));
        bool pause = arg & 1;
        l.queue.set_paused(pause);
        if (!pause)
            try_serve(static_cast<std::uint32_t>(arg >> 1));
        break;
    }
    default:
        break;
    }
}

void Network::on_pacer(std::uint32_t flow) {
    if (sim_.now() != pacer_at_[flow])
        return;  // superseded
    pacer_at_[flow] = -1;
    auto next = flows_[flow].pace_and_send(*this);
    if (next && pacer_at_[flow] < 0) {
        pacer_at_[flow] = *next;
        sim_.schedule(*next, *this, kPacer, flow);
    } else if (next && *next < pacer_at_[flow]) {
        wake_pacer(flow, *next);
    }
}

// ---- forwarding ----

void Network::on_arrive(std::uint32_t link_id, PacketRef ref) {
    Link& l = topo_.link(link_id);
    ++l.delivered;
    Packet& pkt = pool_[ref];
    if (topo_.is_host(l.to)) {
        deliver(l.to, ref);
        return;
    }
    pkt.in_link = cfg_.pfc && pkt.kind == PacketKind::Data ? link_id : kNoLink;
    forward(l.to, ref);
}

void Network::deliver(std::uint32_t, PacketRef ref) {
    Packet pkt = pool_[ref];
    release(ref);
    Flow& f = flows_[pkt.flow];
    switch (pkt.kind) {
    case PacketKind::Data: {
        ++counters_.data_delivered;
        f.note_data_gone(pkt);
        bool was = f.complete();
        auto reply = f.on_data(*this, pkt);
        if (!was && f.complete())
            ++completed_;
        if (reply)
            emit(*reply);
        break;
    }
    case PacketKind::TrimmedHeader:
        ++counters_.control_delivered;
        if (pkt.has(pktflag::kReturnToSender)) {
            f.on_control(*this, pkt);
        } else if (auto nack = f.on_trimmed_header(*this, pkt)) {
            emit(*nack);
        }
        break;
    default:
        ++counters_.control_delivered;
        f.on_control(*this, pkt);
        break;
    }
}

void Network::forward(std::uint32_t node, PacketRef ref) {
    send_on(route(node, pool_[ref]), ref);
}

void Network::packet_lost(const Packet& pkt, bool on_wire) {
    if (pkt.kind == PacketKind::Data) {
        Flow& f = flows_[pkt.flow];
        f.note_data_gone(pkt);
        if (on_wire) {
            ++f.counters().wire_dropped;
            ++counters_.data_wire_dropped;
        } else {
            ++f.counters().dropped;
            ++counters_.data_dropped;
        }
    } else if (on_wire) {
        ++counters_.control_wire_dropped;
    } else {
        ++counters_.control_dropped;
    }
}

void Network::send_on(std::uint32_t link_id, PacketRef ref) {
    Link& l = topo_.link(link_id);
    Packet& pkt = pool_[ref];
    const EnqueueResult res = l.queue.enqueue(pkt, ref, sim_.now());
    switch (res) {
    case EnqueueResult::Dropped:
        packet_lost(pkt, false);
        release(ref);
        return;
    case EnqueueResult::TrimmedLost:
    case EnqueueResult::Trimmed: {
        Flow& f = flows_[pkt.flow];
        Packet data = pkt;
        data.kind = PacketKind::Data;
        f.note_data_gone(data);
        ++f.counters().trimmed;
        ++counters_.data_trimmed;
        pkt.in_link = kNoLink;
        if (res == EnqueueResult::TrimmedLost) {
            ++counters_.control_dropped;
            release(ref);
            return;
        }
        if (l.queue.config().trim_bounce) {
            // The header turns around at this switch.
            ++counters_.headers_bounced;
            pkt.set(pktflag::kReturnToSender);
            pkt.dst = pkt.src;
            forward(l.from, ref);
            return;
        }
        break;
    }
    default:
        break;
    }
    if (pkt.in_link != kNoLink) {
        Link& in = topo_.link(pkt.in_link);
        in.pfc.buffered += pkt.size;
        pfc_signal(pkt.in_link, pfc_update(in.pfc));
    }
    if (!l.queue.service_scheduled)
        try_serve(link_id);
}

void Network::pfc_signal(std::uint32_t ingress, PfcSignal sig) {
    if (sig == PfcSignal::NoChange)
        return;
    // The frame goes straight onto the reverse wire at top priority.
    const Link& in = topo_.link(ingress);
    const Link& back = topo_.link(in.reverse);
    ++counters_.pfc_frames;
    SimTime at = sim_.now() + back.latency + back.tx_time(64);
    sim_.schedule(at, *this, kPfc, (static_cast<std::uint64_t>(ingress) << 1) | (sig == PfcSignal::Pause ? 1 : 0));
}

void Network::try_serve(std::uint32_t link_id) {
    Link& l = topo_.link(link_id);
    PortQueue& q = l.queue;
    const SimTime now = sim_.now();
    if (!q.busy(now) && q.has_servable()) {
        PacketRef ref = q.peek().pkt;
        Packet& pkt = pool_[ref];
        const SimTime tx = l.tx_time(pkt.size);
        q.dequeue(now, tx);
        pkt.dequeue_time = now;
        if (pkt.in_link != kNoLink) {
            Link& in = topo_.link(pkt.in_link);
            in.pfc.buffered -= pkt.size;
            pfc_signal(pkt.in_link, pfc_update(in.pfc));
            pkt.in_link = kNoLink;
        }
        if (l.failure.mode == FailureMode::Flaky && l.failure.bursting(now)) {
            ++q.counters().wire_dropped;
            packet_lost(pkt, true);
            release(ref);
        } else {
            sim_.schedule(now + tx + l.latency, *this, kArrive, (static_cast<std::uint64_t>(link_id) << 32) | ref);
        }
    }
    if (!q.service_scheduled && q.busy(now) && q.has_servable()) {
        q.service_scheduled = true;
        sim_.schedule(q.busy_until(), *this, kService, link_id);
    }
}

// ---- routing ----

FiveTuple Network::tuple_of(const Packet& pkt) const {
    const Flow& f = flows_[pkt.flow];
    FiveTuple t;
    t.src = f.params().src;
    t.dst = f.params().dst;
    t.src_port = static_cast<std::uint16_t>(pkt.flow);
    t.dst_port = static_cast<std::uint16_t>(4791 + (pkt.flow >> 16));
    if (pkt.kind != PacketKind::Data && pkt.kind != PacketKind::TrimmedHeader) {
        std::swap(t.src, t.dst);
        std::swap(t.src_port, t.dst_port);
    }
    return t;
}

std::uint32_t Network::route(std::uint32_t node, const Packet& pkt) {
    const std::uint32_t h = topo_.half();
    std::array<std::uint32_t, kMaxUp> up{};
    const std::uint32_t base = topo_.num_hosts();
    if (node < base + topo_.num_tors()) {
        std::uint32_t t = node - base;
        if (topo_.tor_of_host(pkt.dst) == t)
            return topo_.tor_down(t, pkt.dst % h);
        for (std::uint32_t j = 0; j < h; ++j)
            up[j] = topo_.tor_up(t, j);
        return choose_up(node, pkt, up.data(), h);
    }
    if (node < base + topo_.num_tors() + topo_.num_aggs()) {
        std::uint32_t a = node - base - topo_.num_tors();
        if (topo_.pod_of_host(pkt.dst) == topo_.pod_of_agg(a))
            return topo_.agg_down(a, topo_.tor_of_host(pkt.dst) % h);
        for (std::uint32_t i = 0; i < h; ++i)
            up[i] = topo_.agg_up(a, i);
        return choose_up(node, pkt, up.data(), h);
    }
    std::uint32_t c = node - base - topo_.num_tors() - topo_.num_aggs();
    return topo_.core_down(c, topo_.pod_of_host(pkt.dst));
}

std::uint32_t Network::choose_up(std::uint32_t node, const Packet& pkt, const std::uint32_t* links, std::uint32_t n) {
    SwitchState& sw = switches_[node - topo_.num_hosts()];
    const SimTime now = sim_.now();
    auto occupancies = [&]() {
        for (std::uint32_t i = 0; i < n; ++i)
            occ_scratch_[i] = topo_.link(links[i]).queue.data_occupancy(now);
        return std::span<const std::uint64_t>(occ_scratch_.data(), n);
    };
    const std::uint64_t key = (static_cast<std::uint64_t>(pkt.flow) << 1) | (pkt.kind == PacketKind::Data ? 0 : 1);
    std::uint32_t idx = 0;
    switch (cfg_.switch_lb) {
    case SwitchLb::Hash:
        idx = ecmp_select(tuple_of(pkt), pkt.label, sw.salt, n);
        break;
    case SwitchLb::RoundRobin:
        idx = sw.rr.select(n);
        break;
    case SwitchLb::Adaptive:
        idx = adaptive_spray_select(occupancies(), tie_rng_);
        break;
    case SwitchLb::Flowlet:
        idx = sw.flowlets->select(key, now, occupancies(), tie_rng_);
        break;
    case SwitchLb::EcmpAr:
        idx = sw.ecmp_ar->select(key, tuple_of(pkt), pkt.label, sw.salt, occupancies(),
                                 topo_.link(links[0]).queue.config().capacity_bytes, tie_rng_);
        break;
    }
    return links[idx];
}

} // namespace lbsim
