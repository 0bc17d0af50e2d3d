// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/transport/flow.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace lbsim {

namespace {
constexpr std::uint8_t kAcked = 1;
constexpr std::uint8_t kQueued = 2;
constexpr std::uint8_t kReported = 4;
constexpr std::uint8_t kMarkedLost = 8;

std::uint8_t with_cause(std::uint8_t status, RetxCause c) {
    return static_cast<std::uint8_t>((status & 0x0f) | (static_cast<std::uint8_t>(c) << 4));
}
RetxCause cause_of(std::uint8_t status) { return static_cast<RetxCause>(status >> 4); }
} // namespace

Flow::Flow(const FlowParams& params) : p_(params) {
    const std::uint32_t s = std::max<std::uint32_t>(1, p_.subflows);
    p_.subflows = s;
    const std::uint32_t n = p_.message_packets;
    if (p_.scheme.is_coding()) {
        double target = std::ceil(static_cast<double>(n) * (1.0 + p_.scheme.overhead) - 1e-9);
        completion_target_ = static_cast<std::uint32_t>(target);
    } else {
        completion_target_ = n;
        tx_.resize(s);
        rx_.resize(s);
        for (std::uint32_t j = 0; j < s; ++j) {
            std::uint32_t count = j < n ? (n - j + s - 1) / s : 0;
            tx_[j].count = count;
            tx_[j].status.assign(count, 0);
            tx_[j].inflight.assign(count, 0);
            if (p_.scheme.kind == RecoveryKind::Trimming)
                tx_[j].sent_at.assign(count, 0);
            rx_[j].count = count;
            rx_[j].received.assign(count, 0);
        }
    }
    if (n == 0) {
        sender_done_ = true;
        complete_time_ = 0;
    }
}

bool Flow::has_work(SimTime) const {
    if (sender_done_)
        return false;
    if (p_.scheme.is_coding())
        return true;
    for (const auto& s : tx_)
        if (s.has_work())
            return true;
    return false;
}

std::uint32_t Flow::host_label(std::uint16_t subflow) {
    switch (p_.label_policy) {
    case LabelPolicy::Ecmp: return 0;
    case LabelPolicy::Spray: return label_counter_++;
    case LabelPolicy::Subflow: return subflow;
    case LabelPolicy::Plb: return label_;
    }
    return 0;
}

bool Flow::plb_maybe_repath(bool ecn_echo, RngStream& rng) {
    ++plb_acked_;
    if (ecn_echo)
        ++plb_marked_;
    if (plb_acked_ < p_.plb.min_packets)
        return false;
    bool bad = static_cast<double>(plb_marked_) >= p_.plb.mark_fraction * static_cast<double>(plb_acked_);
    plb_acked_ = 0;
    plb_marked_ = 0;
    if (!bad)
        return false;
    std::uint32_t fresh;
    do {
        fresh = static_cast<std::uint32_t>(rng.next_u64());
    } while (fresh == label_);
    label_ = fresh;
    ++counters_.repaths;
    return true;
}

SimTime Flow::current_rto(const SubflowSender& s) const {
    SimTime rto = p_.scheme.rto;
    for (std::uint32_t i = 0; i < s.backoff && rto < p_.scheme.rto_cap; ++i)
        rto *= 2;
    return std::min(rto, p_.scheme.rto_cap);
}

void Flow::arm_rto(TransportEnv& env, std::uint16_t sub, SimTime deadline) {
    SubflowSender& s = tx_[sub];
    s.rto_deadline = deadline;
    // Later deadlines reuse the pending event, which re-arms on firing.
    if (s.timer_at < 0 || deadline < s.timer_at) {
        s.timer_at = deadline;
        env.arm_timer(p_.id, sub, deadline);
    }
}

std::optional<SimTime> Flow::pace_and_send(TransportEnv& env) {
    const SimTime now = env.now();
    if (sender_done_)
        return std::nullopt;

    Packet pkt;
    pkt.flow = p_.id;
    pkt.src = p_.src;
    pkt.dst = p_.dst;
    pkt.size = p_.packet_bytes;
    pkt.kind = PacketKind::Data;
    pkt.sent_time = now;

    const auto s_count = static_cast<std::uint32_t>(tx_.size());
    if (p_.scheme.is_coding()) {
        std::uint64_t sym = symbols_sent_++;
        pkt.seq = static_cast<std::uint32_t>(sym);
        pkt.subflow = static_cast<std::uint16_t>(sym % p_.subflows);
    } else {
        // Retransmissions first, then new data; round robin across eligible
        // subflows. A subflow never sends faster than rate / subflows.
        int chosen = -1;
        std::uint32_t seq = 0;
        bool is_rtx = false;
        RetxCause cause = RetxCause::None;
        for (std::uint32_t pass = 0; pass < 2 && chosen < 0; ++pass) {
            for (std::uint32_t i = 0; i < s_count && chosen < 0; ++i) {
                std::uint32_t j = (rr_cursor_ + i) % s_count;
                SubflowSender& s = tx_[j];
                if (s.next_allowed > now)
                    continue;
                if (pass == 0) {
                    while (!s.rtx.empty()) {
                        std::uint32_t q = s.rtx.front();
                        s.rtx.pop_front();
                        std::uint8_t st = s.status[q];
                        s.status[q] = static_cast<std::uint8_t>(st & ~kQueued);
                        if (st & kAcked)
                            continue;
                        chosen = static_cast<int>(j);
                        seq = q;
                        is_rtx = true;
                        cause = cause_of(st);
                        break;
                    }
                } else if (s.next_new < s.count) {
                    chosen = static_cast<int>(j);
                    seq = s.next_new++;
                    is_rtx = seq < s.high_water;
                    cause = is_rtx ? cause_of(s.status[seq]) : RetxCause::None;
                }
            }
        }
        if (chosen < 0) {
            SimTime earliest = std::numeric_limits<SimTime>::max();
            for (const auto& s : tx_)
                if (s.has_work())
                    earliest = std::min(earliest, s.next_allowed);
            if (earliest == std::numeric_limits<SimTime>::max())
                return std::nullopt;
            return std::max(earliest, next_send_time_);
        }
        auto j = static_cast<std::uint16_t>(chosen);
        SubflowSender& s = tx_[j];
        if (is_rtx) {
            ++counters_.retransmits;
            pkt.set(pktflag::kRetransmit);
            if (receiver_has(j, seq) || s.inflight[seq] > 0) {
                ++counters_.spurious;
                if (cause == RetxCause::FastRetransmit)
                    ++counters_.spurious_fast;
                else if (cause == RetxCause::Timeout)
                    ++counters_.spurious_timeout;
            }
        }
        if (s.inflight[seq] < std::numeric_limits<std::uint16_t>::max())
            ++s.inflight[seq];
        if (!s.sent_at.empty())
            s.sent_at[seq] = now;
        s.high_water = std::max(s.high_water, seq + 1);
        s.next_allowed = now + p_.send_interval * static_cast<SimTime>(s_count);
        pkt.seq = seq;
        pkt.subflow = j;
        pkt.epoch = s.epoch;
        rr_cursor_ = (static_cast<std::uint32_t>(j) + 1) % s_count;
        if (s.rto_deadline < 0)
            arm_rto(env, j, now + current_rto(s));
    }

    pkt.label = host_label(pkt.subflow);
    ++counters_.sent;
    if (last_send_time_ >= 0) {
        SimTime gap = now - last_send_time_;
        if (min_gap_ < 0 || gap < min_gap_)
            min_gap_ = gap;
    }
    last_send_time_ = now;
    next_send_time_ = now + p_.send_interval;
    env.emit(pkt);

    if (!has_work(now))
        return std::nullopt;
    if (p_.scheme.is_coding())
        return next_send_time_;
    SimTime earliest = std::numeric_limits<SimTime>::max();
    for (const auto& s : tx_)
        if (s.has_work())
            earliest = std::min(earliest, s.next_allowed);
    return std::max(earliest, next_send_time_);
}

void Flow::queue_retransmit(TransportEnv& env, std::uint16_t sub, std::uint32_t seq, RetxCause cause) {
    SubflowSender& s = tx_[sub];
    if (seq >= s.count || (s.status[seq] & (kAcked | kQueued)))
        return;
    s.status[seq] = with_cause(static_cast<std::uint8_t>(s.status[seq] | kQueued), cause);
    s.rtx.push_back(seq);
    env.wake_pacer(p_.id, std::max(env.now(), next_send_time_));
}

void Flow::progress(TransportEnv& env, std::uint16_t sub) {
    SubflowSender& s = tx_[sub];
    s.backoff = 0;
    check_sender_done();
    if (sender_done_)
        return;
    if (s.outstanding())
        arm_rto(env, sub, env.now() + current_rto(s));
    else
        s.rto_deadline = -1;
}

void Flow::check_sender_done() {
    if (sender_done_)
        return;
    for (const auto& s : tx_)
        if (s.cum_ack < s.count)
            return;
    sender_done_ = true;
    for (auto& s : tx_) {
        s.rto_deadline = -1;
        s.rtx.clear();
    }
}

void Flow::on_control(TransportEnv& env, const Packet& pkt) {
    if (sender_done_)
        return;
    const bool ecn = pkt.has(pktflag::kEcn);
    const std::uint16_t sub = pkt.subflow;
    switch (pkt.kind) {
    case PacketKind::Ack:
        if (p_.label_policy == LabelPolicy::Plb)
            plb_maybe_repath(ecn, env.label_rng());
        switch (p_.scheme.kind) {
        case RecoveryKind::IdealCoding:
        case RecoveryKind::Coding:
            if (pkt.has(pktflag::kComplete))
                sender_done_ = true;
            break;
        case RecoveryKind::TcpLike:
        case RecoveryKind::RoceLike:
            on_ack_tcp(env, sub, pkt.ack, pkt.seq);
            break;
        case RecoveryKind::Trimming: {
            SubflowSender& s = tx_[sub];
            bool fresh = pkt.seq < s.count && !(s.status[pkt.seq] & kAcked);
            if (fresh)
                s.status[pkt.seq] |= kAcked;
            if (pkt.ack > s.cum_ack) {
                for (std::uint32_t i = s.cum_ack; i < pkt.ack; ++i)
                    s.status[i] |= kAcked;
                s.cum_ack = pkt.ack;
                fresh = true;
            }
            if (fresh)
                progress(env, sub);
            break;
        }
        }
        break;
    case PacketKind::Nack:
        if (p_.scheme.kind == RecoveryKind::RoceLike)
            on_nack_roce(env, sub, pkt.ack, pkt.epoch);
        else if (p_.scheme.kind == RecoveryKind::Trimming)
            on_trim_signal(env, sub, pkt.ack);
        break;
    case PacketKind::TrimmedHeader:
        if (p_.scheme.kind == RecoveryKind::Trimming)
            on_trim_signal(env, sub, pkt.seq);
        break;
    default:
        break;
    }
}

void Flow::on_ack_tcp(TransportEnv& env, std::uint16_t sub, std::uint32_t cum, std::uint32_t reported) {
    if (sender_done_)
        return;
    SubflowSender& s = tx_[sub];
    if (cum > s.cum_ack) {
        for (std::uint32_t i = s.cum_ack; i < cum && i < s.count; ++i)
            s.status[i] |= kAcked;
        s.cum_ack = std::min(cum, s.count);
        progress(env, sub);
        if (sender_done_)
            return;
    }
    if (p_.scheme.kind != RecoveryKind::TcpLike || reported < s.cum_ack || reported >= s.count ||
        (s.status[reported] & kReported))
        return;
    s.status[reported] |= kReported;

    // Keep the t highest reported sequences; the lowest of them bounds the
    // holes that now have t reports above them.
    const std::uint32_t t = p_.scheme.dupack_threshold;
    auto& top = s.top_reported;
    if (top.size() < t || reported > top.front()) {
        top.insert(std::upper_bound(top.begin(), top.end(), reported), reported);
        if (top.size() > t)
            top.erase(top.begin());
    }
    if (top.size() < t)
        return;
    const std::uint32_t bound = top.front();
    for (std::uint32_t q = std::max(s.loss_scan, s.cum_ack); q < bound; ++q) {
        if (s.status[q] & (kAcked | kReported | kMarkedLost))
            continue;
        s.status[q] |= kMarkedLost;
        ++counters_.fast_retransmits;
        queue_retransmit(env, sub, q, RetxCause::FastRetransmit);
    }
    s.loss_scan = std::max(s.loss_scan, bound);
}

void Flow::on_timer(TransportEnv& env, std::uint16_t sub) {
    SubflowSender& s = tx_[sub];
    if (env.now() != s.timer_at)
        return;  // superseded by an earlier event
    s.timer_at = -1;
    if (sender_done_ || s.rto_deadline < 0)
        return;
    if (env.now() < s.rto_deadline) {
        s.timer_at = s.rto_deadline;
        env.arm_timer(p_.id, sub, s.rto_deadline);
        return;
    }
    on_timeout(env, sub);
}

void Flow::on_timeout(TransportEnv& env, std::uint16_t sub) {
    SubflowSender& s = tx_[sub];
    const SimTime now = env.now();
    s.rto_deadline = -1;
    if (!s.outstanding())
        return;
    ++counters_.timeouts;
    switch (p_.scheme.kind) {
    case RecoveryKind::TcpLike:
        s.status[s.cum_ack] |= kMarkedLost;
        queue_retransmit(env, sub, s.cum_ack, RetxCause::Timeout);
        break;
    case RecoveryKind::Trimming:
        for (std::uint32_t q = s.cum_ack; q < s.high_water; ++q)
            if (!(s.status[q] & (kAcked | kQueued)) && s.sent_at[q] + p_.scheme.rto <= now)
                queue_retransmit(env, sub, q, RetxCause::Timeout);
        break;
    case RecoveryKind::RoceLike:
        s.next_new = std::min(s.next_new, s.cum_ack);
        for (std::uint32_t q = s.next_new; q < s.high_water; ++q)
            s.status[q] = with_cause(s.status[q], RetxCause::Timeout);
        ++s.epoch;
        env.wake_pacer(p_.id, std::max(now, next_send_time_));
        break;
    default:
        break;
    }
    if (s.backoff < 30)
        ++s.backoff;
    arm_rto(env, sub, now + current_rto(s));
}

void Flow::on_nack_roce(TransportEnv& env, std::uint16_t sub, std::uint32_t nack_seq, std::uint32_t epoch) {
    if (sender_done_)
        return;
    ++counters_.nacks;
    SubflowSender& s = tx_[sub];
    if (epoch < s.epoch || nack_seq < s.cum_ack || nack_seq >= s.count)
        return;
    if (nack_seq > s.cum_ack)
        on_ack_tcp(env, sub, nack_seq, nack_seq);
    std::uint32_t target = p_.scheme.roce_restart == RoceRestart::FromStart ? 0 : nack_seq;
    if (s.next_new > target) {
        s.next_new = target;
        for (std::uint32_t q = target; q < s.high_water; ++q)
            s.status[q] = with_cause(s.status[q], RetxCause::Nack);
    }
    ++s.epoch;
    s.last_rewind = target;
    env.wake_pacer(p_.id, std::max(env.now(), next_send_time_));
}

void Flow::on_trim_signal(TransportEnv& env, std::uint16_t sub, std::uint32_t seq) {
    if (sender_done_)
        return;
    ++counters_.trim_signals;
    SubflowSender& s = tx_[sub];
    if (seq >= s.count || (s.status[seq] & kAcked))
        return;
    auto jitter = static_cast<SimTime>(env.desync_rng().uniform01() * static_cast<double>(p_.send_interval));
    env.schedule_trim_retransmit(p_.id, sub, seq, env.now() + jitter);
}

void Flow::on_trim_retransmit(TransportEnv& env, std::uint16_t sub, std::uint32_t seq) {
    if (sender_done_)
        return;
    queue_retransmit(env, sub, seq, RetxCause::Trim);
}

Packet Flow::make_control(PacketKind kind, const Packet& trigger) const {
    Packet c;
    c.flow = p_.id;
    c.subflow = trigger.subflow;
    c.seq = trigger.seq;
    c.kind = kind;
    c.size = p_.header_bytes;
    c.src = p_.dst;
    c.dst = p_.src;
    c.label = trigger.label;
    c.epoch = trigger.epoch;
    if (trigger.has(pktflag::kEcn))
        c.set(pktflag::kEcn);
    return c;
}

std::optional<Packet> Flow::on_data(TransportEnv& env, const Packet& pkt) {
    ++counters_.delivered;
    switch (p_.scheme.kind) {
    case RecoveryKind::IdealCoding:
    case RecoveryKind::Coding:
        return on_data_coding(env, pkt);
    case RecoveryKind::RoceLike:
        return on_data_roce(env, pkt);
    default:
        return on_data_sequence(env, pkt);
    }
}

std::optional<Packet> Flow::on_data_coding(TransportEnv& env, const Packet& pkt) {
    // Every symbol is fresh, so each arrival is a distinct symbol.
    ++symbols_received_;
    if (!complete() && symbols_received_ >= completion_target_)
        complete_time_ = env.now();
    Packet ack = make_control(PacketKind::Ack, pkt);
    ack.ack = static_cast<std::uint32_t>(std::min<std::uint64_t>(symbols_received_, 0xffffffffu));
    if (complete())
        ack.set(pktflag::kComplete);
    return ack;
}

std::optional<Packet> Flow::on_data_sequence(TransportEnv& env, const Packet& pkt) {
    SubflowReceiver& r = rx_[pkt.subflow];
    if (pkt.seq < r.count && !r.received[pkt.seq]) {
        r.received[pkt.seq] = 1;
        ++r.unique;
        while (r.cum < r.count && r.received[r.cum])
            ++r.cum;
        if (!complete()) {
            bool all = true;
            for (const auto& x : rx_)
                all = all && x.unique == x.count;
            if (all)
                complete_time_ = env.now();
        }
    }
    Packet ack = make_control(PacketKind::Ack, pkt);
    ack.ack = r.cum;
    return ack;
}

std::optional<Packet> Flow::on_data_roce(TransportEnv& env, const Packet& pkt) {
    SubflowReceiver& r = rx_[pkt.subflow];
    if (pkt.seq == r.cum && r.cum < r.count) {
        r.received[pkt.seq] = 1;
        ++r.unique;
        ++r.cum;
        if (!complete()) {
            bool all = true;
            for (const auto& x : rx_)
                all = all && x.unique == x.count;
            if (all)
                complete_time_ = env.now();
        }
    } else if (pkt.seq > r.cum) {
        ++counters_.discarded;
        if (r.cum != r.last_nack_expected || pkt.epoch > r.last_nack_epoch) {
            r.last_nack_expected = r.cum;
            r.last_nack_epoch = pkt.epoch;
            Packet nack = make_control(PacketKind::Nack, pkt);
            nack.ack = r.cum;
            return nack;
        }
        return std::nullopt;
    }
    Packet ack = make_control(PacketKind::Ack, pkt);
    ack.ack = r.cum;
    return ack;
}

std::optional<Packet> Flow::on_trimmed_header(TransportEnv&, const Packet& hdr) {
    Packet nack = make_control(PacketKind::Nack, hdr);
    nack.ack = hdr.seq;
    return nack;
}

bool Flow::receiver_has(std::uint16_t sub, std::uint32_t seq) const {
    if (rx_.empty() || sub >= rx_.size() || seq >= rx_[sub].count)
        return false;
    return rx_[sub].received[seq] != 0;
}

void Flow::note_data_gone(const Packet& pkt) {
    if (tx_.empty() || pkt.subflow >= tx_.size())
        return;
    SubflowSender& s = tx_[pkt.subflow];
    if (pkt.seq < s.count && s.inflight[pkt.seq] > 0)
        --s.inflight[pkt.seq];
}

} // namespace lbsim
