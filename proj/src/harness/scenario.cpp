// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/harness/scenario.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <set>

namespace lbsim {

using nlohmann::json;

namespace {

struct Named {
    const char* name;
    int value;
};

constexpr Named kLbNames[] = {
    {"ecmp", static_cast<int>(LbScheme::Ecmp)},
    {"ecmp_ar", static_cast<int>(LbScheme::EcmpAr)},
    {"host_spray", static_cast<int>(LbScheme::HostSpray)},
    {"switch_spray_rr", static_cast<int>(LbScheme::SwitchSprayRr)},
    {"switch_spray_ar", static_cast<int>(LbScheme::SwitchSprayAr)},
    {"flowlet_ar", static_cast<int>(LbScheme::FlowletAr)},
    {"plb", static_cast<int>(LbScheme::Plb)},
    {"subflow", static_cast<int>(LbScheme::Subflow)},
};
constexpr Named kRecoveryNames[] = {
    {"ideal_coding", static_cast<int>(RecoveryKind::IdealCoding)},
    {"coding", static_cast<int>(RecoveryKind::Coding)},
    {"tcp", static_cast<int>(RecoveryKind::TcpLike)},
    {"roce", static_cast<int>(RecoveryKind::RoceLike)},
    {"trim", static_cast<int>(RecoveryKind::Trimming)},
};
constexpr Named kTrimNames[] = {{"reflect", 0}, {"rts", 1}};
constexpr Named kRestartNames[] = {{"nack", 0}, {"start", 1}};
constexpr Named kWorkloadNames[] = {{"all_to_all", 0}, {"permutations", 1}};
constexpr Named kFamilyNames[] = {{"random", 0}, {"shift", 1}};
constexpr Named kFailureNames[] = {{"none", 0}, {"static", 1}, {"flaky", 2}};
constexpr Named kHeaderNames[] = {{"wire", 0}, {"payload", 1}};

template <std::size_t N>
const char* name_of(const Named (&table)[N], int v) {
    for (const auto& e : table)
        if (e.value == v)
            return e.name;
    return "?";
}

template <std::size_t N>
std::string choices(const Named (&table)[N]) {
    std::string s;
    for (const auto& e : table) {
        if (!s.empty())
            s += ", ";
        s += e.name;
    }
    return s;
}

// Reads one JSON object, remembering which keys were consumed so leftovers
// can be reported as unknown.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj_.is_object())
            throw ConfigError(where() + ": expected an object");
    }

    std::string key_path(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
    std::string where() const { return path_.empty() ? "<root>" : path_; }

    bool has(const std::string& key) const { return obj_.contains(key); }

    const json* take(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    template <typename T>
    void integer(const std::string& key, T& out, std::uint64_t lo = 0,
                 std::uint64_t hi = std::numeric_limits<T>::max()) {
        const json* v = take(key);
        if (!v)
            return;
        if (!v->is_number_integer())
            throw ConfigError(key_path(key) + ": expected an integer");
        if (v->is_number_unsigned()) {
            auto x = v->get<std::uint64_t>();
            if (x < lo || x > hi)
                throw ConfigError(key_path(key) + ": " + std::to_string(x) + " out of range [" +
                                  std::to_string(lo) + ", " + std::to_string(hi) + "]");
            out = static_cast<T>(x);
            return;
        }
        auto x = v->get<std::int64_t>();
        if (x < 0 || static_cast<std::uint64_t>(x) < lo || static_cast<std::uint64_t>(x) > hi)
            throw ConfigError(key_path(key) + ": " + std::to_string(x) + " out of range [" + std::to_string(lo) +
                              ", " + std::to_string(hi) + "]");
        out = static_cast<T>(x);
    }

    void number(const std::string& key, double& out) {
        const json* v = take(key);
        if (!v)
            return;
        if (!v->is_number())
            throw ConfigError(key_path(key) + ": expected a number");
        out = v->get<double>();
        if (!std::isfinite(out))
            throw ConfigError(key_path(key) + ": must be finite");
    }

    template <std::size_t N>
    bool choice(const std::string& key, const Named (&table)[N], int& out) {
        const json* v = take(key);
        if (!v)
            return false;
        if (!v->is_string())
            throw ConfigError(key_path(key) + ": expected one of " + choices(table));
        auto s = v->get<std::string>();
        for (const auto& e : table)
            if (s == e.name) {
                out = e.value;
                return true;
            }
        throw ConfigError(key_path(key) + ": unknown value '" + s + "' (expected one of " + choices(table) + ")");
    }

    // Rejects a key that is present but meaningless in this context.
    void forbid(const std::string& key, const std::string& why) {
        if (has(key))
            throw ConfigError(key_path(key) + ": not allowed " + why);
        seen_.insert(key);
    }

    void finish() const {
        for (auto it = obj_.begin(); it != obj_.end(); ++it)
            if (!seen_.count(it.key()))
                throw ConfigError(key_path(it.key()) + ": unknown key");
    }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

void need(bool ok, const std::string& path, const std::string& msg) {
    if (!ok)
        throw ConfigError(path + ": " + msg);
}

} // namespace

std::string_view to_string(LbScheme s) { return name_of(kLbNames, static_cast<int>(s)); }

LbScheme parse_lb_scheme(std::string_view s) {
    for (const auto& e : kLbNames)
        if (s == e.name)
            return static_cast<LbScheme>(e.value);
    throw ConfigError("unknown load balancing scheme '" + std::string(s) + "'");
}

// ---- derived quantities ----

std::uint32_t Scenario::flows_per_host() const {
    return workload.type == WorkloadKind::AllToAll ? hosts() - 1 : workload.m;
}

std::uint32_t Scenario::resolved_subflows() const {
    if (lb.scheme == LbScheme::Subflow)
        return lb.subflows;
    if (recovery.kind != RecoveryKind::TcpLike)
        return 1;
    if (recovery.subflows_auto) {
        auto q = static_cast<std::uint32_t>(topology.buffer_bytes / topology.packet_bytes);
        return compute_subflows(std::max<std::uint32_t>(q, 1), recovery.dupack_threshold, flows_per_host());
    }
    return recovery.subflows;
}

LabelPolicy Scenario::label_policy() const {
    switch (lb.scheme) {
    case LbScheme::HostSpray: return LabelPolicy::Spray;
    case LbScheme::Plb: return LabelPolicy::Plb;
    case LbScheme::Subflow: return LabelPolicy::Subflow;
    default: return LabelPolicy::Ecmp;
    }
}

NetworkConfig Scenario::network_config() const {
    NetworkConfig c;
    switch (lb.scheme) {
    case LbScheme::EcmpAr: c.switch_lb = SwitchLb::EcmpAr; break;
    case LbScheme::SwitchSprayRr: c.switch_lb = SwitchLb::RoundRobin; break;
    case LbScheme::SwitchSprayAr: c.switch_lb = SwitchLb::Adaptive; break;
    case LbScheme::FlowletAr: c.switch_lb = SwitchLb::Flowlet; break;
    default: c.switch_lb = SwitchLb::Hash; break;
    }
    c.flowlet_gap = from_us(lb.flowlet_gap_us);
    c.ecmp_ar_remap = lb.ecmp_ar_remap_fraction;
    c.pfc = recovery.kind == RecoveryKind::RoceLike;
    return c;
}

RecoveryScheme Scenario::recovery_scheme() const {
    RecoveryScheme r;
    r.kind = recovery.kind;
    r.overhead = recovery.kind == RecoveryKind::Coding ? recovery.overhead : 0.0;
    r.dupack_threshold = recovery.dupack_threshold;
    r.rto = from_us(recovery.rto_us);
    r.rto_cap = from_us(recovery.rto_cap_us);
    r.trim_mode = recovery.trim_mode;
    r.roce_restart = recovery.roce_restart;
    return r;
}

LinkSpec Scenario::link_spec() const {
    LinkSpec spec;
    spec.rate_bps = static_cast<std::uint64_t>(std::llround(link_rate_bps()));
    spec.latency = from_ns(topology.latency_ns);
    QueueConfig& q = spec.switch_queue;
    q.capacity_bytes = topology.buffer_bytes;
    q.control_headroom_bytes = topology.control_headroom_bytes;
    q.ecn_threshold = topology.ecn_threshold;
    q.header_bytes = topology.header_bytes;
    q.trim_enabled = recovery.kind == RecoveryKind::Trimming;
    q.trim_bounce = q.trim_enabled && recovery.trim_mode == TrimMode::ReturnToSender;
    q.lossless = recovery.kind == RecoveryKind::RoceLike;
    return spec;
}

SimTime Scenario::send_interval() const {
    const auto rate = static_cast<std::uint64_t>(std::llround(link_rate_bps()));
    unsigned __int128 bits = static_cast<unsigned __int128>(topology.packet_bytes) * 8ULL * 1'000'000'000'000ULL;
    auto line = static_cast<SimTime>((bits + rate - 1) / rate);
    return static_cast<SimTime>(std::llround(static_cast<double>(line) * flows_per_host() / rate_coefficient));
}

bool Scenario::capacity_sufficient() const {
    double p = failures.mode == FailureMode::Static ? failures.frac_lost : 0.0;
    double f = failures.mode == FailureMode::Static ? failures.links_per_pod : 0.0;
    return check_capacity(topology.k, f, p);
}

// ---- parsing ----

Scenario parse_scenario(const json& root) {
    Scenario s;
    ObjectReader r(root, "");
    if (const json* v = r.take("name")) {
        need(v->is_string(), "name", "expected a string");
        s.name = v->get<std::string>();
    }

    if (const json* v = r.take("topology")) {
        ObjectReader t(*v, "topology");
        t.integer("k", s.topology.k, 4, 64);
        t.number("link_rate_gbps", s.topology.link_rate_gbps);
        t.number("latency_ns", s.topology.latency_ns);
        t.integer("buffer_bytes", s.topology.buffer_bytes, 1);
        t.integer("packet_bytes", s.topology.packet_bytes, 1);
        t.integer("header_bytes", s.topology.header_bytes, 1);
        t.integer("control_headroom_bytes", s.topology.control_headroom_bytes, 1);
        t.number("ecn_threshold", s.topology.ecn_threshold);
        t.finish();
    }

    if (const json* v = r.take("workload")) {
        ObjectReader w(*v, "workload");
        int type = 0;
        w.choice("type", kWorkloadNames, type);
        s.workload.type = static_cast<WorkloadKind>(type);
        w.integer("message_packets", s.workload.message_packets, 1);
        if (s.workload.type == WorkloadKind::Permutations) {
            w.integer("m", s.workload.m, 1);
            int fam = 0;
            if (w.choice("permutation_family", kFamilyNames, fam))
                s.workload.family = static_cast<PermutationFamily>(fam);
        } else {
            w.forbid("m", "for an all_to_all workload");
            w.forbid("permutation_family", "for an all_to_all workload");
        }
        w.finish();
    }

    if (const json* v = r.take("lb")) {
        ObjectReader l(*v, "lb");
        std::string sch = "host_spray";
        if (const json* x = l.take("scheme")) {
            need(x->is_string(), "lb.scheme", "expected one of " + choices(kLbNames));
            sch = x->get<std::string>();
            try {
                s.lb.scheme = parse_lb_scheme(sch);
            } catch (const ConfigError&) {
                throw ConfigError("lb.scheme: unknown value '" + sch + "' (expected one of " + choices(kLbNames) + ")");
            }
        }
        const std::string ctx = "with lb.scheme=" + std::string(to_string(s.lb.scheme));
        if (s.lb.scheme == LbScheme::Subflow)
            l.integer("subflows", s.lb.subflows, 1, 255);
        else
            l.forbid("subflows", ctx);
        if (s.lb.scheme == LbScheme::FlowletAr)
            l.number("flowlet_gap_us", s.lb.flowlet_gap_us);
        else
            l.forbid("flowlet_gap_us", ctx);
        if (s.lb.scheme == LbScheme::EcmpAr)
            l.number("ecmp_ar_remap_fraction", s.lb.ecmp_ar_remap_fraction);
        else
            l.forbid("ecmp_ar_remap_fraction", ctx);
        if (s.lb.scheme == LbScheme::Plb) {
            l.integer("plb_min_packets", s.lb.plb_min_packets, 1);
            l.number("plb_mark_fraction", s.lb.plb_mark_fraction);
        } else {
            l.forbid("plb_min_packets", ctx);
            l.forbid("plb_mark_fraction", ctx);
        }
        l.finish();
    }

    if (const json* v = r.take("recovery")) {
        ObjectReader rc(*v, "recovery");
        int kind = static_cast<int>(RecoveryKind::IdealCoding);
        rc.choice("scheme", kRecoveryNames, kind);
        s.recovery.kind = static_cast<RecoveryKind>(kind);
        const std::string ctx = "with recovery.scheme=" + std::string(to_string(s.recovery.kind));
        const bool coding = s.recovery.kind == RecoveryKind::Coding;
        const bool ideal = s.recovery.kind == RecoveryKind::IdealCoding;
        const bool tcp = s.recovery.kind == RecoveryKind::TcpLike;
        if (coding)
            rc.number("overhead", s.recovery.overhead);
        else
            rc.forbid("overhead", ctx);
        if (tcp) {
            rc.integer("dupack_threshold", s.recovery.dupack_threshold, 1, 1u << 20);
            if (const json* x = rc.take("subflows")) {
                if (x->is_string() && x->get<std::string>() == "auto") {
                    s.recovery.subflows_auto = true;
                } else {
                    need(x->is_number_integer() && x->get<std::int64_t>() >= 1 && x->get<std::int64_t>() <= 255,
                         "recovery.subflows", "expected an integer in [1, 255] or \"auto\"");
                    s.recovery.subflows = x->get<std::uint32_t>();
                }
            }
        } else {
            rc.forbid("dupack_threshold", ctx);
            rc.forbid("subflows", ctx);
        }
        if (coding || ideal) {
            rc.forbid("rto_us", ctx);
            rc.forbid("rto_cap_us", ctx);
        } else {
            rc.number("rto_us", s.recovery.rto_us);
            rc.number("rto_cap_us", s.recovery.rto_cap_us);
        }
        int tm = 0;
        if (s.recovery.kind == RecoveryKind::Trimming) {
            if (rc.choice("trim_mode", kTrimNames, tm))
                s.recovery.trim_mode = static_cast<TrimMode>(tm);
        } else {
            rc.forbid("trim_mode", ctx);
        }
        int rr = 0;
        if (s.recovery.kind == RecoveryKind::RoceLike) {
            if (rc.choice("roce_restart", kRestartNames, rr))
                s.recovery.roce_restart = static_cast<RoceRestart>(rr);
        } else {
            rc.forbid("roce_restart", ctx);
        }
        rc.finish();
    }
    if (s.lb.scheme == LbScheme::Subflow && (s.recovery.subflows_auto || s.recovery.subflows != 1))
        throw ConfigError("recovery.subflows: not allowed with lb.scheme=subflow (use lb.subflows)");

    r.number("rate_coefficient", s.rate_coefficient);

    if (const json* v = r.take("failures")) {
        ObjectReader f(*v, "failures");
        int mode = 0;
        f.choice("mode", kFailureNames, mode);
        s.failures.mode = static_cast<FailureMode>(mode);
        const std::string ctx = "with failures.mode=" + std::string(name_of(kFailureNames, mode));
        if (s.failures.mode == FailureMode::None)
            f.forbid("links_per_pod", ctx);
        else
            f.integer("links_per_pod", s.failures.links_per_pod);
        if (s.failures.mode == FailureMode::Static)
            f.number("frac_lost", s.failures.frac_lost);
        else
            f.forbid("frac_lost", ctx);
        if (s.failures.mode == FailureMode::Flaky) {
            f.number("arrival_mean_us", s.failures.arrival_mean_us);
            f.number("duration_mean_us", s.failures.duration_mean_us);
        } else {
            f.forbid("arrival_mean_us", ctx);
            f.forbid("duration_mean_us", ctx);
        }
        f.finish();
    }

    const json* seeds = r.take("seeds");
    const json* num = r.take("num_seeds");
    if (seeds && num)
        throw ConfigError("num_seeds: not allowed together with seeds");
    if (seeds) {
        need(seeds->is_array() && !seeds->empty(), "seeds", "expected a non-empty array of integers");
        s.seeds.clear();
        for (std::size_t i = 0; i < seeds->size(); ++i) {
            const json& e = (*seeds)[i];
            need(e.is_number_integer() && e.get<std::int64_t>() >= 0, "seeds[" + std::to_string(i) + "]",
                 "expected a non-negative integer");
            s.seeds.push_back(e.get<std::uint64_t>());
        }
    }
    if (num) {
        need(num->is_number_integer() && num->get<std::int64_t>() >= 1, "num_seeds", "expected an integer >= 1");
        s.seeds.clear();
        for (std::uint64_t i = 1; i <= num->get<std::uint64_t>(); ++i)
            s.seeds.push_back(i);
    }

    if (const json* v = r.take("caps")) {
        ObjectReader c(*v, "caps");
        c.integer("max_events", s.caps.max_events, 1);
        c.number("max_sim_time_ms", s.caps.max_sim_time_ms);
        c.finish();
    }
    if (const json* v = r.take("metrics")) {
        ObjectReader m(*v, "metrics");
        int h = 0;
        if (m.choice("ideal_header_accounting", kHeaderNames, h))
            s.ideal_payload_only = h == 1;
        m.finish();
    }
    r.finish();
    validate(s);
    return s;
}

Scenario parse_scenario_text(std::string_view text) {
    json j;
    try {
        j = json::parse(text.begin(), text.end(), nullptr, true, true);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (j.is_null())
        j = json::object();
    return parse_scenario(j);
}

void validate(const Scenario& s) {
    const auto& t = s.topology;
    need(t.k >= 4 && t.k % 2 == 0 && t.k <= 64, "topology.k", "must be even and in [4, 64]");
    need(t.link_rate_gbps > 0.0, "topology.link_rate_gbps", "must be positive");
    need(t.latency_ns >= 0.0, "topology.latency_ns", "must be >= 0");
    need(t.header_bytes < t.packet_bytes, "topology.header_bytes", "must be smaller than packet_bytes");
    need(t.buffer_bytes >= t.packet_bytes, "topology.buffer_bytes", "must hold at least one packet");
    need(t.control_headroom_bytes >= t.header_bytes, "topology.control_headroom_bytes",
         "must hold at least one header");
    need(t.ecn_threshold > 0.0 && t.ecn_threshold <= 1.0, "topology.ecn_threshold", "must be in (0, 1]");

    const auto& w = s.workload;
    need(w.message_packets >= 1, "workload.message_packets", "must be >= 1");
    if (w.type == WorkloadKind::Permutations) {
        need(w.m >= 1, "workload.m", "must be >= 1");
        if (w.family == PermutationFamily::Shift)
            need(w.m <= s.hosts() - 1, "workload.m", "shift family allows at most hosts-1 matrices");
    }

    need(s.lb.subflows >= 1 && s.lb.subflows <= 255, "lb.subflows", "must be in [1, 255]");
    need(s.lb.flowlet_gap_us > 0.0, "lb.flowlet_gap_us", "must be positive");
    need(s.lb.ecmp_ar_remap_fraction >= 0.0 && s.lb.ecmp_ar_remap_fraction <= 1.0, "lb.ecmp_ar_remap_fraction",
         "must be in [0, 1]");
    need(s.lb.plb_min_packets >= 1, "lb.plb_min_packets", "must be >= 1");
    need(s.lb.plb_mark_fraction >= 0.0 && s.lb.plb_mark_fraction <= 1.0, "lb.plb_mark_fraction",
         "must be in [0, 1]");

    const auto& r = s.recovery;
    need(r.overhead >= 0.0, "recovery.overhead", "must be >= 0");
    need(r.dupack_threshold >= 1, "recovery.dupack_threshold", "must be >= 1");
    need(r.rto_us > 0.0, "recovery.rto_us", "must be positive");
    need(r.rto_cap_us >= r.rto_us, "recovery.rto_cap_us", "must be >= rto_us");
    need(r.subflows >= 1 && r.subflows <= 255, "recovery.subflows", "must be in [1, 255]");
    need(s.resolved_subflows() <= 255, "recovery.subflows", "resolves above 255");

    need(s.rate_coefficient > 0.0 && s.rate_coefficient <= 1.0, "rate_coefficient", "must be in (0, 1]");

    const auto& f = s.failures;
    const std::uint32_t uplinks = t.k * t.k / 4;
    need(f.links_per_pod <= uplinks, "failures.links_per_pod",
         "at most " + std::to_string(uplinks) + " pod-to-core links per pod");
    need(f.frac_lost >= 0.0 && f.frac_lost < 1.0, "failures.frac_lost", "must be in [0, 1)");
    need(f.arrival_mean_us > 0.0, "failures.arrival_mean_us", "must be positive");
    need(f.duration_mean_us >= 0.0, "failures.duration_mean_us", "must be >= 0");

    need(!s.seeds.empty(), "seeds", "need at least one seed");
    need(s.caps.max_events >= 1, "caps.max_events", "must be >= 1");
    need(s.caps.max_sim_time_ms >= 0.0, "caps.max_sim_time_ms", "must be >= 0");
}

// ---- canonical form ----

json to_json(const Scenario& s, bool with_seeds) {
    json j;
    j["topology"] = {
        {"k", s.topology.k},
        {"link_rate_gbps", s.topology.link_rate_gbps},
        {"latency_ns", s.topology.latency_ns},
        {"buffer_bytes", s.topology.buffer_bytes},
        {"packet_bytes", s.topology.packet_bytes},
        {"header_bytes", s.topology.header_bytes},
        {"control_headroom_bytes", s.topology.control_headroom_bytes},
        {"ecn_threshold", s.topology.ecn_threshold},
    };
    json w = {{"type", name_of(kWorkloadNames, static_cast<int>(s.workload.type))},
              {"message_packets", s.workload.message_packets}};
    if (s.workload.type == WorkloadKind::Permutations) {
        w["m"] = s.workload.m;
        w["permutation_family"] = name_of(kFamilyNames, static_cast<int>(s.workload.family));
    }
    j["workload"] = w;

    json l = {{"scheme", std::string(to_string(s.lb.scheme))}};
    switch (s.lb.scheme) {
    case LbScheme::Subflow: l["subflows"] = s.lb.subflows; break;
    case LbScheme::FlowletAr: l["flowlet_gap_us"] = s.lb.flowlet_gap_us; break;
    case LbScheme::EcmpAr: l["ecmp_ar_remap_fraction"] = s.lb.ecmp_ar_remap_fraction; break;
    case LbScheme::Plb:
        l["plb_min_packets"] = s.lb.plb_min_packets;
        l["plb_mark_fraction"] = s.lb.plb_mark_fraction;
        break;
    default: break;
    }
    j["lb"] = l;

    json r = {{"scheme", std::string(to_string(s.recovery.kind))}};
    switch (s.recovery.kind) {
    case RecoveryKind::Coding: r["overhead"] = s.recovery.overhead; break;
    case RecoveryKind::TcpLike:
        r["dupack_threshold"] = s.recovery.dupack_threshold;
        if (s.recovery.subflows_auto)
            r["subflows"] = "auto";
        else
            r["subflows"] = s.recovery.subflows;
        break;
    case RecoveryKind::Trimming: r["trim_mode"] = name_of(kTrimNames, static_cast<int>(s.recovery.trim_mode)); break;
    case RecoveryKind::RoceLike:
        r["roce_restart"] = name_of(kRestartNames, static_cast<int>(s.recovery.roce_restart));
        break;
    default: break;
    }
    if (!s.recovery_scheme().is_coding()) {
        r["rto_us"] = s.recovery.rto_us;
        r["rto_cap_us"] = s.recovery.rto_cap_us;
    }
    j["recovery"] = r;
    j["rate_coefficient"] = s.rate_coefficient;

    json f = {{"mode", name_of(kFailureNames, static_cast<int>(s.failures.mode))}};
    if (s.failures.mode != FailureMode::None)
        f["links_per_pod"] = s.failures.links_per_pod;
    if (s.failures.mode == FailureMode::Static)
        f["frac_lost"] = s.failures.frac_lost;
    if (s.failures.mode == FailureMode::Flaky) {
        f["arrival_mean_us"] = s.failures.arrival_mean_us;
        f["duration_mean_us"] = s.failures.duration_mean_us;
    }
    j["failures"] = f;
    j["caps"] = {{"max_events", s.caps.max_events}, {"max_sim_time_ms", s.caps.max_sim_time_ms}};
    j["metrics"] = {{"ideal_header_accounting", s.ideal_payload_only ? "payload" : "wire"}};
    if (with_seeds)
        j["seeds"] = s.seeds;
    return j;
}

std::string scenario_hash(const Scenario& s) {
    const std::string text = to_json(s, false).dump();
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

const std::vector<std::string>& scalar_paths() {
    static const std::vector<std::string> paths = {
        "topology.k", "topology.link_rate_gbps", "topology.latency_ns", "topology.buffer_bytes",
        "topology.packet_bytes", "topology.header_bytes", "topology.control_headroom_bytes",
        "topology.ecn_threshold", "workload.type", "workload.m", "workload.message_packets",
        "workload.permutation_family", "lb.scheme", "lb.subflows", "lb.flowlet_gap_us",
        "lb.ecmp_ar_remap_fraction", "lb.plb_min_packets", "lb.plb_mark_fraction", "recovery.scheme",
        "recovery.overhead", "recovery.dupack_threshold", "recovery.rto_us", "recovery.rto_cap_us",
        "recovery.subflows", "recovery.trim_mode", "recovery.roce_restart", "rate_coefficient",
        "failures.mode", "failures.links_per_pod", "failures.frac_lost", "failures.arrival_mean_us",
        "failures.duration_mean_us", "caps.max_events", "caps.max_sim_time_ms",
        "metrics.ideal_header_accounting", "num_seeds",
    };
    return paths;
}

bool is_scalar_path(std::string_view path) {
    for (const auto& p : scalar_paths())
        if (p == path)
            return true;
    return false;
}

void set_path(json& j, std::string_view path, const json& value) {
    json* cur = &j;
    std::size_t start = 0;
    for (;;) {
        std::size_t dot = path.find('.', start);
        std::string key(path.substr(start, dot == std::string_view::npos ? std::string_view::npos : dot - start));
        if (dot == std::string_view::npos) {
            (*cur)[key] = value;
            return;
        }
        if (!cur->contains(key) || !(*cur)[key].is_object())
            (*cur)[key] = json::object();
        cur = &(*cur)[key];
        start = dot + 1;
    }
}

} // namespace lbsim
