// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/harness/preset.hpp"

#include <algorithm>

namespace lbsim {

using nlohmann::json;

namespace {

struct Choice {
    std::string label;
    json patch;
};
using Axis = std::vector<Choice>;

// Cross product of axes, each point the base with every chosen patch merged in.
std::vector<PresetPoint> grid(const json& base, const std::vector<Axis>& axes) {
    std::vector<PresetPoint> out{{"", base}};
    for (const Axis& axis : axes) {
        std::vector<PresetPoint> next;
        for (const PresetPoint& p : out)
            for (const Choice& c : axis) {
                PresetPoint q = p;
                q.config.merge_patch(c.patch);
                if (!c.label.empty())
                    q.label = q.label.empty() ? c.label : q.label + "," + c.label;
                next.push_back(std::move(q));
            }
        out = std::move(next);
    }
    return out;
}

json lb(const char* scheme) { return {{"lb", {{"scheme", scheme}}}}; }

const Axis& lb_all() {
    static const Axis a = {
        {"lb=ecmp", lb("ecmp")},
        {"lb=ecmp_ar", lb("ecmp_ar")},
        {"lb=subflow", {{"lb", {{"scheme", "subflow"}, {"subflows", 2}}}}},
        {"lb=flowlet_ar", lb("flowlet_ar")},
        {"lb=plb", lb("plb")},
        {"lb=host_spray", lb("host_spray")},
        {"lb=switch_spray_rr", lb("switch_spray_rr")},
        {"lb=switch_spray_ar", lb("switch_spray_ar")},
    };
    return a;
}

Axis rate_axis() {
    Axis a;
    for (int i = 1; i <= 10; ++i) {
        double c = i / 10.0;
        char buf[16];
        std::snprintf(buf, sizeof buf, "c=%.1f", c);
        a.push_back({buf, {{"rate_coefficient", c}}});
    }
    return a;
}

json perm(std::uint32_t m) { return {{"workload", {{"type", "permutations"}, {"m", m}}}}; }

Axis perm_axis(std::initializer_list<std::uint32_t> ms) {
    Axis a;
    for (auto m : ms)
        a.push_back({"m=" + std::to_string(m), perm(m)});
    return a;
}

json rec(json r) { return {{"recovery", std::move(r)}}; }

const Axis& recovery_all() {
    static const Axis a = {
        {"rec=coding", rec({{"scheme", "coding"}, {"overhead", 0.05}})},
        {"rec=tcp", rec({{"scheme", "tcp"}})},
        {"rec=roce", rec({{"scheme", "roce"}})},
        {"rec=trim", rec({{"scheme", "trim"}, {"trim_mode", "reflect"}})},
        {"rec=trim_rts", rec({{"scheme", "trim"}, {"trim_mode", "rts"}})},
    };
    return a;
}

// Subflow accounting over sprayed packets, against the best alternatives.
const Axis& subflow_contenders() {
    static const Axis a = {
        {"rec=sf_t3", rec({{"scheme", "tcp"}, {"dupack_threshold", 3}, {"subflows", "auto"}})},
        {"rec=sf_t6", rec({{"scheme", "tcp"}, {"dupack_threshold", 6}, {"subflows", "auto"}})},
        {"rec=tcp", rec({{"scheme", "tcp"}})},
        {"rec=trim", rec({{"scheme", "trim"}, {"trim_mode", "reflect"}})},
        {"rec=coding", rec({{"scheme", "coding"}, {"overhead", 0.05}})},
    };
    return a;
}

json static_fail(std::uint32_t f, double p) {
    return {{"failures", {{"mode", "static"}, {"links_per_pod", f}, {"frac_lost", p}}}};
}

const Axis& two_failure_modes() {
    static const Axis a = {
        {"fail=static", static_fail(2, 0.9)},
        {"fail=flaky",
         {{"failures", {{"mode", "flaky"}, {"links_per_pod", 2}, {"arrival_mean_us", 100.0}, {"duration_mean_us", 10.0}}}}},
    };
    return a;
}

struct Def {
    const char* name;
    const char* description;
    std::vector<PresetPoint> (*build)();
};

const json kBase = json::object();

const Def kDefs[] = {
    {"fig1_rate_sweep", "ECMP vs host spraying, ideal coding, all-to-all, rate coefficient 0.1..1.0",
     [] { return grid(kBase, {{{"lb=ecmp", lb("ecmp")}, {"lb=host_spray", lb("host_spray")}}, rate_axis()}); }},
    {"fig2_worst_flow", "losses of the worst-hit flow over the fig1 grid",
     [] { return grid(kBase, {{{"lb=ecmp", lb("ecmp")}, {"lb=host_spray", lb("host_spray")}}, rate_axis()}); }},
    {"fig3_lb_baseline", "every load balancing scheme, ideal coding, all-to-all",
     [] { return grid(kBase, {lb_all()}); }},
    {"fig4_failures", "static failures (f,p) in {(2,0.9),(4,0.6),(9,0.2)} x load balancing schemes",
     [] {
         return grid(kBase, {{{"f=2,p=0.9", static_fail(2, 0.9)}, {"f=4,p=0.6", static_fail(4, 0.6)},
                              {"f=9,p=0.2", static_fail(9, 0.2)}},
                             lb_all()});
     }},
    {"fig5_insufficient", "3 failed links per pod at 90% loss (not enough capacity) x load balancing schemes",
     [] { return grid(kBase, {{{"f=3,p=0.9", static_fail(3, 0.9)}}, lb_all()}); }},
    {"fig6_permutations", "m concurrent permutations in {1,2,4,...,127} x load balancing schemes",
     [] { return grid(kBase, {perm_axis({1, 2, 4, 8, 16, 32, 64, 127}), lb_all()}); }},
    {"fig7_bigbuffer", "400 KB port buffers, all-to-all x load balancing schemes",
     [] { return grid({{"topology", {{"buffer_bytes", 400 * 1024}}}}, {lb_all()}); }},
    {"table2", "{all-to-all, 1 permutation} x {32 KB, 400 KB} x {host, switch, switch AR spraying, ECMP}",
     [] {
         return grid(kBase, {{{"wl=ata", json::object()}, {"wl=perm", perm(1)}},
                             {{"buf=32KB", {{"topology", {{"buffer_bytes", 32 * 1024}}}}},
                              {"buf=400KB", {{"topology", {{"buffer_bytes", 400 * 1024}}}}}},
                             {{"lb=host_spray", lb("host_spray")},
                              {"lb=switch_spray_rr", lb("switch_spray_rr")},
                              {"lb=switch_spray_ar", lb("switch_spray_ar")},
                              {"lb=ecmp", lb("ecmp")}}});
     }},
    {"fig8_recovery_rates", "loss recovery schemes over rate coefficient 0.1..1.0, host spraying, all-to-all",
     [] { return grid(kBase, {recovery_all(), rate_axis()}); }},
    {"fig9_recovery_workloads", "loss recovery schemes over m in {1,2,4,8,16,40,127}, host spraying",
     [] { return grid(kBase, {perm_axis({1, 2, 4, 8, 16, 40, 127}), recovery_all()}); }},
    {"fig10_recovery_failures", "loss recovery schemes, 1 permutation, static or flaky failures on 2 links per pod",
     [] { return grid(perm(1), {two_failure_modes(), recovery_all()}); }},
    {"fig11_subflows", "subflow accounting (t=3, t=6) vs TCP, trimming, coding over m in {1,2,4,8,16,40}",
     [] { return grid(kBase, {perm_axis({1, 2, 4, 8, 16, 40}), subflow_contenders()}); }},
    {"fig12_subflow_failures", "subflow accounting vs the best alternatives under the fig10 failures",
     [] { return grid(perm(1), {two_failure_modes(), subflow_contenders()}); }},
    {"smoke_k4", "k=4 miniature of fig3_lb_baseline",
     [] { return grid({{"topology", {{"k", 4}}}}, {lb_all()}); }},
};

json parse_value(std::string_view v) {
    try {
        return json::parse(v.begin(), v.end());
    } catch (const json::parse_error&) {
        return json(std::string(v));
    }
}

} // namespace

const std::vector<std::string>& preset_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const Def& d : kDefs)
            n.emplace_back(d.name);
        return n;
    }();
    return names;
}

bool is_preset(std::string_view name) {
    const auto& n = preset_names();
    return std::find(n.begin(), n.end(), name) != n.end();
}

Preset make_preset(std::string_view name) {
    for (const Def& d : kDefs)
        if (name == d.name) {
            Preset p{d.name, d.description, d.build()};
            for (auto& pt : p.points)
                pt.config["name"] = std::string(d.name) + (pt.label.empty() ? "" : ":" + pt.label);
            return p;
        }
    std::string all;
    for (const auto& n : preset_names())
        all += (all.empty() ? "" : ", ") + n;
    throw ConfigError("unknown preset '" + std::string(name) + "' (known: " + all + ")");
}

SweepAxis parse_axis(std::string_view spec) {
    const auto eq = spec.find('=');
    if (eq == std::string_view::npos || eq == 0)
        throw ConfigError("axis '" + std::string(spec) + "': expected path=v1,v2,...");
    SweepAxis a;
    a.path = std::string(spec.substr(0, eq));
    std::string_view rest = spec.substr(eq + 1);
    while (!rest.empty()) {
        const auto comma = rest.find(',');
        std::string_view v = rest.substr(0, comma);
        if (!v.empty())
            a.values.push_back(parse_value(v));
        if (comma == std::string_view::npos)
            break;
        rest = rest.substr(comma + 1);
    }
    return a;
}

Preset make_sweep(const json& base, const std::vector<SweepAxis>& axes, std::string name) {
    std::vector<Axis> g;
    for (const SweepAxis& a : axes) {
        if (!is_scalar_path(a.path))
            throw ConfigError("sweep axis '" + a.path + "' is not a scalar field");
        if (a.values.empty())
            throw ConfigError("sweep axis '" + a.path + "' has no values");
        Axis axis;
        for (const json& v : a.values) {
            json patch = json::object();
            set_path(patch, a.path, v);
            axis.push_back({a.path + "=" + (v.is_string() ? v.get<std::string>() : v.dump()), patch});
        }
        g.push_back(std::move(axis));
    }
    Preset p{std::move(name), "sweep", grid(base.is_null() ? json::object() : base, g)};
    return p;
}

std::vector<std::pair<std::string, Scenario>>
resolve_points(const Preset& p, const std::optional<std::vector<std::uint64_t>>& seeds) {
    std::vector<std::pair<std::string, Scenario>> out;
    out.reserve(p.points.size());
    for (const PresetPoint& pt : p.points) {
        Scenario s;
        try {
            s = parse_scenario(pt.config);
        } catch (const ConfigError& e) {
            throw ConfigError(p.name + (pt.label.empty() ? "" : " [" + pt.label + "]") + ": " + e.what());
        }
        if (seeds)
            s.seeds = *seeds;
        out.emplace_back(pt.label, std::move(s));
    }
    // Paired comparisons need one seed list for the whole grid.
    for (const auto& [label, s] : out)
        if (s.seeds != out.front().second.seeds)
            throw ConfigError(p.name + " [" + label + "]: seed list differs from the first point");
    return out;
}

} // namespace lbsim
