// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
// Acceptance checks, one PASS/FAIL line per criterion.
//
// LBSIM_ACCEPT_SEEDS       seeds for the k=8 all-to-all grids (default 3)
// LBSIM_ACCEPT_PERM_SEEDS  seeds for the 1-permutation checks (default 10)
// LBSIM_ACCEPT_ONLY        comma list of criteria to run, e.g. "A1,A5"

#include <algorithm>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "lbsim/harness/runner.hpp"
#include "lbsim/topology/fat_tree.hpp"
#include "lbsim/transport/recovery.hpp"
#include "lbsim/workload/traffic.hpp"

using namespace lbsim;
using nlohmann::json;

namespace {

std::uint32_t env_count(const char* name, std::uint32_t dflt) {
    const char* v = std::getenv(name);
    if (!v || !*v)
        return dflt;
    return static_cast<std::uint32_t>(std::max(1L, std::strtol(v, nullptr, 10)));
}

std::vector<std::uint64_t> seeds_1_to(std::uint32_t n) {
    std::vector<std::uint64_t> s;
    for (std::uint32_t i = 1; i <= n; ++i)
        s.push_back(i);
    return s;
}

const std::vector<std::uint64_t> kHeavy = seeds_1_to(env_count("LBSIM_ACCEPT_SEEDS", 3));
const std::vector<std::uint64_t> kPerm = seeds_1_to(env_count("LBSIM_ACCEPT_PERM_SEEDS", 10));

bool selected(const std::string& id) {
    const char* v = std::getenv("LBSIM_ACCEPT_ONLY");
    if (!v || !*v)
        return true;
    std::stringstream ss(v);
    std::string tok;
    while (std::getline(ss, tok, ','))
        if (tok == id)
            return true;
    return false;
}

// Sample statistics, kept here rather than borrowed from the library.
double mean(const std::vector<double>& v) {
    double s = 0;
    for (double x : v)
        s += x;
    return v.empty() ? NAN : s / static_cast<double>(v.size());
}

double sd(const std::vector<double>& v) {
    if (v.size() < 2)
        return 0.0;
    const double m = mean(v);
    double s = 0;
    for (double x : v)
        s += (x - m) * (x - m);
    return std::sqrt(s / static_cast<double>(v.size() - 1));
}

// Every run of the process, keyed by resolved scenario and seed. Criteria
// share runs through it; A11 audits all of them at the end.
std::map<std::string, RunMetrics> g_cache;
std::vector<std::string> g_order;

std::string key_of(const Scenario& s, std::uint64_t seed) { return to_json(s, false).dump() + "#" + std::to_string(seed); }

// Runs every (config, seed) not yet cached as one batch.
void prefetch(const std::vector<json>& cfgs, const std::vector<std::uint64_t>& seeds) {
    std::vector<RunJob> jobs;
    std::set<std::string> pending;
    for (const json& c : cfgs) {
        Scenario s = parse_scenario(c);
        s.seeds = seeds;
        for (auto seed : seeds) {
            std::string k = key_of(s, seed);
            if (g_cache.count(k) || !pending.insert(k).second)
                continue;
            jobs.push_back({s, seed, "acceptance", c.dump()});
        }
    }
    if (jobs.empty())
        return;
    auto results = run_batch_parallel(jobs, 0, [](const RunResult& r, std::size_t done, std::size_t total) {
        std::fprintf(stderr, "  [%zu/%zu] %s seed %llu: %s norm %.4f (%.0f s)%s%s\n", done, total,
                     r.job.point.c_str(), static_cast<unsigned long long>(r.job.seed),
                     std::string(to_string(r.metrics.status)).c_str(), r.metrics.normalized_cct,
                     r.metrics.runtime_wall_ms / 1000.0, r.error.empty() ? "" : " error: ", r.error.c_str());
    });
    for (auto& r : results) {
        std::string k = key_of(r.job.scenario, r.job.seed);
        if (!r.error.empty())
            r.metrics.status = RunStatus::Failed;
        g_order.push_back(k);
        r.metrics.per_flow.clear();
        r.metrics.per_flow.shrink_to_fit();
        g_cache.emplace(std::move(k), std::move(r.metrics));
    }
}

std::vector<RunMetrics> runs(const json& cfg, const std::vector<std::uint64_t>& seeds) {
    prefetch({cfg}, seeds);
    Scenario s = parse_scenario(cfg);
    std::vector<RunMetrics> out;
    for (auto seed : seeds)
        out.push_back(g_cache.at(key_of(s, seed)));
    return out;
}

template <class F>
std::vector<double> field(const std::vector<RunMetrics>& rs, F f) {
    std::vector<double> v;
    for (const auto& r : rs)
        v.push_back(static_cast<double>(f(r)));
    return v;
}

// Normalized CCT of each run; an unfinished run counts as infinitely slow.
std::vector<double> ncct(const std::vector<RunMetrics>& rs) {
    return field(rs, [](const RunMetrics& m) {
        return m.status == RunStatus::Complete ? m.normalized_cct : INFINITY;
    });
}

double mean_ncct(const json& cfg, const std::vector<std::uint64_t>& seeds) { return mean(ncct(runs(cfg, seeds))); }

json with(json base, const json& patch) {
    base.merge_patch(patch);
    return base;
}

json lb(const char* scheme) { return {{"lb", {{"scheme", scheme}}}}; }
json perm(std::uint32_t m) { return {{"workload", {{"type", "permutations"}, {"m", m}}}}; }
json rec(json r) { return {{"recovery", std::move(r)}}; }

struct Line {
    std::string id;
    bool pass;
    std::string detail;
};
std::vector<Line> g_lines;

void report(const std::string& id, bool pass, const std::string& detail) {
    std::printf("%s %s: %s\n", pass ? "PASS" : "FAIL", id.c_str(), detail.c_str());
    std::fflush(stdout);
    g_lines.push_back({id, pass, detail});
}

std::string fmt(const char* f, ...) __attribute__((format(printf, 1, 2)));
std::string fmt(const char* f, ...) {
    char buf[2048];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

// ---------------------------------------------------------------------------

void a1() {
    const bool suff = check_capacity(8, 2, 0.9);
    const bool insuff = !check_capacity(8, 3, 0.9);
    report("A1", suff && insuff,
           fmt("(8,2,0.9) %s, (8,3,0.9) %s", suff ? "sufficient" : "insufficient",
               insuff ? "insufficient" : "sufficient"));
}

void a2() {
    const std::uint32_t a = compute_subflows(8, 3, 1), b = compute_subflows(8, 6, 1), c = compute_subflows(8, 3, 40);
    report("A2", a == 11 && b == 6 && c == 1, fmt("(8,3,1)=%u (8,6,1)=%u (8,3,40)=%u, want 11 6 1", a, b, c));
}

void a3() {
    const json base = with(perm(1), rec({{"scheme", "tcp"}, {"dupack_threshold", 3}}));
    const json s11 = with(base, rec({{"subflows", 11}})), s1 = with(base, rec({{"subflows", 1}}));
    prefetch({s11, s1}, kPerm);
    std::uint64_t fast11 = 0;
    for (const auto& m : runs(s11, kPerm))
        fast11 += m.spurious_fast;
    const double per_flow1 = mean(field(runs(s1, kPerm), [](const RunMetrics& m) { return m.mean_spurious_per_flow(); }));
    report("A3", fast11 == 0 && per_flow1 >= 30.0,
           fmt("s=11 reordering-only spurious over %zu seeds = %llu (want 0); s=1 spurious per flow %.1f (want >= 30)",
               kPerm.size(), static_cast<unsigned long long>(fast11), per_flow1));
}

const char* const kLbAll[] = {"ecmp", "ecmp_ar", "flowlet_ar", "plb", "host_spray", "switch_spray_rr", "switch_spray_ar"};

// Spraying within 5% of itself, best spraying < flowlet and PLB < ECMP.
bool lb_ordering(const json& base, const std::vector<std::uint64_t>& seeds, std::map<std::string, double>& mu) {
    std::vector<json> cfgs;
    for (const char* s : kLbAll)
        cfgs.push_back(with(base, lb(s)));
    prefetch(cfgs, seeds);
    for (const char* s : kLbAll)
        mu[s] = mean_ncct(with(base, lb(s)), seeds);
    const double spray_lo = std::min({mu["host_spray"], mu["switch_spray_rr"], mu["switch_spray_ar"]});
    const double spray_hi = std::max({mu["host_spray"], mu["switch_spray_rr"], mu["switch_spray_ar"]});
    const double mid_lo = std::min(mu["flowlet_ar"], mu["plb"]);
    const double mid_hi = std::max(mu["flowlet_ar"], mu["plb"]);
    return spray_hi <= 1.05 * spray_lo && spray_lo < mid_lo && mid_hi < mu["ecmp"];
}

std::string lb_detail(std::map<std::string, double>& mu) {
    std::string d;
    for (const char* s : kLbAll)
        d += fmt("%s%s %.3f", d.empty() ? "" : ", ", s, mu[s]);
    return d;
}

void a4() {
    std::map<std::string, double> k4;
    const bool small = lb_ordering({{"topology", {{"k", 4}}}}, kPerm, k4);
    std::map<std::string, double> k8;
    const bool order = lb_ordering(json::object(), kHeavy, k8);
    const bool ecmp_band = k8["ecmp"] >= 1.25 && k8["ecmp"] <= 1.60;
    const bool host_band = k8["host_spray"] >= 1.10 && k8["host_spray"] <= 1.40;
    report("A4", small && order && ecmp_band && host_band,
           fmt("k=8 ordering %s, ECMP %.3f in [1.25,1.60] %s, host spray %.3f in [1.10,1.40] %s; k=4 ordering %s | "
               "k=8: %s | k=4: %s",
               order ? "ok" : "violated", k8["ecmp"], ecmp_band ? "yes" : "no", k8["host_spray"],
               host_band ? "yes" : "no", small ? "ok" : "violated", lb_detail(k8).c_str(), lb_detail(k4).c_str()));
}

void a5() {
    const json e = with(perm(1), lb("ecmp")), h = with(perm(1), lb("host_spray"));
    prefetch({e, h}, kPerm);
    const auto ve = ncct(runs(e, kPerm)), vh = ncct(runs(h, kPerm));
    const bool pass = mean(ve) >= 3.0 && sd(ve) >= 0.2 && mean(vh) <= 1.6;
    report("A5", pass,
           fmt("ECMP %.3f +- %.3f (want mean >= 3.0, sd >= 0.2); host spray %.3f (want <= 1.6)", mean(ve), sd(ve),
               mean(vh)));
}

void a6() {
    const json big = {{"topology", {{"buffer_bytes", 400 * 1024}}}};
    const json h32 = lb("host_spray"), h400 = with(big, lb("host_spray"));
    const json e32 = lb("ecmp"), e400 = with(big, lb("ecmp"));
    prefetch({h32, h400, e32, e400}, kHeavy);
    const auto a = ncct(runs(h32, kHeavy)), b = ncct(runs(h400, kHeavy));
    bool paired = true;
    for (std::size_t i = 0; i < a.size(); ++i)
        paired = paired && b[i] < a[i];
    const auto c = ncct(runs(e32, kHeavy)), d = ncct(runs(e400, kHeavy));
    const double band = std::max(sd(c), sd(d));
    const bool ecmp_within = std::fabs(mean(d) - mean(c)) <= band;
    report("A6", mean(b) <= 1.12 && paired && ecmp_within,
           fmt("host spray 400KB %.3f (want <= 1.12), 32KB %.3f, better on every paired seed %s; ECMP 32KB %.3f, "
               "400KB %.3f, |delta| %.3f vs sd band %.3f",
               mean(b), mean(a), paired ? "yes" : "no", mean(c), mean(d), std::fabs(mean(d) - mean(c)), band));
}

void a7() {
    const double rates[] = {0.6, 0.8, 1.0};
    auto at = [](const char* scheme, double c) { return with(lb(scheme), {{"rate_coefficient", c}}); };
    std::vector<json> cfgs;
    for (double c : rates) {
        cfgs.push_back(at("host_spray", c));
        cfgs.push_back(at("ecmp", c));
    }
    prefetch(cfgs, kHeavy);

    bool nonincreasing = true;
    std::string curve;
    for (std::size_t i = 0; i < std::size(rates); ++i) {
        const auto v = ncct(runs(at("host_spray", rates[i]), kHeavy));
        curve += fmt("%sc=%.1f %.3f+-%.3f", i ? ", " : "", rates[i], mean(v), sd(v));
        if (i > 0) {
            const auto p = ncct(runs(at("host_spray", rates[i - 1]), kHeavy));
            nonincreasing = nonincreasing && mean(v) <= mean(p) + std::max(sd(v), sd(p));
        }
    }
    auto gain = [&](const char* scheme) {
        const auto lo = ncct(runs(at(scheme, 0.8), kHeavy)), hi = ncct(runs(at(scheme, 1.0), kHeavy));
        std::vector<double> d;
        for (std::size_t i = 0; i < lo.size(); ++i)
            d.push_back(lo[i] - hi[i]);
        return mean(d);
    };
    const double ge = gain("ecmp"), gs = gain("host_spray");
    auto worst = [&](const char* scheme) {
        return mean(field(runs(at(scheme, 1.0), kHeavy), [](const RunMetrics& m) { return m.worst_flow_drops; }));
    };
    const double we = worst("ecmp"), ws = worst("host_spray");
    report("A7", nonincreasing && ge < gs && ws > 0 && we > ws,
           fmt("host spray %s (nonincreasing within 1 sd: %s); 0.8->1.0 gain ECMP %.3f vs spray %.3f; worst-flow "
               "losses at c=1 ECMP %.1f, spray %.1f",
               curve.c_str(), nonincreasing ? "yes" : "no", ge, gs, we, ws));
}

// Workload points for the recovery checks; the largest is the all-to-all itself.
const std::pair<const char*, json> kWorkloads[] = {
    {"m=1", perm(1)}, {"m=8", perm(8)}, {"m=40", perm(40)}, {"ata", json::object()}};

json roce() { return rec({{"scheme", "roce"}}); }

void a8() {
    std::vector<json> cfgs;
    for (const auto& [name, w] : kWorkloads)
        cfgs.push_back(with(w, roce()));
    prefetch(cfgs, kHeavy);
    std::uint64_t drops = 0;
    std::string d;
    for (const auto& [name, w] : kWorkloads) {
        std::uint64_t here = 0;
        for (const auto& m : runs(with(w, roce()), kHeavy))
            here += m.total_drops + m.control_drops;
        drops += here;
        d += fmt("%s%s %llu", d.empty() ? "" : ", ", name, static_cast<unsigned long long>(here));
    }
    report("A8", drops == 0, "drops with RoCE over PFC: " + d);
}

const std::pair<const char*, json> kRecovery[] = {
    {"coding", rec({{"scheme", "coding"}, {"overhead", 0.05}})},
    {"tcp", rec({{"scheme", "tcp"}})},
    {"roce", rec({{"scheme", "roce"}})},
    {"trim", rec({{"scheme", "trim"}, {"trim_mode", "reflect"}})},
    {"trim_rts", rec({{"scheme", "trim"}, {"trim_mode", "rts"}})},
};

json recovery(const char* name) {
    for (const auto& [n, r] : kRecovery)
        if (std::string(n) == name)
            return r;
    std::abort();
}

void a9() {
    const json ata = json::object(), p1 = perm(1);
    prefetch({with(ata, recovery("tcp")), with(ata, recovery("trim")), with(ata, recovery("trim_rts"))}, kHeavy);
    prefetch({with(p1, recovery("tcp")), with(p1, recovery("trim")), with(p1, recovery("trim_rts"))}, kPerm);
    const double tcp_a = mean_ncct(with(ata, recovery("tcp")), kHeavy);
    const double tr_a = mean_ncct(with(ata, recovery("trim")), kHeavy);
    const double rts_a = mean_ncct(with(ata, recovery("trim_rts")), kHeavy);
    const double tcp_p = mean_ncct(with(p1, recovery("tcp")), kPerm);
    const double tr_p = mean_ncct(with(p1, recovery("trim")), kPerm);
    const double rts_p = mean_ncct(with(p1, recovery("trim_rts")), kPerm);
    report("A9", tr_a > tcp_a && rts_a > tcp_a && tr_p < tcp_p && rts_p < tcp_p,
           fmt("all-to-all: tcp %.3f, trim %.3f, trim rts %.3f (trimming worse wanted); 1 permutation: tcp %.3f, "
               "trim %.3f, trim rts %.3f (trimming better wanted)",
               tcp_a, tr_a, rts_a, tcp_p, tr_p, rts_p));
}

void a10() {
    std::vector<json> cfgs;
    for (const auto& [wn, w] : kWorkloads)
        for (const auto& [rn, r] : kRecovery)
            cfgs.push_back(with(w, r));
    prefetch(cfgs, kHeavy);
    std::vector<double> coding;
    bool never_worst = true;
    std::string d;
    for (const auto& [wn, w] : kWorkloads) {
        double c = 0, worst = -1;
        std::string row;
        for (const auto& [rn, r] : kRecovery) {
            const double v = mean_ncct(with(w, r), kHeavy);
            if (std::string(rn) == "coding")
                c = v;
            else
                worst = std::max(worst, v);
            row += fmt(" %s %.3f", rn, v);
        }
        coding.push_back(c);
        never_worst = never_worst && c < worst;
        d += fmt("%s%s:%s", d.empty() ? "" : " |", wn, row.c_str());
    }
    const double lo = *std::min_element(coding.begin(), coding.end());
    const double hi = *std::max_element(coding.begin(), coding.end());
    const double spread = (hi - lo) / lo;
    report("A10", spread <= 0.15 && never_worst,
           fmt("coding spread %.3f (want <= 0.15), never worst %s | %s", spread, never_worst ? "yes" : "no",
               d.c_str()));
}

void a11() {
    // Exact reruns of a few cached points.
    const std::pair<json, std::uint64_t> again[] = {
        {with(perm(1), rec({{"scheme", "tcp"}, {"subflows", 1}})), 1},
        {with(perm(1), lb("ecmp")), 2},
        {with(perm(1), recovery("trim")), 3},
        {with({{"topology", {{"k", 4}}}}, lb("plb")), 4},
    };
    std::size_t mismatched = 0;
    for (const auto& [cfg, seed] : again) {
        Scenario s = parse_scenario(cfg);
        const std::string k = key_of(s, seed);
        if (!g_cache.count(k))
            prefetch({cfg}, {seed});
        RunMetrics fresh = run_scenario(s, seed);
        fresh.per_flow.clear();
        mismatched += !g_cache.at(k).same_outcome(fresh);
    }
    std::size_t bad = 0, failed = 0;
    std::string first;
    for (const auto& k : g_order) {
        const RunMetrics& m = g_cache.at(k);
        failed += m.status == RunStatus::Failed;
        if (!m.conservation_ok) {
            if (first.empty())
                first = k.substr(0, 200) + ": " + m.conservation_detail;
            ++bad;
        }
    }
    report("A11", bad == 0 && mismatched == 0,
           fmt("%zu runs audited, %zu failed conservation, %zu threw; %zu of %zu reruns differ%s%s", g_order.size(),
               bad, failed, mismatched, std::size(again), first.empty() ? "" : "; first: ", first.c_str()));
}

void a12() {
    bool ok = true;
    std::string d;
    for (std::uint32_t n : {4u, 8u, 16u}) {
        RngStream rng(7, StreamId::Workload);
        auto flows = gen_permutations(n, n - 1, 500, rng, PermutationFamily::Shift).flows;
        std::sort(flows.begin(), flows.end());
        std::vector<FlowSpec> want;
        for (std::uint32_t s = 0; s < n; ++s)
            for (std::uint32_t t = 0; t < n; ++t)
                if (s != t)
                    want.push_back({s, t, 500});
        auto lib = gen_all_to_all(n, 500).flows;
        std::sort(lib.begin(), lib.end());
        const bool eq = flows == want && lib == want;
        ok = ok && eq;
        d += fmt("%sn=%u %s", d.empty() ? "" : ", ", n, eq ? "equal" : "differ");
    }
    report("A12", ok, d);
}

} // namespace

int main() {
    std::printf("acceptance: %zu seeds for k=8 all-to-all grids, %zu for permutation checks\n", kHeavy.size(),
                kPerm.size());
    std::fflush(stdout);
    const std::pair<const char*, void (*)()> all[] = {{"A1", a1}, {"A2", a2}, {"A12", a12}, {"A3", a3},
                                                      {"A5", a5}, {"A4", a4}, {"A6", a6},   {"A7", a7},
                                                      {"A9", a9}, {"A8", a8}, {"A10", a10}, {"A11", a11}};
    for (const auto& [id, fn] : all) {
        if (!selected(id))
            continue;
        std::fprintf(stderr, "%s ...\n", id);
        try {
            fn();
        } catch (const std::exception& e) {
            report(id, false, std::string("threw: ") + e.what());
        }
    }
    std::size_t failed = 0;
    for (const auto& l : g_lines)
        failed += !l.pass;
    std::printf("acceptance: %zu of %zu criteria passed\n", g_lines.size() - failed, g_lines.size());
    return failed ? 1 : 0;
}
