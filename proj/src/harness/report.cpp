// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/harness/report.hpp"

#include <cstdio>
#include <map>
#include <ostream>

namespace lbsim {

using nlohmann::json;

namespace {

// Resolved scalar fields; num_seeds is an input shorthand, not a field.
std::vector<std::string> field_paths() {
    std::vector<std::string> out;
    for (const auto& p : scalar_paths())
        if (p != "num_seeds")
            out.push_back(p);
    return out;
}

std::string scalar_text(const json& v) {
    if (v.is_string())
        return v.get<std::string>();
    return v.dump();
}

// Blank for keys that do not apply to this scenario.
std::vector<std::string> field_values(const Scenario& s) {
    const json j = to_json(s, false);
    std::vector<std::string> out;
    for (const auto& p : field_paths()) {
        const json* cur = &j;
        std::size_t start = 0;
        bool found = true;
        while (found) {
            std::size_t dot = p.find('.', start);
            std::string key = p.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
            if (!cur->is_object() || !cur->contains(key)) {
                found = false;
                break;
            }
            cur = &(*cur)[key];
            if (dot == std::string::npos)
                break;
            start = dot + 1;
        }
        out.push_back(found ? scalar_text(*cur) : "");
    }
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6f", v);
    return buf;
}

void write_line(std::ostream& os, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
        if (i)
            os << ',';
        os << csv_escape(cells[i]);
    }
    os << '\n';
}

std::vector<std::string> prefix(const RunResult& r) {
    std::vector<std::string> c = {std::to_string(kCsvSchemaVersion), scenario_hash(r.job.scenario), r.job.preset,
                                  r.job.point};
    auto f = field_values(r.job.scenario);
    c.insert(c.end(), f.begin(), f.end());
    c.push_back(r.job.scenario.capacity_sufficient() ? "1" : "0");
    return c;
}

const char* const kAggMetrics[] = {"normalized_cct", "cct_ns", "worst_flow_drops", "spurious_retx", "total_drops",
                                   "trims"};

} // namespace

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos)
        return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + "\"";
}

std::vector<std::string> run_csv_header() {
    std::vector<std::string> h = {"schema_version", "scenario_hash", "preset", "point"};
    auto f = field_paths();
    h.insert(h.end(), f.begin(), f.end());
    for (const char* c : {"capacity_sufficient", "seed", "status", "cct_ns", "ideal_cct_ns", "normalized_cct",
                          "worst_flow_drops", "spurious_retx", "spurious_fast", "spurious_timeout", "retransmits",
                          "timeouts", "total_drops", "wire_drops", "trims", "ecn_marks", "pfc_pauses", "repaths",
                          "flows_completed", "flows", "events", "conservation_ok", "runtime_wall_ms", "error"})
        h.emplace_back(c);
    return h;
}

std::vector<std::string> aggregate_csv_header() {
    std::vector<std::string> h = {"schema_version", "scenario_hash", "preset", "point"};
    auto f = field_paths();
    h.insert(h.end(), f.begin(), f.end());
    for (const char* c : {"capacity_sufficient", "runs", "completed"})
        h.emplace_back(c);
    for (const char* m : kAggMetrics) {
        h.push_back(std::string(m) + "_mean");
        h.push_back(std::string(m) + "_sd");
    }
    return h;
}

void write_run_csv(std::ostream& os, const std::vector<RunResult>& results) {
    write_line(os, run_csv_header());
    for (const RunResult& r : results) {
        const RunMetrics& m = r.metrics;
        auto c = prefix(r);
        const bool done = m.status == RunStatus::Complete;
        const auto u = [](std::uint64_t v) { return std::to_string(v); };
        for (std::string v : std::initializer_list<std::string>
             {u(r.job.seed), std::string(to_string(m.status)), done ? fmt(to_ns(m.cct)) : "",
              fmt(to_ns(m.ideal_cct)), done ? fmt(m.normalized_cct) : "", u(m.worst_flow_drops),
              u(m.spurious_retx), u(m.spurious_fast), u(m.spurious_timeout), u(m.retransmits), u(m.timeouts),
              u(m.total_drops), u(m.wire_drops), u(m.trims), u(m.ecn_marks), u(m.pfc_pauses), u(m.repaths),
              u(m.flows_completed), u(m.flows), u(m.events), std::string(m.conservation_ok ? "1" : "0"), fmt(m.runtime_wall_ms),
              r.error})
            c.push_back(std::move(v));
        write_line(os, c);
    }
}

void write_aggregate_csv(std::ostream& os, const std::vector<RunResult>& results) {
    write_line(os, aggregate_csv_header());
    std::vector<std::string> order;
    std::map<std::string, std::vector<const RunResult*>> groups;
    for (const RunResult& r : results) {
        std::string key = r.job.preset + '\n' + r.job.point + '\n' + scenario_hash(r.job.scenario);
        if (!groups.count(key))
            order.push_back(key);
        groups[key].push_back(&r);
    }
    for (const auto& key : order) {
        const auto& runs = groups[key];
        auto c = prefix(*runs.front());
        std::vector<std::vector<double>> vals(std::size(kAggMetrics));
        std::size_t completed = 0;
        for (const RunResult* r : runs) {
            const RunMetrics& m = r->metrics;
            if (m.status == RunStatus::Failed)
                continue;
            if (m.status == RunStatus::Complete) {
                ++completed;
                vals[0].push_back(m.normalized_cct);
                vals[1].push_back(to_ns(m.cct));
            }
            vals[2].push_back(static_cast<double>(m.worst_flow_drops));
            vals[3].push_back(static_cast<double>(m.spurious_retx));
            vals[4].push_back(static_cast<double>(m.total_drops));
            vals[5].push_back(static_cast<double>(m.trims));
        }
        c.push_back(std::to_string(runs.size()));
        c.push_back(std::to_string(completed));
        for (const auto& v : vals) {
            if (v.empty()) {
                c.emplace_back();
                c.emplace_back();
                continue;
            }
            const AggregateStats a = aggregate(v);
            c.push_back(fmt(a.mean));
            c.push_back(fmt(a.sd));
        }
        write_line(os, c);
    }
}

int batch_exit_code(const std::vector<RunResult>& results) {
    for (const RunResult& r : results)
        if (r.metrics.status != RunStatus::Complete)
            return 1;
    return 0;
}

} // namespace lbsim
