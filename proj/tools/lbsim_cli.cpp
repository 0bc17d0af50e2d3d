// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
// lbsim: run figure presets, config files and sweeps; write CSV.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <tuple>
#include <sstream>

#include <CLI11.hpp>

#include "lbsim/harness/preset.hpp"
#include "lbsim/harness/report.hpp"
#include "lbsim/harness/runner.hpp"
#include "lbsim/topology/fat_tree.hpp"

using namespace lbsim;
namespace fs = std::filesystem;

namespace {

struct Common {
    int workers = 0;
    std::vector<std::uint64_t> seeds;
    std::uint32_t num_seeds = 0;
    std::string out_dir = "results";
    bool quiet = false;
};

void add_common(CLI::App* app, Common& c) {
    app->add_option("-w,--workers", c.workers, "parallel runs (0: all cores)")->check(CLI::NonNegativeNumber);
    auto* s = app->add_option("--seeds", c.seeds, "explicit seed list, overrides the scenario")->delimiter(',');
    app->add_option("-n,--num-seeds", c.num_seeds, "use seeds 1..N")->excludes(s)->check(CLI::PositiveNumber);
    app->add_option("-o,--out", c.out_dir, "output directory");
    app->add_flag("-q,--quiet", c.quiet, "no per-run progress");
}

std::optional<std::vector<std::uint64_t>> seed_override(const Common& c) {
    if (!c.seeds.empty())
        return c.seeds;
    if (c.num_seeds > 0) {
        std::vector<std::uint64_t> s(c.num_seeds);
        for (std::uint32_t i = 0; i < c.num_seeds; ++i)
            s[i] = i + 1;
        return s;
    }
    return std::nullopt;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot read '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json load_config(const std::string& path) {
    const std::string text = read_file(path);
    try {
        auto j = nlohmann::json::parse(text, nullptr, true, true);
        return j.is_null() ? nlohmann::json::object() : j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(path + ": not valid JSON: " + e.what());
    }
}

// A config file becomes a one-point preset named after the file.
Preset load_target(const std::string& target) {
    if (is_preset(target))
        return make_preset(target);
    if (!fs::exists(target))
        return make_preset(target);  // reports the unknown name with the list of presets
    Preset p;
    p.name = fs::path(target).stem().string();
    p.description = "config " + target;
    p.points.push_back({"", load_config(target)});
    return p;
}

// One line per distinct (k, f, p) that cannot carry the full load.
void warn_capacity(const std::vector<std::pair<std::string, Scenario>>& points) {
    std::set<std::tuple<std::uint32_t, std::uint32_t, double>> seen;
    for (const auto& [label, s] : points) {
        if (s.failures.mode != FailureMode::Static || s.capacity_sufficient())
            continue;
        if (!seen.insert({s.topology.k, s.failures.links_per_pod, s.failures.frac_lost}).second)
            continue;
        const double margin = capacity_margin(s.topology.k, s.failures.links_per_pod, s.failures.frac_lost);
        // Within 5% of the host-link flow count: results sit right at the edge.
        const bool marginal = margin > -0.05 * (s.hosts() - 1.0);
        std::fprintf(stderr,
                     "warning: %s: capacity insufficient for all-to-all (k=%u, f=%u, p=%.2f, margin %.3f flows)%s\n",
                     label.empty() ? "scenario" : label.c_str(), s.topology.k, s.failures.links_per_pod,
                     s.failures.frac_lost, margin, marginal ? "; marginal case" : "");
    }
}

void describe(const Preset& p, const std::optional<std::vector<std::uint64_t>>& seeds) {
    auto pts = resolve_points(p, seeds);
    std::printf("%s: %s\n", p.name.c_str(), p.description.c_str());
    std::printf("%zu points x %zu seeds = %zu runs\n", pts.size(), pts.front().second.seeds.size(),
                pts.size() * pts.front().second.seeds.size());
    for (const auto& [label, s] : pts)
        std::printf("  %s  %s%s\n", scenario_hash(s).c_str(), label.empty() ? "(single)" : label.c_str(),
                    s.capacity_sufficient() ? "" : "  [capacity insufficient]");
    warn_capacity(pts);
}

int execute(const Preset& p, const Common& c) {
    auto pts = resolve_points(p, seed_override(c));
    warn_capacity(pts);
    auto jobs = expand_jobs(pts, p.name);
    if (!c.quiet)
        std::fprintf(stderr, "%s: %zu runs\n", p.name.c_str(), jobs.size());
    RunProgress progress;
    if (!c.quiet)
        progress = [](const RunResult& r, std::size_t done, std::size_t total) {
            const RunMetrics& m = r.metrics;
            std::fprintf(stderr, "[%zu/%zu] %s seed %llu: %s norm %.4f (%.1f s)%s%s\n", done, total,
                         r.job.point.empty() ? r.job.preset.c_str() : r.job.point.c_str(),
                         static_cast<unsigned long long>(r.job.seed), std::string(to_string(m.status)).c_str(),
                         m.normalized_cct, m.runtime_wall_ms / 1000.0, r.error.empty() ? "" : " error: ",
                         r.error.c_str());
        };
    auto results = run_batch_parallel(jobs, c.workers, progress);

    fs::create_directories(c.out_dir);
    const fs::path runs = fs::path(c.out_dir) / (p.name + ".csv");
    const fs::path agg = fs::path(c.out_dir) / (p.name + "_aggregate.csv");
    {
        std::ofstream os(runs);
        write_run_csv(os, results);
    }
    {
        std::ofstream os(agg);
        write_aggregate_csv(os, results);
    }
    std::size_t bad = 0;
    for (const auto& r : results) {
        bad += r.metrics.status != RunStatus::Complete;
        if (!r.metrics.conservation_ok && r.metrics.status != RunStatus::Failed)
            std::fprintf(stderr, "conservation violated: %s seed %llu: %s\n", r.job.point.c_str(),
                         static_cast<unsigned long long>(r.job.seed), r.metrics.conservation_detail.c_str());
    }
    std::printf("wrote %s and %s (%zu runs, %zu not complete)\n", runs.string().c_str(), agg.string().c_str(),
                results.size(), bad);
    return batch_exit_code(results);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Packet-level load balancing and loss recovery experiments on fat-trees"};
    app.require_subcommand(1);

    Common run_opts;
    std::string run_target;
    auto* run = app.add_subcommand("run", "run a preset or a scenario config file");
    run->add_option("target", run_target, "preset name or config path")->required();
    add_common(run, run_opts);

    Common sweep_opts;
    std::string sweep_base;
    std::string sweep_name = "sweep";
    std::vector<std::string> axes;
    auto* sweep = app.add_subcommand("sweep", "cross product over scalar fields of a base scenario");
    sweep->add_option("-c,--config", sweep_base, "base scenario config (default: all defaults)")->check(CLI::ExistingFile);
    sweep->add_option("-a,--axis", axes, "path=v1,v2,... (repeatable)")->required();
    sweep->add_option("--name", sweep_name, "output file stem");
    add_common(sweep, sweep_opts);

    app.add_subcommand("list-presets", "print preset names and descriptions");

    std::string describe_target;
    Common describe_opts;
    auto* desc = app.add_subcommand("describe", "print the grid of a preset or config without running");
    desc->add_option("target", describe_target, "preset name or config path")->required();
    add_common(desc, describe_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed())
            return execute(load_target(run_target), run_opts);
        if (sweep->parsed()) {
            std::vector<SweepAxis> parsed;
            for (const auto& a : axes)
                parsed.push_back(parse_axis(a));
            nlohmann::json base = sweep_base.empty() ? nlohmann::json::object() : load_config(sweep_base);
            return execute(make_sweep(base, parsed, sweep_name), sweep_opts);
        }
        if (desc->parsed()) {
            describe(load_target(describe_target), seed_override(describe_opts));
            return 0;
        }
        for (const auto& name : preset_names())
            std::printf("%-26s %s\n", name.c_str(), make_preset(name).description.c_str());
        return 0;
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
}
