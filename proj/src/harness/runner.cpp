// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#include "lbsim/harness/runner.hpp"

#include <chrono>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lbsim {

std::unique_ptr<RunSetup> build_run(const Scenario& s, std::uint64_t seed) {
    validate(s);
    auto setup = std::make_unique<RunSetup>(s.caps.max_events);
    setup->seed = seed;

    const LinkSpec spec = s.link_spec();
    FatTree ft = build_fat_tree(s.topology.k, spec);
    for (Link& l : ft.links()) {
        l.pfc.pause_threshold = s.topology.buffer_bytes;
        l.pfc.resume_threshold = s.topology.buffer_bytes - s.topology.packet_bytes;
    }

    RngStream wl_rng(seed, StreamId::Workload);
    setup->traffic = s.workload.type == WorkloadKind::AllToAll
                         ? gen_all_to_all(s.hosts(), s.workload.message_packets)
                         : gen_permutations(s.hosts(), s.workload.m, s.workload.message_packets, wl_rng,
                                            s.workload.family);

    const std::uint64_t per_host = static_cast<std::uint64_t>(setup->traffic.flows_per_host) * s.workload.message_packets;
    setup->ideal = ideal_cct(per_host, s.topology.packet_bytes, s.topology.header_bytes, s.link_rate_bps(),
                             s.ideal_payload_only);
    setup->horizon = s.caps.max_sim_time_ms > 0.0 ? from_us(s.caps.max_sim_time_ms * 1000.0)
                                                  : std::max<SimTime>(200 * setup->ideal, 10 * kPicosPerMilli);

    if (s.failures.mode == FailureMode::Static) {
        RngStream frng(seed, StreamId::FailureSelect);
        apply_static_failures(ft, s.failures.links_per_pod, s.failures.frac_lost, frng);
    } else if (s.failures.mode == FailureMode::Flaky) {
        RngStream frng(seed, StreamId::FailureArrivals);
        schedule_flaky_failures(ft, s.failures.links_per_pod, s.failures.arrival_mean_us,
                                s.failures.duration_mean_us, frng, setup->horizon);
    }

    setup->net = std::make_unique<Network>(setup->sim, std::move(ft), s.network_config(), seed);

    FlowParams base;
    base.subflows = s.resolved_subflows();
    base.packet_bytes = s.topology.packet_bytes;
    base.header_bytes = s.topology.header_bytes;
    base.send_interval = s.send_interval();
    base.scheme = s.recovery_scheme();
    base.label_policy = s.label_policy();
    base.plb.min_packets = s.lb.plb_min_packets;
    base.plb.mark_fraction = s.lb.plb_mark_fraction;

    RngStream jitter(seed, StreamId::StartJitter);
    std::uint32_t id = 0;
    for (const FlowSpec& fs : setup->traffic.flows) {
        FlowParams p = base;
        p.id = id++;
        p.src = fs.src;
        p.dst = fs.dst;
        p.message_packets = fs.message_packets;
        SimTime start = static_cast<SimTime>(jitter.below(static_cast<std::uint64_t>(base.send_interval)));
        setup->net->add_flow(p, start);
    }
    return setup;
}

RunMetrics finish_run(RunSetup& setup) {
    RunStatus status = RunStatus::Complete;
    SimTime end = 0;
    try {
        end = setup.sim.run_until_idle(setup.horizon);
        if (!setup.net->all_complete())
            status = RunStatus::Incomplete;
    } catch (const LivelockError& e) {
        status = RunStatus::Livelock;
        end = e.clock_at_abort;
    }
    return collect_metrics(*setup.net, setup.seed, status, setup.ideal, setup.sim.events_processed(), end);
}

RunMetrics run_scenario(const Scenario& s, std::uint64_t seed) {
    auto t0 = std::chrono::steady_clock::now();
    auto setup = build_run(s, seed);
    RunMetrics m = finish_run(*setup);
    m.runtime_wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return m;
}

namespace {

RunResult run_job(const RunJob& job) {
    RunResult r;
    r.job = job;
    try {
        r.metrics = run_scenario(job.scenario, job.seed);
    } catch (const std::exception& e) {
        r.metrics.seed = job.seed;
        r.metrics.status = RunStatus::Failed;
        r.error = e.what();
    }
    return r;
}

} // namespace

std::vector<RunResult> run_batch_serial(const std::vector<RunJob>& jobs) {
    std::vector<RunResult> out;
    out.reserve(jobs.size());
    for (const RunJob& j : jobs)
        out.push_back(run_job(j));
    return out;
}

std::vector<RunResult> run_batch_parallel(const std::vector<RunJob>& jobs, int workers,
                                          const RunProgress& progress) {
    std::vector<RunResult> out(jobs.size());
    std::size_t done = 0;
    const auto n = static_cast<std::int64_t>(jobs.size());
#ifdef _OPENMP
    if (workers > 0)
        omp_set_num_threads(workers);
#else
    (void)workers;
#endif
    // Runs share nothing mutable; each slot is written by exactly one thread.
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        out[k] = run_job(jobs[k]);
#pragma omp critical(lbsim_progress)
        {
            ++done;
            if (progress)
                progress(out[k], done, jobs.size());
        }
    }
    return out;
}

std::vector<RunJob> expand_jobs(const std::vector<std::pair<std::string, Scenario>>& points,
                                const std::string& preset) {
    std::vector<RunJob> jobs;
    for (const auto& [label, s] : points)
        for (std::uint64_t seed : s.seeds)
            jobs.push_back({s, seed, preset, label});
    return jobs;
}

} // namespace lbsim
