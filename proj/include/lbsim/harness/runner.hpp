// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "lbsim/harness/scenario.hpp"
#include "lbsim/metrics/metrics.hpp"
#include "lbsim/network/network.hpp"

namespace lbsim {

// Everything one seeded run needs, built but not yet simulated. Tests use it
// to poke at the network before or after running.
struct RunSetup {
    Simulator sim;
    std::unique_ptr<Network> net;
    TrafficMatrix traffic;
    SimTime ideal = 0;
    SimTime horizon = 0;
    std::uint64_t seed = 0;

    explicit RunSetup(std::uint64_t event_cap) : sim(event_cap) {}
};

std::unique_ptr<RunSetup> build_run(const Scenario& s, std::uint64_t seed);
RunMetrics finish_run(RunSetup& setup);

// One seeded run, start to finish. Never throws for simulation outcomes;
// livelock and horizon overruns come back as a status.
RunMetrics run_scenario(const Scenario& s, std::uint64_t seed);

struct RunJob {
    Scenario scenario;
    std::uint64_t seed = 0;
    std::string preset;
    std::string point;   // label of the grid point inside the preset
};

struct RunResult {
    RunJob job;
    RunMetrics metrics;
    std::string error;   // set when the run threw
};

// Reference implementation: one run after the other.
std::vector<RunResult> run_batch_serial(const std::vector<RunJob>& jobs);
// Called once per finished run, serialized; `done` counts finished runs.
using RunProgress = std::function<void(const RunResult& r, std::size_t done, std::size_t total)>;

// Same results, runs spread over `workers` threads (0: OpenMP default).
std::vector<RunResult> run_batch_parallel(const std::vector<RunJob>& jobs, int workers,
                                          const RunProgress& progress = {});

// Every (point, seed) pair of a scenario list, seeds taken from each scenario.
std::vector<RunJob> expand_jobs(const std::vector<std::pair<std::string, Scenario>>& points,
                                const std::string& preset);

} // namespace lbsim
