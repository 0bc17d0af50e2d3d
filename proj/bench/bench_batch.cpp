// -*- c-basic-offset: 4; indent-tabs-mode: nil -*-
// Serial reference batch against the OpenMP batch on k=4 runs.

#include <benchmark/benchmark.h>

#include "lbsim/harness/runner.hpp"

using namespace lbsim;

namespace {

std::vector<RunJob> jobs(std::size_t n) {
    Scenario s = parse_scenario_text(R"({"topology": {"k": 4}, "lb": {"scheme": "host_spray"}})");
    std::vector<RunJob> out;
    for (std::size_t i = 0; i < n; ++i)
        out.push_back({s, i + 1, "bench", ""});
    return out;
}

void BM_BatchSerial(benchmark::State& st) {
    const auto j = jobs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(run_batch_serial(j));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_BatchParallel(benchmark::State& st) {
    const auto j = jobs(static_cast<std::size_t>(st.range(0)));
    for (auto _ : st)
        benchmark::DoNotOptimize(run_batch_parallel(j, 0));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

} // namespace

BENCHMARK(BM_BatchSerial)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_BatchParallel)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
