// OpenMP kernels against their serial references.
#include <benchmark/benchmark.h>

#include "ngpon/catalog.hpp"
#include "ngpon/harness.hpp"

using namespace ngpon;

namespace {

Scenario bench_scenario(int i) { return i == 0 ? appendix_nonuniform_dst() : metro_beta(0.5); }

template <bool Parallel>
void BM_ChannelLoads(benchmark::State& st)
{
    const Instance inst(bench_scenario(static_cast<int>(st.range(0))));
    for (auto _ : st) {
        LoadReport r = Parallel ? channel_loads_parallel(inst.routes(), inst.pattern(), 6328)
                                : channel_loads(inst.routes(), inst.pattern(), 6328);
        benchmark::DoNotOptimize(r.r_T_bps);
    }
}

template <bool Parallel>
void BM_Replications(benchmark::State& st)
{
    const Instance inst(metro_beta(0.5));
    const TrafficMatrices m = inst.at_rate(0.5 * inst.capacity().max_rt_bps);
    SimConfig cfg;
    cfg.duration_s = 0.02;
    cfg.warmup_s = 0.005;
    cfg.replications = 8;
    auto one = [&](std::uint64_t seed) {
        return simulate_network_once(inst.topology(), inst.routes(), m, CarrierMode::Reflection, cfg,
                                     PacketLengthDist::ethernet(), seed);
    };
    for (auto _ : st) {
        auto reps = Parallel ? run_replications(one, cfg) : run_replications_serial(one, cfg);
        benchmark::DoNotOptimize(reps.data());
    }
}

template <bool Parallel>
void BM_Sweep(benchmark::State& st)
{
    const Instance inst(appendix_nonuniform_dst());
    std::vector<double> grid;
    for (int k = 1; k <= 64; ++k) grid.push_back(k / 65.0 * inst.capacity().max_rt_bps);
    SweepOptions opt;
    opt.parallel = Parallel;
    for (auto _ : st) {
        auto pts = run_sweep(inst, grid, opt);
        benchmark::DoNotOptimize(pts.data());
    }
}

} // namespace

BENCHMARK(BM_ChannelLoads<false>)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_ChannelLoads<true>)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_Replications<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Replications<true>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<false>)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Sweep<true>)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
