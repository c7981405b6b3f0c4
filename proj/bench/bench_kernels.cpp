// Serial reference vs production kernels, and sweep throughput by thread count.
//
//   ./bench_kernels --benchmark_filter=Evolve

#include "mmwent/channel.hpp"
#include "mmwent/link.hpp"
#include "mmwent/scenario.hpp"

#include <benchmark/benchmark.h>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace {

using namespace mmwent;

const ThermalChannel& channel_300ghz()
{
    static const ThermalChannel ch(0.99, link::mean_photon_number(300e9, 300.0));
    return ch;
}

TruncationPolicy policy_for(int cutoff)
{
    TruncationPolicy p;
    p.total_photon_cutoff = cutoff;
    return p;
}

void BM_EvolveReference(benchmark::State& state)
{
    const auto p = policy_for(static_cast<int>(state.range(0)));
    const FockDensityOp rho = tmsv_density(one_ebit_squeezing(), p);
    for (auto _ : state)
        benchmark::DoNotOptimize(evolve_mode2_reference(rho, channel_300ghz(), p));
}
BENCHMARK(BM_EvolveReference)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_EvolveKraus(benchmark::State& state)
{
    const auto p = policy_for(static_cast<int>(state.range(0)));
    const FockDensityOp rho = tmsv_density(one_ebit_squeezing(), p);
    const KrausSet kraus = build_kraus_set(channel_300ghz(), p.total_photon_cutoff, p);
    for (auto _ : state)
        benchmark::DoNotOptimize(evolve_mode2_kraus(rho, kraus));
}
BENCHMARK(BM_EvolveKraus)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_EvolveKernel(benchmark::State& state)
{
    const auto p = policy_for(static_cast<int>(state.range(0)));
    const auto exec = state.range(1) ? Execution::parallel : Execution::serial;
    const FockDensityOp rho = tmsv_density(one_ebit_squeezing(), p);
    for (auto _ : state)
        benchmark::DoNotOptimize(evolve_mode2(rho, channel_300ghz(), p, exec));
}
BENCHMARK(BM_EvolveKernel)
    ->ArgsProduct({{4, 6, 12, 24}, {0, 1}})
    ->ArgNames({"cutoff", "parallel"})
    ->Unit(benchmark::kMillisecond);

void BM_Fig2Sweep(benchmark::State& state)
{
#ifdef _OPENMP
    const int before = omp_get_max_threads();
    omp_set_num_threads(state.range(0) ? before : 1);
#endif
    SweepSpec spec = default_spec(Scenario::fig2);
    for (auto _ : state)
        benchmark::DoNotOptimize(run_fig2(spec));
#ifdef _OPENMP
    omp_set_num_threads(before);
#endif
}
BENCHMARK(BM_Fig2Sweep)->Arg(0)->Arg(1)->ArgName("parallel")->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
