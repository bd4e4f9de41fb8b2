// Serial reference vs OpenMP kernels: Monte-Carlo bit errors and sweeps.

#include "fanet/ber_kernels.hpp"
#include "fanet/config.hpp"
#include "fanet/sweep.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_BitErrorsSerial(benchmark::State& state)
{
    const auto bits = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fanet::count_bit_errors_serial(0.01, bits, 1));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * bits));
}

void BM_BitErrorsParallel(benchmark::State& state)
{
    const auto bits = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        benchmark::DoNotOptimize(fanet::count_bit_errors_parallel(0.01, bits, 1));
    }
    state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * bits));
}

fanet::ScenarioConfig sweep_base()
{
    fanet::ScenarioConfig cfg;
    cfg.snr_db = 7.0;
    cfg.sim_duration = 1.0;
    return cfg;
}

const fanet::SweepSpec kSweep{fanet::SweepParam::NodeCount, {4, 8, 12, 16}, 4, 1};

void BM_SweepSerial(benchmark::State& state)
{
    const auto base = sweep_base();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fanet::run_sweep_serial(base, kSweep));
    }
}

void BM_SweepParallel(benchmark::State& state)
{
    const auto base = sweep_base();
    for (auto _ : state) {
        benchmark::DoNotOptimize(fanet::run_sweep_parallel(base, kSweep, static_cast<int>(state.range(0))));
    }
}

}  // namespace

BENCHMARK(BM_BitErrorsSerial)->Arg(1 << 20)->Arg(1 << 24)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_BitErrorsParallel)->Arg(1 << 20)->Arg(1 << 24)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
