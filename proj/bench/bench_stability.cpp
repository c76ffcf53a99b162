// Serial reference vs OpenMP subset-stability sweep on a 2,907-interest
// synthetic triple.

#include <benchmark/benchmark.h>

#include "assim/analysis.hpp"
#include "assim/synth.hpp"

namespace {

const assim::SynthTriple& triple() {
    static const assim::SynthTriple t = [] {
        assim::SynthConfig c;
        c.n_interests = 2907;
        c.alpha = 0.6;
        c.seed = 1;
        return assim::generate_triple(c);
    }();
    return t;
}

assim::StabilityConfig sweep(int trials) {
    assim::StabilityConfig c;
    c.sizes = assim::parse_size_spec("100:2900:100");
    c.trials = trials;
    c.seed = 7;
    return c;
}

void BM_StabilitySerial(benchmark::State& state) {
    const auto& t = triple();
    const auto config = sweep(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(assim::subset_stability_serial(t.dest, t.target, t.home, config));
}

void BM_StabilityOpenMP(benchmark::State& state) {
    const auto& t = triple();
    const auto config = sweep(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(assim::subset_stability(t.dest, t.target, t.home, config));
}

} // namespace

BENCHMARK(BM_StabilitySerial)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_StabilityOpenMP)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
