// Benchmark-dataset generation: drawing a linear non-Gaussian instance and
// sampling rows from it, at the scale batch users run in loops.

#include <cstdint>

#include <benchmark/benchmark.h>

#include "parcs/guideline.hpp"
#include "parcs/lingam.hpp"

namespace {

using namespace parcs;

void BM_LingamInstance(benchmark::State& state) {
    const IntervalUnion wr = parse_interval_union("[-2,-0.5] U [0.5,2]");
    const std::size_t p = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        LingamResult r = lingam_preset(p, wr, seed++, {});
        benchmark::DoNotOptimize(r.b.data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_LingamInstance)->Arg(5)->Arg(20);

void BM_LingamDataset(benchmark::State& state) {
    const IntervalUnion wr = parse_interval_union("[-2,-0.5] U [0.5,2]");
    const std::size_t p = static_cast<std::size_t>(state.range(0));
    std::uint64_t seed = 0;
    for (auto _ : state) {
        const LingamResult r = lingam_preset(p, wr, seed++, {});
        SampleBatch b = sample(r.graph, 1000, seed);
        benchmark::DoNotOptimize(b.data.data());
    }
    state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_LingamDataset)->Arg(5)->Arg(20);

} // namespace
