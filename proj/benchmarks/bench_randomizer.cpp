// Randomization throughput: resolving a partially specified description under
// a guideline, and the serialize/parse round trip of the resolved result.

#include <cstdint>

#include <benchmark/benchmark.h>

#include "parcs/guideline.hpp"
#include "parcs/pdl.hpp"
#include "parcs/randomizer.hpp"

namespace {

using namespace parcs;

const char* kLoose =
    "node A: normal(mu=0, sigma=1)\n"
    "node B: random\n"
    "node C: random\n"
    "node D: bernoulli(p=?), correction(0, 1)\n"
    "node E: optional(p=0.5) { normal(mu=1 + B, sigma=1) }\n"
    "edge A -> B: random\n"
    "edge B -> C: optional\n"
    "edge A -> C: optional\n"
    "edge C -> D: random\n"
    "edge B -> E: optional(p=0.5)\n";

const char* kGuide =
    "nodes:\n"
    "  distributions: normal, bernoulli\n"
    "  coefficients: [-2,-1] U [1,2]\n"
    "  quadratic: true\n"
    "edges:\n"
    "  functions: identity, sigmoid(alpha=[1,2], beta={0}, gamma={1,2})\n"
    "  sparsity: [0.3,0.7]\n"
    "corrections:\n"
    "  policy: always\n"
    "  lower: {0.05}\n"
    "  upper: {0.95}\n";

void BM_Randomize(benchmark::State& state) {
    const PartialGraph pg = parse_description(kLoose);
    const Guideline gl = parse_guideline(kGuide);
    std::uint64_t seed = 0;
    for (auto _ : state) {
        RandomizeResult r = randomize(pg, gl, seed++);
        benchmark::DoNotOptimize(r.graph.nodes.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Randomize);

void BM_SerializeParseRoundTrip(benchmark::State& state) {
    const PartialGraph pg = parse_description(kLoose);
    const Guideline gl = parse_guideline(kGuide);
    const Graph resolved = randomize(pg, gl, 7).graph;
    for (auto _ : state) {
        PartialGraph back = parse_description(serialize(resolved));
        benchmark::DoNotOptimize(back.nodes.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_SerializeParseRoundTrip);

void BM_Replay(benchmark::State& state) {
    const PartialGraph pg = parse_description(kLoose);
    const Guideline gl = parse_guideline(kGuide);
    const RandomizeResult first = randomize(pg, gl, 7);
    for (auto _ : state) {
        Graph back = replay(pg, first.trace);
        benchmark::DoNotOptimize(back.nodes.size());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK(BM_Replay);

} // namespace
