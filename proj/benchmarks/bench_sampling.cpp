// Sampling throughput: chains stress per-node dispatch, the wide graph
// stresses the second-order feature expansion of a many-parent node.

#include <cstdint>
#include <string>
#include <vector>

#include <benchmark/benchmark.h>

#include "parcs/graph.hpp"

namespace {

using namespace parcs;

NodeSpec normal_node(std::string name, std::vector<double> mu, std::vector<double> sigma) {
    NodeSpec n;
    n.name = std::move(name);
    n.kind = DistKind::normal;
    n.weights = {std::move(mu), std::move(sigma)};
    n.corrections.resize(2);
    return n;
}

Graph chain_graph(std::size_t length) {
    Graph g;
    g.add_node(normal_node("Z1", {0.0}, {1.0}));
    for (std::size_t i = 2; i <= length; ++i) {
        g.add_node(normal_node("Z" + std::to_string(i), {0.0, 1.0, 0.0}, {1.0, 0.0, 0.0}));
        EdgeSpec e;
        e.source = "Z" + std::to_string(i - 1);
        e.target = "Z" + std::to_string(i);
        g.add_edge(std::move(e));
    }
    return validate(std::move(g));
}

Graph wide_graph(std::size_t parents) {
    Graph g;
    for (std::size_t i = 1; i <= parents; ++i)
        g.add_node(normal_node("X" + std::to_string(i), {0.0}, {1.0}));
    const std::size_t len = zeta_length(parents);
    std::vector<double> mu(len, 0.01);
    std::vector<double> sigma(len, 0.0);
    sigma[0] = 1.0;
    g.add_node(normal_node("Y", std::move(mu), std::move(sigma)));
    for (std::size_t i = 1; i <= parents; ++i) {
        EdgeSpec e;
        e.source = "X" + std::to_string(i);
        e.target = "Y";
        g.add_edge(std::move(e));
    }
    return validate(std::move(g));
}

void BM_SampleChain(benchmark::State& state) {
    const Graph g = chain_graph(static_cast<std::size_t>(state.range(0)));
    const std::size_t rows = 1000;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        SampleBatch b = sample(g, rows, seed++);
        benchmark::DoNotOptimize(b.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows) *
                            state.range(0));
}
BENCHMARK(BM_SampleChain)->Arg(4)->Arg(16)->Arg(64);

void BM_SampleWideQuadratic(benchmark::State& state) {
    const Graph g = wide_graph(static_cast<std::size_t>(state.range(0)));
    const std::size_t rows = 1000;
    std::uint64_t seed = 1;
    for (auto _ : state) {
        SampleBatch b = sample(g, rows, seed++);
        benchmark::DoNotOptimize(b.data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(rows));
}
BENCHMARK(BM_SampleWideQuadratic)->Arg(4)->Arg(10)->Arg(20);

} // namespace

BENCHMARK_MAIN();
