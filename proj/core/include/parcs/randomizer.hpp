#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "parcs/graph.hpp"
#include "parcs/guideline.hpp"
#include "parcs/pdl.hpp"

namespace parcs {

// One recorded random decision.  Keys are stable, human-readable paths
// ("node:Z3", "edge:Z1->Z3", "efun:Z1->Z3", "coef:Z2.mu.Z1", ...); values are
// the resolved outcomes, so a trace doubles as an audit log.
struct TraceEntry {
    std::string key;
    std::variant<bool, std::int64_t, double, std::string> value;

    bool operator==(const TraceEntry&) const = default;
};

struct RandomizationTrace {
    std::uint64_t seed = 0;
    std::vector<TraceEntry> decisions;

    std::string to_json() const;
    static RandomizationTrace from_json(std::string_view text);

    bool operator==(const RandomizationTrace&) const = default;
};

struct RandomizeResult {
    Graph graph;
    RandomizationTrace trace;
};

// Resolves every degree of freedom of pg under the guideline, in a fixed
// order: optional nodes, then optional/required edges (sparsity, per-edge
// probabilities, connection mask), then edge functions and their parameters,
// then distributions, then coefficient holes.  Deterministic in
// (pg, guideline, seed); the output graph passes validate() and keeps every
// restricted element of pg byte-identical.
RandomizeResult randomize(const PartialGraph& pg, const Guideline& guideline,
                          std::uint64_t seed);

// Re-resolves pg by consuming the trace instead of an RNG; throws
// TraceMismatch when the trace does not line up with pg's decision points.
Graph replay(const PartialGraph& pg, const RandomizationTrace& trace);

} // namespace parcs
