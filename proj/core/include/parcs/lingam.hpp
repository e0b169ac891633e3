#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "parcs/graph.hpp"
#include "parcs/guideline.hpp"
#include "parcs/randomizer.hpp"

namespace parcs {

struct LingamOptions {
    // exponent of the per-edge power transform: a fixed value, or a range to
    // draw one exponent per dataset; both unset means 1 (plain linear)
    std::optional<double> phi;
    std::optional<IntervalUnion> phi_range;
    // standardize every edge's transmitted values (requires instantiate())
    bool edge_corrections = false;
};

// A linear non-Gaussian acyclic benchmark instance: full lower-triangular
// weighted adjacency over a uniformly drawn causal permutation of p nodes
// X1..Xp, weights uniform over weight_range, and additive noise equal to the
// log of an Exp(1) draw.
struct LingamResult {
    Graph graph;                          // calibrate first when edge_corrections is set
    Matrix b;                             // p x p; b(i,j) = weight of Xj+1 in Xi+1's equation
    std::vector<std::string> causal_order; // names, causes first
    double phi = 1.0;                     // exponent actually applied
    RandomizationTrace trace;
};

LingamResult lingam_preset(std::size_t p, const IntervalUnion& weight_range,
                           std::uint64_t seed, const LingamOptions& opts = {});

} // namespace parcs
