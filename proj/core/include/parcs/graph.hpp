#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "parcs/corrections.hpp"
#include "parcs/distributions.hpp"
#include "parcs/edge_functions.hpp"
#include "parcs/matrix.hpp"

namespace parcs {

// A fully specified node: one weight row per distribution parameter, laid out
// over the polynomial feature vector of the node's parents (see zeta()).
struct NodeSpec {
    std::string name;
    DistKind kind = DistKind::deterministic;
    std::vector<std::vector<double>> weights;
    std::vector<std::optional<NodeCorrection>> corrections; // aligned with weights
    DType dtype = DType::continuous;

    // data-backed source column: sampled by shared row resampling from the
    // graph's ingested table instead of through a distribution
    std::optional<std::size_t> data_column;

    bool operator==(const NodeSpec&) const = default;
};

struct EdgeSpec {
    std::string source;
    std::string target;
    EdgeFunction function;
    EdgeCorrection correction;

    bool operator==(const EdgeSpec&) const = default;
};

struct IngestedTable {
    std::vector<std::string> columns;
    Matrix rows;

    bool operator==(const IngestedTable&) const = default;
};

// Per-node intervention actions (applied by intervene()).
struct SetConstant {
    double value = 0.0;
};
struct ReplaceDistribution {
    DistKind kind = DistKind::deterministic;
    std::vector<std::vector<double>> weights;
    std::vector<std::optional<NodeCorrection>> corrections;
};
struct SeverParents {
    std::vector<std::string> parents; // edges source->node to remove
};
using InterventionAction = std::variant<SetConstant, ReplaceDistribution, SeverParents>;
using Intervention = std::map<std::string, InterventionAction>;

// One sampled batch: realizations plus the uniform errors that produced them,
// columns in topological order.  Re-feeding the same errors to an intervened
// graph yields the counterfactual rows.
struct SampleBatch {
    std::vector<std::string> columns;
    Matrix data;
    Matrix errors;
    std::uint64_t seed = 0;
};

class Graph {
public:
    std::vector<NodeSpec> nodes;  // declaration order
    std::vector<EdgeSpec> edges;
    std::optional<IngestedTable> table;

    NodeSpec& add_node(NodeSpec n);
    EdgeSpec& add_edge(EdgeSpec e);

    std::size_t node_index(std::string_view name) const; // throws UnknownNode
    bool has_node(std::string_view name) const;

    // declaration-index-sorted parents of a node (drives the zeta layout)
    std::vector<std::size_t> parent_indices(std::size_t node) const;
    std::vector<std::string> parent_names(std::string_view node) const;

    bool validated() const { return validated_; }
    bool calibrated() const { return calibrated_; }
    // true while an enabled-but-unfrozen edge correction or a target_mean
    // correction requires an instantiate() pass before sampling
    bool needs_calibration() const;

    const std::vector<std::size_t>& topo_order() const { return topo_order_; }
    std::size_t burn_in_used() const { return burn_in_used_; }

    bool operator==(const Graph& o) const {
        return nodes == o.nodes && edges == o.edges && table == o.table;
    }

private:
    bool validated_ = false;
    bool calibrated_ = false;
    std::size_t burn_in_used_ = 0;
    std::vector<std::size_t> topo_order_;
    // per node: (parent index, edge index) sorted by parent declaration index
    std::vector<std::vector<std::pair<std::size_t, std::size_t>>> in_edges_;

    friend Graph validate(Graph g);
    friend Graph instantiate(Graph g, std::size_t burn_in_n, std::uint64_t seed);
    friend Graph intervene(const Graph& g, const Intervention& iv);
    friend class Sampler;
};

// Polynomial feature vector of Eq-style second order: (1, x_1..x_d, x_i*x_j
// for i <= j in index order); length 1 + d + d*(d+1)/2.
std::size_t zeta_length(std::size_t d);
std::vector<double> zeta(std::span<const double> x);

// One theta entry per weight row: dot(W_k, zeta) passed through the row's
// correction when configured.  Weight rows must match zeta's length.
std::vector<double> compute_theta(const NodeSpec& node, std::span<const double> zeta_values);

// Structural checks: unique names, known endpoints, acyclicity, weight-row
// arity against the parent count.  Returns the graph with its evaluation
// order frozen; sampling and instantiation require a validated graph.
Graph validate(Graph g);

// Draws burn_in_n rows and freezes, in topological order, every enabled edge
// correction's moments and every target_mean correction's offset; downstream
// nodes are calibrated against already-corrected upstream columns.
// Deterministic in (g, burn_in_n, seed) and idempotent at a fixed seed.
Graph instantiate(Graph g, std::size_t burn_in_n, std::uint64_t seed);

// n rows via inverse-CDF sampling of each node over its parents' transformed
// values.  Each node's error column comes from a dedicated substream keyed by
// (seed, node name); byte-identical for identical (g, n, seed).
SampleBatch sample(const Graph& g, std::size_t n, std::uint64_t seed);

// Same evaluation, but over a caller-provided error matrix whose columns
// follow the graph's topological order (ShapeMismatch otherwise).
SampleBatch sample_with_errors(const Graph& g, Matrix errors);

// Applies per-node actions and revalidates; frozen calibration constants are
// inherited untouched (re-instantiate explicitly to recalibrate).
Graph intervene(const Graph& g, const Intervention& iv);

} // namespace parcs
