#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parcs/graph.hpp"

namespace parcs {

// One term of a parameter expression, keyed by the basis element of the
// feature vector it lands on: degree 0 is the bias, degree 1 a parent,
// degree 2 an (a,b) product with a before b in node declaration order.
// coef == nullopt is a hole ('?') for the randomizer to fill.
struct ExprTerm {
    int degree = 0;
    std::string a;
    std::string b;
    std::optional<double> coef;

    bool operator==(const ExprTerm&) const = default;
};

// Sparse polynomial over a node's declared parents; basis elements not
// mentioned contribute coefficient 0 when the weight row is built.
struct ParamExpression {
    std::vector<ExprTerm> terms;

    bool has_holes() const;
    const ExprTerm* find(const ExprTerm& key) const;

    bool operator==(const ParamExpression&) const = default;
};

// Distribution half of a node entry when the kind is declared (coefficients
// may still contain holes).
struct NodeBody {
    DistKind kind = DistKind::deterministic;
    std::vector<ParamExpression> params;                    // canonical parameter order
    std::vector<std::optional<NodeCorrection>> corrections; // aligned with params
    std::optional<DType> dtype;

    bool operator==(const NodeBody&) const = default;
};

struct PartialNode {
    std::string name;
    bool random = false;           // draw the whole distribution from the guideline
    std::optional<NodeBody> body;  // set when !random
    bool optional = false;
    std::optional<double> presence_p; // optional(p=..); nullopt -> guideline default

    bool operator==(const PartialNode&) const = default;
};

enum class EdgeMode { fixed, random_function, optional, required_if_exists };

struct PartialEdge {
    std::string source;
    std::string target;
    EdgeMode mode = EdgeMode::fixed;
    std::optional<EdgeFunction> function; // fixed mode only
    bool correction = false;
    std::optional<double> presence_p; // optional mode; nullopt -> guideline sparsity

    bool operator==(const PartialEdge&) const = default;
};

// A causal description with unresolved degrees of freedom: optional nodes and
// edges, undeclared distributions / edge functions, coefficient holes.
struct PartialGraph {
    std::vector<PartialNode> nodes; // declaration order
    std::vector<PartialEdge> edges;

    std::size_t node_index(std::string_view name) const; // throws UnknownNode
    bool has_node(std::string_view name) const;

    // declared (potential) parents of a node, sorted by declaration index
    std::vector<std::string> declared_parents(std::string_view node) const;

    // no holes, no random parts, no optional parts
    bool fully_specified() const;

    // conversion to a samplable graph; throws Error when not fully specified
    Graph to_graph() const;

    bool operator==(const PartialGraph&) const = default;
};

// Parses description text (node/edge lines, '#' comments).  Throws
// SyntaxError and relatives with 1-based line/column diagnostics; never
// crashes on malformed input.
PartialGraph parse_description(std::string_view text);

// Parses a single parameter expression against a declared parent list
// (order-sensitive: quadratic pairs normalize onto it).
ParamExpression parse_param_expression(std::string_view text,
                                       std::span<const std::string> parents);

// Full-length weight row over `parents` (zeta layout): fixed values and 0 for
// absent basis elements, nullopt where a hole sits.  Terms whose parents are
// not in the list vanish (they belong to dropped optional nodes/edges).  An
// expression that is one bare '?' yields an all-hole row: the entire
// parameter is up for randomization.
std::vector<std::optional<double>> expression_row(const ParamExpression& expr,
                                                  std::span<const std::string> parents);

// Canonical text form; parse_description(serialize(x)) reproduces x
// structurally.  Node lines keep declaration order, edge lines sort by
// (source, target), numbers print as shortest round-trip decimals.
std::string serialize(const PartialGraph& pg);
std::string serialize(const Graph& g);

} // namespace parcs
