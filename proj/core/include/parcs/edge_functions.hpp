#pragma once

#include <string_view>

namespace parcs {

// Transformations applied to a parent's value on its way along an edge.
enum class EdgeFuncKind {
    identity,
    sigmoid,      // gamma / (1 + exp(-alpha * (z - beta)))
    gaussian_rbf, // gamma * exp(-alpha * (z - beta)^2)
    arctan,       // gamma * arctan(alpha * (z - beta))
    power,        // sgn(z) * |z|^phi
};

struct EdgeFunction {
    EdgeFuncKind kind = EdgeFuncKind::identity;
    double alpha = 1.0;
    double beta = 0.0;
    double gamma = 1.0;
    double phi = 1.0; // power only; must be > 0

    bool operator==(const EdgeFunction&) const = default;
};

std::string_view edge_func_name(EdgeFuncKind kind);
bool edge_func_from_name(std::string_view name, EdgeFuncKind& out);

// throws InvalidParameter for power with phi <= 0
double apply_edge_function(const EdgeFunction& f, double z);

} // namespace parcs
