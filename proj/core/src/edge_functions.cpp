#include "parcs/edge_functions.hpp"

#include <array>
#include <cmath>

#include "parcs/errors.hpp"

namespace parcs {

namespace {
constexpr std::array<std::string_view, 5> kNames = {
    "identity", "sigmoid", "gaussian_rbf", "arctan", "power",
};
}

std::string_view edge_func_name(EdgeFuncKind kind) {
    return kNames[static_cast<std::size_t>(kind)];
}

bool edge_func_from_name(std::string_view name, EdgeFuncKind& out) {
    for (std::size_t i = 0; i < kNames.size(); ++i) {
        if (kNames[i] == name) {
            out = static_cast<EdgeFuncKind>(i);
            return true;
        }
    }
    return false;
}

double apply_edge_function(const EdgeFunction& f, double z) {
    switch (f.kind) {
    case EdgeFuncKind::identity:
        return z;
    case EdgeFuncKind::sigmoid:
        return f.gamma / (1.0 + std::exp(-f.alpha * (z - f.beta)));
    case EdgeFuncKind::gaussian_rbf: {
        const double d = z - f.beta;
        return f.gamma * std::exp(-f.alpha * d * d);
    }
    case EdgeFuncKind::arctan:
        return f.gamma * std::atan(f.alpha * (z - f.beta));
    case EdgeFuncKind::power:
        if (!(f.phi > 0.0)) throw InvalidParameter("power: phi must be > 0");
        if (f.phi == 1.0) return z; // keep exact, not pow(|z|, 1)
        return z < 0.0 ? -std::pow(-z, f.phi) : std::pow(z, f.phi);
    }
    throw InvalidParameter("unknown edge function kind");
}

} // namespace parcs
