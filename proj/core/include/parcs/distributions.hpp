#pragma once

#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace parcs {

// Output distributions available to a node.  Every kind is sampled through its
// inverse CDF applied to a uniform error in (0,1), so one stored error matrix
// reproduces, intervenes on, or counterfactually re-evaluates the same rows.
enum class DistKind {
    bernoulli,     // p
    normal,        // mu, sigma
    uniform,       // low, high
    exponential,   // rate
    lognormal,     // mu, sigma
    poisson,       // lambda
    logexp,        // mu, rate; mu + log of an Exp(rate) draw (additive heavy-left noise)
    deterministic, // value (ignores the error)
};

enum class DType { continuous, binary, count };

const std::vector<std::string>& dist_param_names(DistKind kind);
std::size_t dist_param_count(DistKind kind);
std::string_view dist_kind_name(DistKind kind);
bool dist_kind_from_name(std::string_view name, DistKind& out);
DType default_dtype(DistKind kind);

// Valid range of one scalar parameter (open at infinite ends; `open_*` tells
// whether a finite end is excluded).  bernoulli's p is the only parameter
// whose valid range is a bounded interval.
struct ParamRange {
    double lo = -std::numeric_limits<double>::infinity();
    double hi = std::numeric_limits<double>::infinity();
    bool open_lo = false;
    bool open_hi = false;

    bool bounded() const;
    bool contains(double v) const;
};
ParamRange dist_param_range(DistKind kind, std::size_t param_index);

// The kind's single range-constrained parameter (bernoulli -> p,
// normal/lognormal -> sigma, exponential/logexp -> rate, poisson -> lambda);
// the parameter a bare correction(L,U) clause binds to.
std::optional<std::size_t> dist_constrained_param(DistKind kind);

// F^-1(epsilon; theta).  epsilon must lie strictly inside (0,1); theta holds
// the kind's parameters in declaration order.  Throws InvalidParameter when a
// parameter leaves its valid range (reachable only for uncorrected
// parameterizations) or when theta has the wrong arity.
double icdf_sample(DistKind kind, std::span<const double> theta, double epsilon);

} // namespace parcs
