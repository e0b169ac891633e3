#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "parcs/distributions.hpp"
#include "parcs/edge_functions.hpp"
#include "parcs/rng.hpp"

namespace parcs {

// Union of closed intervals, e.g. [-5,-1] U [1,5].  Degenerate parts [c,c]
// are allowed; a union of only points draws uniformly among the points.
struct IntervalUnion {
    std::vector<std::pair<double, double>> parts;

    static IntervalUnion point(double v) { return {{{v, v}}}; }
    static IntervalUnion range(double lo, double hi) { return {{{lo, hi}}}; }

    bool empty() const { return parts.empty(); }
    bool contains(double v) const;
    double total_length() const;
    void check() const; // throws InvalidRange on empty union or a part with lo > hi

    // length-weighted uniform draw (consumes exactly one uniform)
    double sample(UniformStream& rng) const;

    bool operator==(const IntervalUnion&) const = default;
};

struct EdgeFunctionChoice {
    EdgeFuncKind kind = EdgeFuncKind::identity;
    IntervalUnion alpha = IntervalUnion::range(0.5, 2.0);
    IntervalUnion beta = IntervalUnion::range(-1.0, 1.0);
    IntervalUnion gamma = IntervalUnion::point(1.0);
    IntervalUnion phi = IntervalUnion::range(0.75, 1.25);

    bool operator==(const EdgeFunctionChoice&) const = default;
};

enum class CorrectionPolicy {
    always,       // every parameter of a randomized distribution is corrected
    bounded_only, // only parameters whose natural range is a bounded interval
    never,
};

// Admissible (source, target) pairs for randomized edges, expressed over
// named node groups; a pair is admissible iff some allowed group pair covers
// it.  Mandatory edges hitting a forbidden pair raise MaskConflict.
struct ConnectionMask {
    std::map<std::string, std::vector<std::string>> groups;
    std::vector<std::pair<std::string, std::string>> allowed;

    bool admissible(std::string_view source, std::string_view target) const;

    bool operator==(const ConnectionMask&) const = default;
};

struct Guideline {
    std::vector<DistKind> distribution_choices = {DistKind::normal, DistKind::bernoulli};
    IntervalUnion coefficient_range = IntervalUnion::range(-2.0, 2.0);
    std::vector<EdgeFunctionChoice> edge_function_choices = {{EdgeFuncKind::identity}};
    IntervalUnion sparsity = IntervalUnion::point(0.5);
    double node_existence_default = 0.5;
    std::optional<ConnectionMask> mask;

    CorrectionPolicy correction_policy = CorrectionPolicy::bounded_only;
    // (lower, upper) draws for corrections attached under policy `always` to
    // parameters without finite natural bounds
    IntervalUnion correction_lower = IntervalUnion::point(0.0);
    IntervalUnion correction_upper = IntervalUnion::point(1.0);
    std::optional<IntervalUnion> target_mean_range; // absent -> no target mean

    bool edge_corrections = false; // standardize randomized edges at instantiation
    bool quadratic_terms = true;   // include second-order holes in randomized rows

    bool operator==(const Guideline&) const = default;
};

// Sectioned key-value text (sections nodes:, edges:, corrections:, groups:),
// '#' comments.  Throws SyntaxError / InvalidRange / EmptyChoiceList.
Guideline parse_guideline(std::string_view text);

// One interval-union literal: "[a,b] U [c,d]", "{v1, v2}", or a bare number.
IntervalUnion parse_interval_union(std::string_view text);

} // namespace parcs
