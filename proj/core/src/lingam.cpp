#include <algorithm>
#include <numeric>

#include "parcs/errors.hpp"
#include "parcs/lingam.hpp"

namespace parcs {

LingamResult lingam_preset(std::size_t p, const IntervalUnion& weight_range, std::uint64_t seed,
                           const LingamOptions& opts) {
    if (p < 2) throw InvalidRange("a benchmark instance needs at least 2 nodes");
    weight_range.check();
    if (opts.phi && !(*opts.phi > 0.0))
        throw InvalidRange("the power exponent must be positive");
    if (opts.phi_range) {
        opts.phi_range->check();
        for (const auto& [lo, hi] : opts.phi_range->parts)
            if (!(lo > 0.0)) throw InvalidRange("the power exponent must be positive");
    }

    UniformStream rng(stream_seed(seed, "lingam"));
    LingamResult out;
    out.trace.seed = seed;

    std::vector<std::string> names(p);
    for (std::size_t i = 0; i < p; ++i) names[i] = "X" + std::to_string(i + 1);

    // uniform causal permutation: perm[k] = original index at causal position k
    std::vector<std::size_t> perm(p);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    for (std::size_t i = p - 1; i > 0; --i)
        std::swap(perm[i], perm[rng.index(i + 1)]);
    for (std::size_t k = 0; k < p; ++k) {
        out.causal_order.push_back(names[perm[k]]);
        out.trace.decisions.push_back({"order:" + std::to_string(k), names[perm[k]]});
    }

    out.phi = 1.0;
    if (opts.phi)
        out.phi = *opts.phi;
    else if (opts.phi_range)
        out.phi = opts.phi_range->sample(rng);
    out.trace.decisions.push_back({"phi", out.phi});

    // full lower-triangular adjacency in causal order
    out.b = Matrix(p, p);
    for (std::size_t b = 1; b < p; ++b) {
        for (std::size_t a = 0; a < b; ++a) {
            const double w = weight_range.sample(rng);
            out.b(perm[b], perm[a]) = w;
            out.trace.decisions.push_back(
                {"b:" + names[perm[b]] + "." + names[perm[a]], w});
        }
    }

    std::vector<std::size_t> causal_pos(p);
    for (std::size_t k = 0; k < p; ++k) causal_pos[perm[k]] = k;

    Graph g;
    for (std::size_t i = 0; i < p; ++i) {
        // causes of node i, in declaration (index) order to match the zeta layout
        std::vector<std::size_t> causes;
        for (std::size_t j = 0; j < p; ++j)
            if (causal_pos[j] < causal_pos[i]) causes.push_back(j);
        const std::size_t d = causes.size();

        NodeSpec spec;
        spec.name = names[i];
        spec.kind = DistKind::logexp;
        spec.dtype = DType::continuous;
        std::vector<double> mu(zeta_length(d), 0.0);
        for (std::size_t k = 0; k < d; ++k) mu[1 + k] = out.b(i, causes[k]);
        std::vector<double> rate(zeta_length(d), 0.0);
        rate[0] = 1.0;
        spec.weights = {std::move(mu), std::move(rate)};
        spec.corrections.resize(2);
        g.add_node(std::move(spec));
    }
    for (std::size_t b = 1; b < p; ++b) {
        for (std::size_t a = 0; a < b; ++a) {
            EdgeSpec es;
            es.source = names[perm[a]];
            es.target = names[perm[b]];
            es.function.kind = EdgeFuncKind::power;
            es.function.phi = out.phi;
            es.correction.enabled = opts.edge_corrections;
            g.add_edge(std::move(es));
        }
    }
    out.graph = validate(std::move(g));
    return out;
}

} // namespace parcs
