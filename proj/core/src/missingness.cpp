#include <algorithm>

#include "parcs/errors.hpp"
#include "parcs/missingness.hpp"

namespace parcs {

const char* mechanism_name(Mechanism m) {
    switch (m) {
    case Mechanism::mcar: return "mcar";
    case Mechanism::mar: return "mar";
    case Mechanism::mnar_general: return "mnar";
    case Mechanism::self_censoring: return "sc";
    case Mechanism::no_self_censoring: return "nsc";
    case Mechanism::mar_mcar: return "mar+mcar";
    }
    return "?";
}

bool mechanism_from_name(std::string_view name, Mechanism& out) {
    if (name == "mcar") out = Mechanism::mcar;
    else if (name == "mar") out = Mechanism::mar;
    else if (name == "mnar" || name == "mnar_general") out = Mechanism::mnar_general;
    else if (name == "sc" || name == "self_censoring") out = Mechanism::self_censoring;
    else if (name == "nsc" || name == "no_self_censoring") out = Mechanism::no_self_censoring;
    else if (name == "mar+mcar" || name == "mar_mcar") out = Mechanism::mar_mcar;
    else return false;
    return true;
}

namespace {

bool contains(std::span<const std::string> names, std::string_view name) {
    return std::any_of(names.begin(), names.end(),
                       [&](const std::string& n) { return n == name; });
}

void check_observed(const MechanismSpec& mech, std::span<const std::string> z_names) {
    if (mech.observed.empty())
        throw InvalidObservedSet("the observed set is empty");
    if (mech.observed.size() >= z_names.size())
        throw InvalidObservedSet("the observed set must be a strict subset of the columns");
    for (const std::string& name : mech.observed)
        if (!contains(z_names, name))
            throw InvalidObservedSet("observed column '" + name + "' is unknown");
}

} // namespace

Matrix mechanism_mask(const MechanismSpec& mech, std::span<const std::string> z_names,
                      std::span<const std::string> r_names) {
    for (const std::string& r : r_names)
        if (!contains(z_names, r))
            throw UnknownNode("indicator column '" + r + "' is not a source column");
    const auto observed = [&](std::string_view name) {
        return std::find(mech.observed.begin(), mech.observed.end(), name) !=
               mech.observed.end();
    };
    if (mech.kind == Mechanism::mar || mech.kind == Mechanism::mar_mcar)
        check_observed(mech, z_names);

    Matrix m(z_names.size(), r_names.size());
    for (std::size_t j = 0; j < z_names.size(); ++j) {
        for (std::size_t i = 0; i < r_names.size(); ++i) {
            bool allow = false;
            switch (mech.kind) {
            case Mechanism::mcar: allow = false; break;
            case Mechanism::mnar_general: allow = true; break;
            case Mechanism::self_censoring: allow = z_names[j] == r_names[i]; break;
            case Mechanism::no_self_censoring: allow = z_names[j] != r_names[i]; break;
            case Mechanism::mar:
            case Mechanism::mar_mcar:
                allow = observed(z_names[j]) && !observed(r_names[i]);
                break;
            }
            m(j, i) = allow ? 1.0 : 0.0;
        }
    }
    return m;
}

namespace {

Mgraph build_over(Graph base, const MechanismSpec& mech, const Guideline& guideline,
                  double ratio, std::uint64_t seed, const MgraphOptions& opts) {
    if (!(ratio > 0.0 && ratio < 1.0))
        throw InvalidRange("the missingness ratio must lie strictly inside (0, 1)");
    if (!(mech.rr_density >= 0.0 && mech.rr_density <= 1.0))
        throw InvalidRange("the indicator-to-indicator density must lie in [0, 1]");
    if (opts.sparsity_override &&
        !(*opts.sparsity_override >= 0.0 && *opts.sparsity_override <= 1.0))
        throw InvalidRange("the sparsity override must lie in [0, 1]");
    if (!base.validated()) base = validate(std::move(base));

    Mgraph mg;
    for (const NodeSpec& n : base.nodes) mg.z_columns.push_back(n.name);

    // columns that get an indicator: under plain MAR the observed ones stay
    // fully observed; every other mechanism masks every column
    std::vector<std::string> r_cols;
    if (mech.kind == Mechanism::mar) {
        check_observed(mech, mg.z_columns);
        for (const std::string& z : mg.z_columns)
            if (!contains(mech.observed, z)) r_cols.push_back(z);
    } else {
        r_cols = mg.z_columns;
    }
    mg.mask = mechanism_mask(mech, mg.z_columns, r_cols);
    for (const std::string& z : r_cols) {
        mg.r_nodes.push_back("R_" + z);
        mg.r_for[z] = mg.r_nodes.back();
    }

    UniformStream rng(stream_seed(seed, "mgraph"));
    RandomizationTrace& trace = mg.trace;
    trace.seed = seed;
    const auto rec = [&](std::string key, auto value) {
        trace.decisions.push_back({std::move(key), value});
        return value;
    };

    bool any_candidate = false;
    for (std::size_t j = 0; j < base.nodes.size(); ++j)
        for (std::size_t i = 0; i < r_cols.size(); ++i)
            if (mg.mask(j, i) != 0.0) any_candidate = true;

    double sparsity = 0.0;
    if (any_candidate && mech.kind != Mechanism::self_censoring) {
        sparsity = opts.sparsity_override ? *opts.sparsity_override
                                          : guideline.sparsity.sample(rng);
        rec("sparsity", sparsity);
    }

    const auto draw_function = [&](const std::string& src, const std::string& dst) {
        EdgeFunction f;
        if (!opts.nonlinear) return f; // identity
        if (guideline.edge_function_choices.empty())
            throw EmptyChoiceList("the guideline offers no edge functions");
        const EdgeFunctionChoice& choice =
            guideline.edge_function_choices[rng.index(guideline.edge_function_choices.size())];
        f.kind = choice.kind;
        rec("efun:" + src + "->" + dst, std::string(edge_func_name(f.kind)));
        switch (f.kind) {
        case EdgeFuncKind::identity:
            break;
        case EdgeFuncKind::power:
            f.phi = rec("efun:" + src + "->" + dst + ".phi", choice.phi.sample(rng));
            break;
        default:
            f.alpha = rec("efun:" + src + "->" + dst + ".alpha", choice.alpha.sample(rng));
            f.beta = rec("efun:" + src + "->" + dst + ".beta", choice.beta.sample(rng));
            f.gamma = rec("efun:" + src + "->" + dst + ".gamma", choice.gamma.sample(rng));
        }
        return f;
    };

    const bool quad = opts.nonlinear && guideline.quadratic_terms;
    Graph g = std::move(base);

    // indicators in column order; parents drawn per target under the mask
    std::vector<std::vector<std::string>> parents_of(r_cols.size());
    for (std::size_t i = 0; i < r_cols.size(); ++i) {
        const std::string& r_name = mg.r_nodes[i];
        std::vector<std::string> candidates;
        for (std::size_t j = 0; j < mg.z_columns.size(); ++j)
            if (mg.mask(j, i) != 0.0) candidates.push_back(mg.z_columns[j]);

        std::vector<std::string>& parents = parents_of[i];
        for (const std::string& z : candidates) {
            // self-censoring wires each column to its own indicator outright
            const bool keep = mech.kind == Mechanism::self_censoring
                                  ? true
                                  : rng.bernoulli(sparsity);
            rec("edge:" + z + "->" + r_name, keep);
            if (keep) parents.push_back(z);
        }
        if (opts.nonlinear && parents.empty() && !candidates.empty()) {
            // a nonlinear study wants every indicator driven by data
            const std::string& forced = candidates[rng.index(candidates.size())];
            rec("forced_parent:" + r_name, forced);
            parents.push_back(forced);
        }
        if (mech.rr_density > 0.0) {
            for (std::size_t a = 0; a < i; ++a) // earlier indicators only: stays acyclic
                if (rec("rr:" + mg.r_nodes[a] + "->" + r_name, rng.bernoulli(mech.rr_density)))
                    parents.push_back(mg.r_nodes[a]);
        }
    }

    for (std::size_t i = 0; i < r_cols.size(); ++i) {
        const std::string& r_name = mg.r_nodes[i];
        const std::vector<std::string>& parents = parents_of[i];
        const std::size_t d = parents.size();

        NodeSpec spec;
        spec.name = r_name;
        spec.kind = DistKind::bernoulli;
        spec.dtype = DType::binary;
        std::vector<double> row(zeta_length(d), 0.0);
        for (std::size_t at = 0; at < row.size(); ++at) {
            if (!quad && at > d) break;
            row[at] = guideline.coefficient_range.sample(rng);
        }
        {
            // keep the trace aligned with the draws above
            std::size_t at = 0;
            trace.decisions.push_back({"coef:" + r_name + ".p.bias", row[at++]});
            for (std::size_t k = 0; k < d; ++k)
                trace.decisions.push_back({"coef:" + r_name + ".p." + parents[k], row[at++]});
            if (quad)
                for (std::size_t a = 0; a < d; ++a)
                    for (std::size_t b = a; b < d; ++b)
                        trace.decisions.push_back(
                            {"coef:" + r_name + ".p." + parents[a] +
                                 (a == b ? "^2" : "*" + parents[b]),
                             row[at++]});
        }
        spec.weights.push_back(std::move(row));
        NodeCorrection c;
        c.lower = 0.0;
        c.upper = 1.0;
        c.target_mean = ratio;
        spec.corrections.push_back(c);
        g.add_node(std::move(spec));

        for (const std::string& parent : parents) {
            EdgeSpec es;
            es.source = parent;
            es.target = r_name;
            es.function = draw_function(parent, r_name);
            es.correction.enabled = guideline.edge_corrections;
            g.add_edge(std::move(es));
        }
    }

    g = validate(std::move(g));
    mg.graph = instantiate(std::move(g), opts.burn_in, seed);
    return mg;
}

} // namespace

Mgraph build_mgraph(const Graph& z_graph, const MechanismSpec& mech, const Guideline& guideline,
                    double ratio, std::uint64_t seed, const MgraphOptions& opts) {
    for (const NodeSpec& n : z_graph.nodes)
        if (n.name.starts_with("R_"))
            throw Error("source node '" + n.name +
                        "' collides with the indicator naming scheme (R_ prefix)");
    return build_over(z_graph, mech, guideline, ratio, seed, opts);
}

Mgraph build_mgraph(const IngestedTable& data, const MechanismSpec& mech,
                    const Guideline& guideline, double ratio, std::uint64_t seed,
                    const MgraphOptions& opts) {
    if (data.columns.empty() || data.rows.rows() == 0)
        throw Error("the ingested table is empty");
    if (data.columns.size() != data.rows.cols())
        throw ShapeMismatch("the ingested table header does not match its row width");
    Graph g;
    g.table = data;
    for (std::size_t j = 0; j < data.columns.size(); ++j) {
        if (data.columns[j].starts_with("R_"))
            throw Error("source column '" + data.columns[j] +
                        "' collides with the indicator naming scheme (R_ prefix)");
        NodeSpec spec;
        spec.name = data.columns[j];
        spec.kind = DistKind::deterministic;
        spec.data_column = j;
        g.add_node(std::move(spec));
    }
    return build_over(std::move(g), mech, guideline, ratio, seed, opts);
}

MaskedDataset apply_missingness(const Mgraph& mg, const SampleBatch& batch) {
    const std::size_t n = batch.data.rows();
    const auto column = [&](const std::string& name) -> std::size_t {
        for (std::size_t c = 0; c < batch.columns.size(); ++c)
            if (batch.columns[c] == name) return c;
        throw ShapeMismatch("the batch has no column '" + name + "'");
    };

    MaskedDataset out;
    out.columns = mg.z_columns;
    out.values = Matrix(n, mg.z_columns.size());
    out.missing = Matrix(n, mg.z_columns.size());
    out.achieved_ratio.assign(mg.z_columns.size(), 0.0);

    for (std::size_t j = 0; j < mg.z_columns.size(); ++j) {
        const std::size_t zc = column(mg.z_columns[j]);
        const auto r_it = mg.r_for.find(mg.z_columns[j]);
        const std::size_t rc = r_it == mg.r_for.end() ? batch.columns.size()
                                                      : column(r_it->second);
        double flagged = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            out.values(r, j) = batch.data(r, zc);
            const double miss =
                rc < batch.columns.size() && batch.data(r, rc) != 0.0 ? 1.0 : 0.0;
            out.missing(r, j) = miss;
            flagged += miss;
        }
        out.achieved_ratio[j] = n ? flagged / static_cast<double>(n) : 0.0;
    }
    return out;
}

} // namespace parcs
