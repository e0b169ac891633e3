#include <algorithm>
#include <functional>
#include <map>

#include <nlohmann/json.hpp>

#include "parcs/errors.hpp"
#include "parcs/randomizer.hpp"

namespace parcs {

namespace {

// Both randomize() and replay() walk the description through one structural
// routine; only the source of decisions differs.  The draw oracle consults
// the guideline and records; the replay oracle consumes the recorded trace.
// Keeping a single walk makes emission and consumption line up by
// construction.
class Oracle {
public:
    virtual ~Oracle() = default;

    virtual bool node_exists(const std::string& name, std::optional<double> p) = 0;
    // mask verdict; replay answers true (outcomes are already in the trace)
    virtual bool edge_admissible(const std::string& src, const std::string& dst) = 0;
    virtual bool edge_exists(const std::string& src, const std::string& dst,
                             std::optional<double> p, bool forced_absent) = 0;
    virtual EdgeFuncKind edge_function(const std::string& src, const std::string& dst) = 0;
    virtual double efun_param(const std::string& src, const std::string& dst,
                              const char* pname) = 0;
    virtual bool edge_correction(const std::string& src, const std::string& dst) = 0;
    virtual bool quadratic() = 0;
    virtual DistKind dist_kind(const std::string& node) = 0;
    virtual bool corr_present(const std::string& node, std::string_view pname,
                              bool naturally_bounded) = 0;
    virtual double corr_bound(const std::string& node, std::string_view pname,
                              const char* which) = 0;
    virtual std::optional<double> corr_target(const std::string& node,
                                              std::string_view pname) = 0;
    virtual double coef(const std::string& node, std::string_view pname,
                        const std::string& basis) = 0;
};

std::string basis_label(std::size_t at, std::span<const std::string> parents) {
    const std::size_t d = parents.size();
    if (at == 0) return "bias";
    if (at <= d) return parents[at - 1];
    std::size_t rem = at - 1 - d;
    std::size_t a = 0;
    while (rem >= d - a) {
        rem -= d - a;
        ++a;
    }
    const std::size_t b = a + rem;
    return a == b ? parents[a] + "^2" : parents[a] + "*" + parents[b];
}

Graph resolve(const PartialGraph& pg, Oracle& o) {
    // randomized structure is only admitted along the declared node order;
    // that guarantees acyclic completions without rejection sampling
    for (const PartialEdge& e : pg.edges) {
        if (e.mode == EdgeMode::fixed) continue;
        if (pg.node_index(e.source) >= pg.node_index(e.target))
            throw CycleDetected("edge " + e.source + "->" + e.target +
                                    " is up for randomization but points against the declared "
                                    "node order, so no acyclic resolution is guaranteed",
                                {e.source, e.target});
    }
    for (const PartialNode& n : pg.nodes)
        if (!n.random && !n.body)
            throw Error("node '" + n.name + "' declares neither a distribution nor 'random'");

    // 1. optional nodes
    std::vector<char> kept(pg.nodes.size(), 1);
    for (std::size_t i = 0; i < pg.nodes.size(); ++i)
        if (pg.nodes[i].optional)
            kept[i] = o.node_exists(pg.nodes[i].name, pg.nodes[i].presence_p) ? 1 : 0;

    // 2. edge existence under the mask
    std::vector<const PartialEdge*> kept_edges;
    for (const PartialEdge& e : pg.edges) {
        if (!kept[pg.node_index(e.source)] || !kept[pg.node_index(e.target)]) continue;
        const bool ok = o.edge_admissible(e.source, e.target);
        if (e.mode == EdgeMode::optional) {
            if (o.edge_exists(e.source, e.target, e.presence_p, /*forced_absent=*/!ok))
                kept_edges.push_back(&e);
        } else {
            if (!ok)
                throw MaskConflict("mandatory edge " + e.source + "->" + e.target +
                                   " violates the connection mask");
            kept_edges.push_back(&e);
        }
    }

    // 3. edge functions and their parameters
    std::vector<EdgeSpec> final_edges;
    for (const PartialEdge* pe : kept_edges) {
        EdgeSpec es;
        es.source = pe->source;
        es.target = pe->target;
        if (pe->mode == EdgeMode::fixed) {
            es.function = pe->function.value_or(EdgeFunction{});
            es.correction.enabled = pe->correction;
        } else {
            es.function.kind = o.edge_function(pe->source, pe->target);
            switch (es.function.kind) {
            case EdgeFuncKind::identity:
                break;
            case EdgeFuncKind::power:
                es.function.phi = o.efun_param(pe->source, pe->target, "phi");
                break;
            default:
                es.function.alpha = o.efun_param(pe->source, pe->target, "alpha");
                es.function.beta = o.efun_param(pe->source, pe->target, "beta");
                es.function.gamma = o.efun_param(pe->source, pe->target, "gamma");
            }
            es.correction.enabled = pe->correction || o.edge_correction(pe->source, pe->target);
        }
        final_edges.push_back(std::move(es));
    }

    // final parents per node, sorted by declaration index
    std::map<std::string, std::vector<std::string>> parents_of;
    for (const EdgeSpec& es : final_edges) parents_of[es.target].push_back(es.source);
    for (auto& [name, list] : parents_of)
        std::sort(list.begin(), list.end(), [&](const std::string& x, const std::string& y) {
            return pg.node_index(x) < pg.node_index(y);
        });

    bool any_random_node = false;
    for (std::size_t i = 0; i < pg.nodes.size(); ++i)
        if (kept[i] && pg.nodes[i].random) any_random_node = true;
    const bool quad = any_random_node ? o.quadratic() : true;

    // 4+5. distributions and coefficients, node declaration order
    Graph g;
    for (std::size_t i = 0; i < pg.nodes.size(); ++i) {
        if (!kept[i]) continue;
        const PartialNode& n = pg.nodes[i];
        const std::vector<std::string>& parents = parents_of[n.name];
        const std::size_t d = parents.size();

        NodeSpec spec;
        spec.name = n.name;
        if (n.random) {
            spec.kind = o.dist_kind(n.name);
            spec.dtype = default_dtype(spec.kind);
            const auto& names = dist_param_names(spec.kind);
            for (std::size_t k = 0; k < names.size(); ++k) {
                std::vector<double> row(zeta_length(d), 0.0);
                for (std::size_t at = 0; at < row.size(); ++at) {
                    if (!quad && at > d) break; // quadratic block stays zero
                    row[at] = o.coef(n.name, names[k], basis_label(at, parents));
                }
                spec.weights.push_back(std::move(row));
            }
            spec.corrections.resize(names.size());
            for (std::size_t k = 0; k < names.size(); ++k) {
                const ParamRange range = dist_param_range(spec.kind, k);
                if (!o.corr_present(n.name, names[k], range.bounded())) continue;
                NodeCorrection c;
                c.lower = o.corr_bound(n.name, names[k], "lower");
                c.upper = o.corr_bound(n.name, names[k], "upper");
                c.target_mean = o.corr_target(n.name, names[k]);
                spec.corrections[k] = c;
            }
        } else {
            const NodeBody& body = *n.body;
            spec.kind = body.kind;
            spec.dtype = body.dtype.value_or(default_dtype(body.kind));
            const auto& names = dist_param_names(body.kind);
            for (std::size_t k = 0; k < names.size(); ++k) {
                std::vector<double> row(zeta_length(d), 0.0);
                if (k < body.params.size()) {
                    const auto templ = expression_row(body.params[k], parents);
                    for (std::size_t at = 0; at < templ.size(); ++at)
                        row[at] = templ[at] ? *templ[at]
                                            : o.coef(n.name, names[k], basis_label(at, parents));
                }
                spec.weights.push_back(std::move(row));
            }
            spec.corrections = body.corrections;
            spec.corrections.resize(names.size());
        }
        g.add_node(std::move(spec));
    }
    for (EdgeSpec& es : final_edges) g.add_edge(std::move(es));
    return validate(std::move(g));
}

class DrawOracle final : public Oracle {
public:
    DrawOracle(const Guideline& gl, std::uint64_t seed)
        : gl_(gl), rng_(stream_seed(seed, "randomize")) {
        trace_.seed = seed;
    }

    RandomizationTrace take_trace() { return std::move(trace_); }

    bool node_exists(const std::string& name, std::optional<double> p) override {
        return rec("node:" + name, rng_.bernoulli(p.value_or(gl_.node_existence_default)));
    }
    bool edge_admissible(const std::string& src, const std::string& dst) override {
        return !gl_.mask || gl_.mask->admissible(src, dst);
    }
    bool edge_exists(const std::string& src, const std::string& dst, std::optional<double> p,
                     bool forced_absent) override {
        bool v = false;
        if (!forced_absent) v = rng_.bernoulli(p ? *p : sparsity());
        return rec("edge:" + src + "->" + dst, v);
    }
    EdgeFuncKind edge_function(const std::string& src, const std::string& dst) override {
        if (gl_.edge_function_choices.empty())
            throw EmptyChoiceList("the guideline offers no edge functions");
        chosen_ = &gl_.edge_function_choices[rng_.index(gl_.edge_function_choices.size())];
        rec("efun:" + src + "->" + dst, std::string(edge_func_name(chosen_->kind)));
        return chosen_->kind;
    }
    double efun_param(const std::string& src, const std::string& dst,
                      const char* pname) override {
        const std::string_view p = pname;
        const IntervalUnion& r = p == "alpha"  ? chosen_->alpha
                                 : p == "beta" ? chosen_->beta
                                 : p == "gamma" ? chosen_->gamma
                                                : chosen_->phi;
        return rec("efun:" + src + "->" + dst + "." + pname, r.sample(rng_));
    }
    bool edge_correction(const std::string& src, const std::string& dst) override {
        return rec("ecorr:" + src + "->" + dst, gl_.edge_corrections);
    }
    bool quadratic() override { return rec("quadratic", gl_.quadratic_terms); }
    DistKind dist_kind(const std::string& node) override {
        if (gl_.distribution_choices.empty())
            throw EmptyChoiceList("the guideline offers no distributions");
        const DistKind kind =
            gl_.distribution_choices[rng_.index(gl_.distribution_choices.size())];
        rec("dist:" + node, std::string(dist_kind_name(kind)));
        return kind;
    }
    bool corr_present(const std::string& node, std::string_view pname,
                      bool naturally_bounded) override {
        bool v = false;
        switch (gl_.correction_policy) {
        case CorrectionPolicy::always: v = true; break;
        case CorrectionPolicy::bounded_only: v = naturally_bounded; break;
        case CorrectionPolicy::never: v = false; break;
        }
        return rec("corr:" + node + "." + std::string(pname), v);
    }
    double corr_bound(const std::string& node, std::string_view pname,
                      const char* which) override {
        const IntervalUnion& r =
            std::string_view(which) == "lower" ? gl_.correction_lower : gl_.correction_upper;
        return rec("corr:" + node + "." + std::string(pname) + "." + which, r.sample(rng_));
    }
    std::optional<double> corr_target(const std::string& node, std::string_view pname) override {
        if (!gl_.target_mean_range) return std::nullopt;
        return rec("corr:" + node + "." + std::string(pname) + ".target",
                   gl_.target_mean_range->sample(rng_));
    }
    double coef(const std::string& node, std::string_view pname,
                const std::string& basis) override {
        return rec("coef:" + node + "." + std::string(pname) + "." + basis,
                   gl_.coefficient_range.sample(rng_));
    }

private:
    template <class T> T rec(std::string key, T value) {
        trace_.decisions.push_back({std::move(key), value});
        return value;
    }
    double sparsity() {
        if (!sparsity_) {
            sparsity_ = gl_.sparsity.sample(rng_);
            rec("sparsity", *sparsity_);
        }
        return *sparsity_;
    }

    const Guideline& gl_;
    UniformStream rng_;
    RandomizationTrace trace_;
    std::optional<double> sparsity_;
    const EdgeFunctionChoice* chosen_ = nullptr;
};

class ReplayOracle final : public Oracle {
public:
    explicit ReplayOracle(const std::vector<TraceEntry>& entries) : entries_(entries) {}

    void finish() {
        skip_sparsity();
        if (cur_ != entries_.size())
            throw TraceMismatch("trace has " + std::to_string(entries_.size() - cur_) +
                                " unused decision(s), starting at '" + entries_[cur_].key + "'");
    }

    bool node_exists(const std::string& name, std::optional<double>) override {
        return next<bool>("node:" + name);
    }
    bool edge_admissible(const std::string&, const std::string&) override { return true; }
    bool edge_exists(const std::string& src, const std::string& dst, std::optional<double>,
                     bool) override {
        return next<bool>("edge:" + src + "->" + dst);
    }
    EdgeFuncKind edge_function(const std::string& src, const std::string& dst) override {
        const std::string name = next<std::string>("efun:" + src + "->" + dst);
        EdgeFuncKind kind;
        if (!edge_func_from_name(name, kind))
            throw TraceMismatch("trace names unknown edge function '" + name + "'");
        return kind;
    }
    double efun_param(const std::string& src, const std::string& dst,
                      const char* pname) override {
        return next<double>("efun:" + src + "->" + dst + "." + pname);
    }
    bool edge_correction(const std::string& src, const std::string& dst) override {
        return next<bool>("ecorr:" + src + "->" + dst);
    }
    bool quadratic() override { return next<bool>("quadratic"); }
    DistKind dist_kind(const std::string& node) override {
        const std::string name = next<std::string>("dist:" + node);
        DistKind kind;
        if (!dist_kind_from_name(name, kind))
            throw TraceMismatch("trace names unknown distribution '" + name + "'");
        return kind;
    }
    bool corr_present(const std::string& node, std::string_view pname, bool) override {
        return next<bool>("corr:" + node + "." + std::string(pname));
    }
    double corr_bound(const std::string& node, std::string_view pname,
                      const char* which) override {
        return next<double>("corr:" + node + "." + std::string(pname) + "." + which);
    }
    std::optional<double> corr_target(const std::string& node, std::string_view pname) override {
        const std::string key = "corr:" + node + "." + std::string(pname) + ".target";
        skip_sparsity();
        if (cur_ < entries_.size() && entries_[cur_].key == key) return next<double>(key);
        return std::nullopt;
    }
    double coef(const std::string& node, std::string_view pname,
                const std::string& basis) override {
        return next<double>("coef:" + node + "." + std::string(pname) + "." + basis);
    }

private:
    // the lazily recorded sparsity value is informational: structure outcomes
    // are replayed from the per-edge entries, so the value itself is skipped
    void skip_sparsity() {
        while (cur_ < entries_.size() && entries_[cur_].key == "sparsity") ++cur_;
    }
    template <class T> T next(const std::string& key) {
        if (key != "sparsity") skip_sparsity();
        if (cur_ >= entries_.size())
            throw TraceMismatch("trace ended before decision '" + key + "'");
        const TraceEntry& e = entries_[cur_];
        if (e.key != key)
            throw TraceMismatch("trace has '" + e.key + "' where '" + key + "' was expected");
        const T* v = std::get_if<T>(&e.value);
        if (!v) throw TraceMismatch("decision '" + key + "' has the wrong value type");
        ++cur_;
        return *v;
    }

    const std::vector<TraceEntry>& entries_;
    std::size_t cur_ = 0;
};

} // namespace

RandomizeResult randomize(const PartialGraph& pg, const Guideline& guideline,
                          std::uint64_t seed) {
    guideline.coefficient_range.check();
    guideline.sparsity.check();
    DrawOracle oracle(guideline, seed);
    Graph g = resolve(pg, oracle);
    return {std::move(g), oracle.take_trace()};
}

Graph replay(const PartialGraph& pg, const RandomizationTrace& trace) {
    ReplayOracle oracle(trace.decisions);
    Graph g = resolve(pg, oracle);
    oracle.finish();
    return g;
}

// ----------------------------------------------------------- trace (de)serialization

std::string RandomizationTrace::to_json() const {
    nlohmann::json j;
    j["seed"] = seed;
    nlohmann::json arr = nlohmann::json::array();
    for (const TraceEntry& e : decisions) {
        nlohmann::json item;
        item["key"] = e.key;
        std::visit([&](const auto& v) { item["value"] = v; }, e.value);
        arr.push_back(std::move(item));
    }
    j["decisions"] = std::move(arr);
    return j.dump(2) + "\n";
}

RandomizationTrace RandomizationTrace::from_json(std::string_view text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("trace is not valid JSON: ") + e.what());
    }
    RandomizationTrace trace;
    try {
        trace.seed = j.at("seed").get<std::uint64_t>();
        for (const auto& item : j.at("decisions")) {
            TraceEntry e;
            e.key = item.at("key").get<std::string>();
            const auto& v = item.at("value");
            if (v.is_boolean())
                e.value = v.get<bool>();
            else if (v.is_number_integer() || v.is_number_unsigned())
                e.value = v.get<std::int64_t>();
            else if (v.is_number_float())
                e.value = v.get<double>();
            else if (v.is_string())
                e.value = v.get<std::string>();
            else
                throw Error("trace decision '" + e.key + "' has an unsupported value type");
            trace.decisions.push_back(std::move(e));
        }
    } catch (const nlohmann::json::exception& e) {
        throw Error(std::string("trace JSON is malformed: ") + e.what());
    }
    return trace;
}

} // namespace parcs
