#include <algorithm>
#include <numeric>
#include <sstream>

#include "parcs/csv.hpp"
#include "parcs/errors.hpp"
#include "parcs/pdl.hpp"

namespace parcs {

namespace {

void append_term_body(std::string& out, const ExprTerm& t, double magnitude) {
    const bool unit = magnitude == 1.0;
    if (t.degree == 0) {
        out += io::format_double(magnitude);
        return;
    }
    if (!t.coef)
        out += "?*";
    else if (!unit)
        out += io::format_double(magnitude) + "*";
    if (t.degree == 1) {
        out += t.a;
    } else if (t.a == t.b) {
        out += t.a + "^2";
    } else {
        out += t.a + "*" + t.b;
    }
}

std::string render_expression(const ParamExpression& expr) {
    std::string out;
    bool first = true;
    for (const ExprTerm& t : expr.terms) {
        if (t.coef && *t.coef == 0.0) continue; // zero terms add nothing
        const bool neg = t.coef && *t.coef < 0.0;
        const double mag = t.coef ? std::abs(*t.coef) : 1.0;
        if (first) {
            if (neg) out += "-";
        } else {
            out += neg ? " - " : " + ";
        }
        if (t.degree == 0 && !t.coef) {
            out += "?";
        } else {
            append_term_body(out, t, mag);
        }
        first = false;
    }
    if (out.empty()) out = "0";
    return out;
}

std::string render_function(const EdgeFunction& f) {
    switch (f.kind) {
    case EdgeFuncKind::identity:
        return "identity";
    case EdgeFuncKind::power:
        return "power(phi=" + io::format_double(f.phi) + ")";
    default:
        return std::string(edge_func_name(f.kind)) + "(alpha=" + io::format_double(f.alpha) +
               ", beta=" + io::format_double(f.beta) + ", gamma=" + io::format_double(f.gamma) +
               ")";
    }
}

std::string render_correction(const NodeCorrection& c, bool positional) {
    std::string out;
    if (positional) {
        out = "correction(" + io::format_double(c.lower) + ", " + io::format_double(c.upper) + ")";
        if (c.target_mean) out += ", target_mean=" + io::format_double(*c.target_mean);
    } else {
        out = "correction(param=%s, lower=" + io::format_double(c.lower) +
              ", upper=" + io::format_double(c.upper);
        if (c.target_mean) out += ", target_mean=" + io::format_double(*c.target_mean);
        out += ")";
    }
    return out;
}

std::string render_body(const NodeBody& body) {
    std::string out(dist_kind_name(body.kind));
    out += "(";
    const auto& names = dist_param_names(body.kind);
    for (std::size_t k = 0; k < names.size(); ++k) {
        if (k) out += ", ";
        out += std::string(names[k]) + "=" +
               (k < body.params.size() ? render_expression(body.params[k]) : "0");
    }
    out += ")";

    const auto constrained = dist_constrained_param(body.kind);
    for (std::size_t k = 0; k < body.corrections.size(); ++k) {
        if (!body.corrections[k]) continue;
        const NodeCorrection& c = *body.corrections[k];
        if (constrained && *constrained == k) {
            out += ", " + render_correction(c, true);
        } else {
            std::string kw = render_correction(c, false);
            kw.replace(kw.find("%s"), 2, names[k]);
            out += ", " + kw;
        }
    }
    if (body.dtype && *body.dtype != default_dtype(body.kind))
        out += std::string(", dtype=") +
               (*body.dtype == DType::continuous ? "continuous"
                : *body.dtype == DType::binary   ? "binary"
                                                 : "count");
    return out;
}

std::string render_node(const PartialNode& n) {
    std::string out = "node " + n.name + " : ";
    std::string inner;
    if (n.random)
        inner = "random";
    else if (n.body)
        inner = render_body(*n.body);
    else
        inner = "random"; // an unspecified node is by definition randomized
    if (n.optional) {
        std::string head = "optional";
        if (n.presence_p) head += "(p=" + io::format_double(*n.presence_p) + ")";
        out += head + " { " + inner + " }";
    } else {
        out += inner;
    }
    return out;
}

std::string render_edge(const PartialEdge& e) {
    std::string out = "edge " + e.source + " -> " + e.target + " : ";
    switch (e.mode) {
    case EdgeMode::fixed:
        out += render_function(e.function.value_or(EdgeFunction{}));
        break;
    case EdgeMode::random_function:
        out += "random";
        break;
    case EdgeMode::optional:
        out += "optional";
        if (e.presence_p) out += "(p=" + io::format_double(*e.presence_p) + ")";
        break;
    case EdgeMode::required_if_exists:
        out += "required_if_exists";
        break;
    }
    if (e.correction) out += ", correction";
    return out;
}

} // namespace

std::string serialize(const PartialGraph& pg) {
    std::string out;
    for (const PartialNode& n : pg.nodes) out += render_node(n) + "\n";

    // edge order is preserved: it fixes the in-edge layout of every node, so
    // reordering here would make parse(serialize(g)) structurally different
    for (const PartialEdge& e : pg.edges) out += render_edge(e) + "\n";
    return out;
}

std::string serialize(const Graph& g) {
    PartialGraph pg;
    for (const NodeSpec& n : g.nodes) {
        if (n.data_column)
            throw Error("node '" + n.name + "' is backed by ingested data and has no "
                        "description form");
        PartialNode pn;
        pn.name = n.name;
        pg.nodes.push_back(std::move(pn));
    }
    for (std::size_t i = 0; i < g.nodes.size(); ++i) {
        const NodeSpec& n = g.nodes[i];
        const std::vector<std::string> parents = g.parent_names(n.name);
        const std::size_t d = parents.size();

        NodeBody body;
        body.kind = n.kind;
        body.dtype = n.dtype;
        for (const auto& row : n.weights) {
            ParamExpression expr;
            for (std::size_t at = 0; at < row.size(); ++at) {
                if (row[at] == 0.0) continue;
                ExprTerm t;
                t.coef = row[at];
                if (at == 0) {
                    t.degree = 0;
                } else if (at <= d) {
                    t.degree = 1;
                    t.a = parents[at - 1];
                } else {
                    // invert the pair offset: find i with block_start(i) <= at
                    std::size_t rem = at - 1 - d;
                    std::size_t a = 0;
                    while (rem >= d - a) {
                        rem -= d - a;
                        ++a;
                    }
                    t.degree = 2;
                    t.a = parents[a];
                    t.b = parents[a + rem];
                }
                expr.terms.push_back(std::move(t));
            }
            body.params.push_back(std::move(expr));
        }
        body.corrections = n.corrections;
        pg.nodes[i].body = std::move(body);
    }
    for (const EdgeSpec& e : g.edges) {
        PartialEdge pe;
        pe.source = e.source;
        pe.target = e.target;
        pe.mode = EdgeMode::fixed;
        pe.function = e.function;
        pe.correction = e.correction.enabled;
        pg.edges.push_back(std::move(pe));
    }
    return serialize(pg);
}

} // namespace parcs
