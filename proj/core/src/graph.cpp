#include "parcs/graph.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "parcs/errors.hpp"

namespace parcs {

namespace {

bool identifier_like(std::string_view s) {
    if (s.empty()) return false;
    if (!(std::isalpha(static_cast<unsigned char>(s[0])) || s[0] == '_')) return false;
    return std::all_of(s.begin() + 1, s.end(), [](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    });
}

} // namespace

NodeSpec& Graph::add_node(NodeSpec n) {
    validated_ = false;
    calibrated_ = false;
    nodes.push_back(std::move(n));
    return nodes.back();
}

EdgeSpec& Graph::add_edge(EdgeSpec e) {
    validated_ = false;
    calibrated_ = false;
    edges.push_back(std::move(e));
    return edges.back();
}

std::size_t Graph::node_index(std::string_view name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].name == name) return i;
    throw UnknownNode("unknown node '" + std::string(name) + "'");
}

bool Graph::has_node(std::string_view name) const {
    return std::any_of(nodes.begin(), nodes.end(),
                       [&](const NodeSpec& n) { return n.name == name; });
}

std::vector<std::size_t> Graph::parent_indices(std::size_t node) const {
    std::vector<std::size_t> out;
    for (const EdgeSpec& e : edges)
        if (e.target == nodes[node].name) out.push_back(node_index(e.source));
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<std::string> Graph::parent_names(std::string_view node) const {
    std::vector<std::string> out;
    for (std::size_t i : parent_indices(node_index(node))) out.push_back(nodes[i].name);
    return out;
}

bool Graph::needs_calibration() const {
    for (const EdgeSpec& e : edges)
        if (e.correction.enabled && !e.correction.frozen) return true;
    for (const NodeSpec& n : nodes)
        for (const auto& c : n.corrections)
            if (c && c->target_mean && !c->frozen) return true;
    return false;
}

std::size_t zeta_length(std::size_t d) { return 1 + d + d * (d + 1) / 2; }

std::vector<double> zeta(std::span<const double> x) {
    std::vector<double> out;
    out.reserve(zeta_length(x.size()));
    out.push_back(1.0);
    for (double v : x) out.push_back(v);
    for (std::size_t i = 0; i < x.size(); ++i)
        for (std::size_t j = i; j < x.size(); ++j) out.push_back(x[i] * x[j]);
    return out;
}

std::vector<double> compute_theta(const NodeSpec& node, std::span<const double> zeta_values) {
    std::vector<double> theta(node.weights.size());
    for (std::size_t k = 0; k < node.weights.size(); ++k) {
        const auto& row = node.weights[k];
        if (row.size() != zeta_values.size())
            throw ShapeMismatch("node '" + node.name + "': weight row of length " +
                                std::to_string(row.size()) + " against feature vector of length " +
                                std::to_string(zeta_values.size()));
        double acc = 0.0;
        for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * zeta_values[j];
        if (k < node.corrections.size() && node.corrections[k])
            acc = node_correction(acc, *node.corrections[k]);
        theta[k] = acc;
    }
    return theta;
}

Graph validate(Graph g) {
    // unique, identifier-shaped names
    std::set<std::string, std::less<>> seen;
    for (const NodeSpec& n : g.nodes) {
        if (!identifier_like(n.name))
            throw Error("node name '" + n.name + "' is not a valid identifier");
        if (!seen.insert(n.name).second)
            throw DuplicateNode("node '" + n.name + "' declared twice");
    }

    // known endpoints, no self loops, no duplicate edges
    std::set<std::pair<std::string, std::string>> edge_seen;
    for (const EdgeSpec& e : g.edges) {
        if (!g.has_node(e.source))
            throw UnknownParent("edge " + e.source + "->" + e.target + ": unknown source");
        if (!g.has_node(e.target))
            throw UnknownParent("edge " + e.source + "->" + e.target + ": unknown target");
        if (e.source == e.target)
            throw CycleDetected("self edge on '" + e.source + "'", {e.source, e.source});
        if (!edge_seen.insert({e.source, e.target}).second)
            throw Error("edge " + e.source + "->" + e.target + " declared twice");
        if (e.correction.frozen && !(e.correction.sigma > 0.0))
            throw InvalidParameter("edge " + e.source + "->" + e.target +
                                   ": frozen correction needs sigma > 0");
    }

    const std::size_t d = g.nodes.size();

    // in-edge plan per node, parents in declaration order
    g.in_edges_.assign(d, {});
    for (std::size_t ei = 0; ei < g.edges.size(); ++ei) {
        const std::size_t s = g.node_index(g.edges[ei].source);
        const std::size_t t = g.node_index(g.edges[ei].target);
        g.in_edges_[t].emplace_back(s, ei);
    }
    for (auto& plan : g.in_edges_) std::sort(plan.begin(), plan.end());

    // Kahn's algorithm, always picking the smallest declaration index so the
    // evaluation order is stable
    std::vector<std::size_t> indegree(d, 0);
    for (std::size_t i = 0; i < d; ++i) indegree[i] = g.in_edges_[i].size();
    std::vector<bool> done(d, false);
    g.topo_order_.clear();
    while (g.topo_order_.size() < d) {
        std::size_t pick = d;
        for (std::size_t i = 0; i < d; ++i) {
            if (!done[i] && indegree[i] == 0) {
                pick = i;
                break;
            }
        }
        if (pick == d) {
            // remaining nodes all sit on cycles; walk one back for the message
            std::vector<std::string> cycle;
            std::size_t cur = 0;
            while (done[cur]) ++cur;
            std::set<std::size_t> on_path;
            while (on_path.insert(cur).second) {
                cycle.push_back(g.nodes[cur].name);
                for (const auto& [p, ei] : g.in_edges_[cur]) {
                    if (!done[p]) {
                        cur = p;
                        break;
                    }
                }
            }
            cycle.push_back(g.nodes[cur].name);
            std::reverse(cycle.begin(), cycle.end());
            throw CycleDetected("cycle through '" + g.nodes[cur].name + "'", cycle);
        }
        done[pick] = true;
        g.topo_order_.push_back(pick);
        for (const EdgeSpec& e : g.edges)
            if (e.source == g.nodes[pick].name) --indegree[g.node_index(e.target)];
    }

    // per-node shape checks
    for (std::size_t i = 0; i < d; ++i) {
        NodeSpec& n = g.nodes[i];
        const std::size_t parents = g.in_edges_[i].size();

        if (n.data_column) {
            if (!g.table)
                throw Error("node '" + n.name + "' is data-backed but the graph has no table");
            if (*n.data_column >= g.table->columns.size())
                throw ShapeMismatch("node '" + n.name + "': data column out of range");
            if (parents != 0)
                throw Error("data-backed node '" + n.name + "' cannot have parents");
            if (!n.weights.empty())
                throw ShapeMismatch("data-backed node '" + n.name + "' must not carry weights");
            continue;
        }

        const std::size_t params = dist_param_count(n.kind);
        if (n.weights.size() != params)
            throw ShapeMismatch("node '" + n.name + "': " + std::to_string(n.weights.size()) +
                                " weight rows for a " + std::string(dist_kind_name(n.kind)) +
                                " (" + std::to_string(params) + " parameters)");
        const std::size_t want = zeta_length(parents);
        for (const auto& row : n.weights)
            if (row.size() != want)
                throw ShapeMismatch("node '" + n.name + "': weight row of length " +
                                    std::to_string(row.size()) + ", expected " +
                                    std::to_string(want) + " for " + std::to_string(parents) +
                                    " parents");
        if (n.corrections.empty())
            n.corrections.assign(params, std::nullopt);
        else if (n.corrections.size() != params)
            throw ShapeMismatch("node '" + n.name + "': corrections not aligned with parameters");
        for (const auto& c : n.corrections) {
            if (!c) continue;
            if (!(c->lower < c->upper))
                throw InvalidParameter("node '" + n.name + "': correction bounds must satisfy lower < upper");
            if (c->target_mean && !(*c->target_mean > c->lower && *c->target_mean < c->upper))
                throw InvalidParameter("node '" + n.name +
                                       "': target mean must lie strictly inside (lower, upper)");
        }
    }

    g.validated_ = true;
    return g;
}

namespace {

// surviving feature-vector positions after removing some parents: maps the
// new basis into the old row
std::vector<double> project_row(const std::vector<double>& row,
                                const std::vector<std::size_t>& old_parents,
                                const std::vector<bool>& keep) {
    const std::size_t d = old_parents.size();
    std::vector<double> out;
    out.push_back(row[0]);
    for (std::size_t i = 0; i < d; ++i)
        if (keep[i]) out.push_back(row[1 + i]);
    std::size_t pos = 1 + d;
    for (std::size_t i = 0; i < d; ++i)
        for (std::size_t j = i; j < d; ++j, ++pos)
            if (keep[i] && keep[j]) out.push_back(row[pos]);
    return out;
}

} // namespace

Graph intervene(const Graph& g, const Intervention& iv) {
    if (!g.validated()) throw Error("intervene: validate the graph first");
    Graph out = g;
    const bool was_calibrated = g.calibrated();

    for (const auto& [name, action] : iv) {
        const std::size_t idx = out.node_index(name); // throws UnknownNode
        NodeSpec& node = out.nodes[idx];

        if (std::holds_alternative<SetConstant>(action)) {
            const double v = std::get<SetConstant>(action).value;
            const std::size_t parents = out.parent_indices(idx).size();
            node.kind = DistKind::deterministic;
            node.data_column.reset();
            node.weights.assign(1, std::vector<double>(zeta_length(parents), 0.0));
            node.weights[0][0] = v;
            node.corrections.assign(1, std::nullopt);
        } else if (std::holds_alternative<ReplaceDistribution>(action)) {
            const auto& r = std::get<ReplaceDistribution>(action);
            node.kind = r.kind;
            node.data_column.reset();
            node.weights = r.weights;
            node.corrections = r.corrections;
        } else {
            const auto& sever = std::get<SeverParents>(action);
            const std::vector<std::size_t> old_parents = out.parent_indices(idx);
            std::vector<bool> keep(old_parents.size(), true);
            for (const std::string& p : sever.parents) {
                const std::size_t pi = out.node_index(p);
                const auto it = std::find(old_parents.begin(), old_parents.end(), pi);
                if (it == old_parents.end())
                    throw UnknownParent("'" + p + "' is not a parent of '" + name + "'");
                keep[static_cast<std::size_t>(it - old_parents.begin())] = false;
            }
            for (auto& row : node.weights) row = project_row(row, old_parents, keep);
            std::erase_if(out.edges, [&](const EdgeSpec& e) {
                return e.target == name &&
                       std::find(sever.parents.begin(), sever.parents.end(), e.source) !=
                           sever.parents.end();
            });
        }
    }

    out = validate(std::move(out));
    out.calibrated_ = was_calibrated; // frozen constants are inherited as-is
    return out;
}

} // namespace parcs
