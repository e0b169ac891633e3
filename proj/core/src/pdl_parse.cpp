#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <set>

#include "parcs/errors.hpp"
#include "parcs/pdl.hpp"

namespace parcs {

namespace {

struct Token {
    enum Kind { ident, number, punct, end } kind = end;
    std::string text;
    int line = 0;
    int col = 0;
};

[[noreturn]] void fail(const Token& at, const std::string& expected, const std::string& msg) {
    throw SyntaxError(at.line, at.col, expected, msg);
}

std::vector<Token> tokenize_line(std::string_view line, int line_no) {
    std::vector<Token> out;
    std::size_t i = 0;
    const auto is_ident_start = [](char c) {
        return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
    };
    const auto is_ident = [&](char c) {
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_';
    };
    const auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)); };

    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') break; // comment to end of line
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        const int col = static_cast<int>(i) + 1;
        if (is_ident_start(c)) {
            std::size_t j = i + 1;
            while (j < line.size() && is_ident(line[j])) ++j;
            out.push_back({Token::ident, std::string(line.substr(i, j - i)), line_no, col});
            i = j;
        } else if (is_digit(c) || (c == '.' && i + 1 < line.size() && is_digit(line[i + 1]))) {
            std::size_t j = i;
            while (j < line.size() && (is_digit(line[j]) || line[j] == '.')) ++j;
            if (j < line.size() && (line[j] == 'e' || line[j] == 'E')) {
                std::size_t k = j + 1;
                if (k < line.size() && (line[k] == '+' || line[k] == '-')) ++k;
                if (k < line.size() && is_digit(line[k])) {
                    j = k;
                    while (j < line.size() && is_digit(line[j])) ++j;
                }
            }
            out.push_back({Token::number, std::string(line.substr(i, j - i)), line_no, col});
            i = j;
        } else if (c == '-' && i + 1 < line.size() && line[i + 1] == '>') {
            out.push_back({Token::punct, "->", line_no, col});
            i += 2;
        } else if (std::string_view(":,(){}=?^+-*[]").find(c) != std::string_view::npos) {
            out.push_back({Token::punct, std::string(1, c), line_no, col});
            ++i;
        } else {
            throw SyntaxError(line_no, col, "", std::string("stray character '") + c + "'");
        }
    }
    out.push_back({Token::end, "", line_no, static_cast<int>(line.size()) + 1});
    return out;
}

// cursor over one line's tokens
class Cursor {
public:
    explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}

    const Token& peek(std::size_t ahead = 0) const {
        const std::size_t i = pos_ + ahead;
        return i < toks_.size() ? toks_[i] : toks_.back();
    }
    const Token& take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Token::end; }

    bool accept_punct(std::string_view p) {
        if (peek().kind == Token::punct && peek().text == p) {
            ++pos_;
            return true;
        }
        return false;
    }
    bool accept_ident(std::string_view w) {
        if (peek().kind == Token::ident && peek().text == w) {
            ++pos_;
            return true;
        }
        return false;
    }
    const Token& expect_punct(std::string_view p) {
        if (!(peek().kind == Token::punct && peek().text == p))
            fail(peek(), "'" + std::string(p) + "'", "unexpected '" + peek().text + "'");
        return toks_[pos_++];
    }
    const Token& expect_ident(const std::string& what) {
        if (peek().kind != Token::ident) fail(peek(), what, "unexpected '" + peek().text + "'");
        return toks_[pos_++];
    }
    double expect_number(const std::string& what) {
        bool neg = false;
        if (peek().kind == Token::punct && (peek().text == "-" || peek().text == "+")) {
            neg = peek().text == "-";
            ++pos_;
        }
        if (peek().kind != Token::number) fail(peek(), what, "unexpected '" + peek().text + "'");
        const Token& t = toks_[pos_++];
        double v = 0.0;
        const auto res = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
        if (res.ec != std::errc{} || res.ptr != t.text.data() + t.text.size())
            fail(t, what, "'" + t.text + "' is not a number");
        return neg ? -v : v;
    }
    void expect_end() {
        if (!at_end()) fail(peek(), "end of line", "unexpected '" + peek().text + "'");
    }

private:
    std::vector<Token> toks_;
    std::size_t pos_ = 0;
};

// ---------------------------------------------------------------- expressions

std::size_t parent_pos(const Token& tok, std::span<const std::string> parents) {
    for (std::size_t i = 0; i < parents.size(); ++i)
        if (parents[i] == tok.text) return i;
    throw UnknownParentInExpression(tok.line, tok.col, "a declared parent",
                                    "'" + tok.text + "' is not a parent of this node");
}

ParamExpression parse_expression(Cursor& cur, std::span<const std::string> parents) {
    ParamExpression expr;

    const auto add_term = [&](ExprTerm term, const Token& at) {
        for (ExprTerm& t : expr.terms) {
            if (t.degree == term.degree && t.a == term.a && t.b == term.b) {
                if (!t.coef || !term.coef)
                    fail(at, "", "duplicate term with a hole at the same position");
                *t.coef += *term.coef;
                return;
            }
        }
        expr.terms.push_back(std::move(term));
    };

    bool first = true;
    double sign = 1.0;
    if (cur.accept_punct("-"))
        sign = -1.0;
    else
        cur.accept_punct("+");

    while (true) {
        // one term: factors joined by '*'
        const Token start = cur.peek();
        double coef = 1.0;
        bool saw_number = false;
        bool hole = false;
        std::vector<std::pair<std::string, std::size_t>> idents; // name, position

        while (true) {
            const Token& t = cur.peek();
            if (t.kind == Token::number) {
                coef *= cur.expect_number("a number");
                saw_number = true;
            } else if (t.kind == Token::punct && t.text == "?") {
                cur.take();
                if (hole) fail(t, "", "term has more than one '?'");
                hole = true;
            } else if (t.kind == Token::ident) {
                const Token& id = cur.take();
                std::size_t pos = parent_pos(id, parents);
                idents.emplace_back(id.text, pos);
                if (cur.accept_punct("^")) {
                    const Token& e = cur.peek();
                    const double ev = cur.expect_number("an exponent of 1 or 2");
                    if (ev == 2.0)
                        idents.emplace_back(id.text, pos);
                    else if (ev != 1.0)
                        throw NonQuadraticTerm(e.line, e.col, "an exponent of 1 or 2",
                                               "term exceeds total degree 2");
                }
            } else {
                fail(t, "a number, '?', or a parent name", "unexpected '" + t.text + "'");
            }
            if (!cur.accept_punct("*")) break;
        }

        if (idents.size() > 2)
            throw NonQuadraticTerm(start.line, start.col, "", "term exceeds total degree 2");
        if (hole && saw_number)
            fail(start, "", "a '?' hole cannot carry a fixed coefficient");
        if (hole && sign < 0.0) fail(start, "", "a '?' hole cannot be negated");

        ExprTerm term;
        term.degree = static_cast<int>(idents.size());
        if (term.degree >= 1) term.a = idents[0].first;
        if (term.degree == 2) {
            term.b = idents[1].first;
            if (idents[1].second < idents[0].second) std::swap(term.a, term.b);
        }
        term.coef = hole ? std::nullopt : std::optional<double>(sign * coef);
        add_term(std::move(term), start);

        first = false;
        if (cur.accept_punct("+"))
            sign = 1.0;
        else if (cur.accept_punct("-"))
            sign = -1.0;
        else
            break;
    }
    (void)first;

    // canonical order: bias, parents, quadratic pairs
    const auto pos_of = [&](const std::string& name) {
        for (std::size_t i = 0; i < parents.size(); ++i)
            if (parents[i] == name) return i;
        return parents.size();
    };
    std::sort(expr.terms.begin(), expr.terms.end(), [&](const ExprTerm& x, const ExprTerm& y) {
        if (x.degree != y.degree) return x.degree < y.degree;
        if (x.a != y.a) return pos_of(x.a) < pos_of(y.a);
        return pos_of(x.b) < pos_of(y.b);
    });
    return expr;
}

// -------------------------------------------------------- node & edge entries

struct RawParam {
    std::string name;
    std::vector<Token> tokens; // unresolved expression
    Token at;
};

struct RawNode {
    PartialNode node;            // body.params filled in the second pass
    DistKind kind{};             // when body is present
    std::vector<RawParam> params;
    bool has_body = false;
    std::vector<std::tuple<std::string, NodeCorrection, Token>> correction_clauses; // param name ("" = constrained)
    std::optional<double> target_mean;
    Token target_mean_at;
    std::optional<DType> dtype;
    Token at;
};

std::vector<Token> capture_expression(Cursor& cur) {
    // expression tokens run to the next ',' or ')' of the parameter list
    std::vector<Token> out;
    while (true) {
        const Token& t = cur.peek();
        if (t.kind == Token::end || (t.kind == Token::punct && (t.text == "," || t.text == ")")))
            break;
        if (t.kind == Token::punct && (t.text == "(" || t.text == "{" || t.text == "}"))
            fail(t, "", "'" + t.text + "' cannot appear inside a parameter expression");
        out.push_back(cur.take());
    }
    Token sentinel = cur.peek();
    sentinel.kind = Token::end;
    sentinel.text.clear();
    out.push_back(sentinel);
    return out;
}

DType parse_dtype(const Token& t) {
    if (t.text == "continuous") return DType::continuous;
    if (t.text == "binary") return DType::binary;
    if (t.text == "count") return DType::count;
    fail(t, "continuous, binary, or count", "unknown dtype '" + t.text + "'");
}

void parse_dist_body(Cursor& cur, RawNode& rn) {
    const Token& kind_tok = cur.expect_ident("a distribution kind");
    DistKind kind;
    if (!dist_kind_from_name(kind_tok.text, kind))
        fail(kind_tok, "a distribution kind", "unknown distribution '" + kind_tok.text + "'");
    rn.kind = kind;
    rn.has_body = true;

    cur.expect_punct("(");
    std::set<std::string> seen;
    while (true) {
        const Token& pname = cur.expect_ident("a parameter name");
        const auto& names = dist_param_names(kind);
        if (std::find(names.begin(), names.end(), pname.text) == names.end())
            fail(pname, "a parameter of " + std::string(dist_kind_name(kind)),
                 "unknown parameter '" + pname.text + "'");
        if (!seen.insert(pname.text).second)
            fail(pname, "", "parameter '" + pname.text + "' given twice");
        cur.expect_punct("=");
        rn.params.push_back({pname.text, capture_expression(cur), pname});
        if (cur.accept_punct(")")) break;
        cur.expect_punct(",");
    }
    for (const std::string& want : dist_param_names(kind))
        if (!seen.count(want))
            fail(kind_tok, "", std::string(dist_kind_name(kind)) + " needs parameter '" + want + "'");
}

void parse_node_clause(Cursor& cur, RawNode& rn) {
    const Token& t = cur.expect_ident("correction, target_mean, or dtype");
    if (t.text == "correction") {
        cur.expect_punct("(");
        NodeCorrection c;
        std::string pname; // empty = kind's constrained parameter
        if (cur.accept_ident("param")) {
            cur.expect_punct("=");
            pname = cur.expect_ident("a parameter name").text;
            std::set<std::string> seen;
            while (cur.accept_punct(",")) {
                const Token& key = cur.expect_ident("lower, upper, or target_mean");
                cur.expect_punct("=");
                if (!seen.insert(key.text).second) fail(key, "", "'" + key.text + "' given twice");
                if (key.text == "lower")
                    c.lower = cur.expect_number("a number");
                else if (key.text == "upper")
                    c.upper = cur.expect_number("a number");
                else if (key.text == "target_mean")
                    c.target_mean = cur.expect_number("a number");
                else
                    fail(key, "lower, upper, or target_mean", "unknown key '" + key.text + "'");
            }
            cur.expect_punct(")");
        } else {
            c.lower = cur.expect_number("the lower bound");
            cur.expect_punct(",");
            c.upper = cur.expect_number("the upper bound");
            cur.expect_punct(")");
        }
        rn.correction_clauses.emplace_back(pname, c, t);
    } else if (t.text == "target_mean") {
        cur.expect_punct("=");
        if (rn.target_mean) fail(t, "", "target_mean given twice");
        rn.target_mean = cur.expect_number("a number");
        rn.target_mean_at = t;
    } else if (t.text == "dtype") {
        cur.expect_punct("=");
        if (rn.dtype) fail(t, "", "dtype given twice");
        rn.dtype = parse_dtype(cur.expect_ident("continuous, binary, or count"));
    } else {
        fail(t, "correction, target_mean, or dtype", "unknown clause '" + t.text + "'");
    }
}

RawNode parse_node_line(Cursor& cur) {
    RawNode rn;
    const Token& name = cur.expect_ident("a node name");
    rn.node.name = name.text;
    rn.at = name;
    cur.expect_punct(":");

    const auto parse_inner = [&](Cursor& c) {
        if (c.accept_ident("random")) {
            rn.node.random = true;
        } else {
            parse_dist_body(c, rn);
        }
        while (c.accept_punct(",")) parse_node_clause(c, rn);
    };

    if (cur.accept_ident("optional")) {
        rn.node.optional = true;
        if (cur.accept_punct("(")) {
            const Token& p = cur.expect_ident("p");
            if (p.text != "p") fail(p, "p", "optional takes a single 'p=...' argument");
            cur.expect_punct("=");
            rn.node.presence_p = cur.expect_number("a probability");
            cur.expect_punct(")");
        }
        cur.expect_punct("{");
        parse_inner(cur);
        cur.expect_punct("}");
    } else if (cur.accept_ident("random")) {
        rn.node.random = true;
        while (cur.accept_punct(",")) parse_node_clause(cur, rn);
    } else {
        parse_dist_body(cur, rn);
        while (cur.accept_punct(",")) parse_node_clause(cur, rn);
    }
    cur.expect_end();

    if (rn.node.presence_p && !(*rn.node.presence_p >= 0.0 && *rn.node.presence_p <= 1.0))
        fail(rn.at, "", "presence probability must lie in [0, 1]");
    if (!rn.has_body && !rn.correction_clauses.empty())
        fail(std::get<2>(rn.correction_clauses.front()), "",
             "a correction clause needs a declared distribution");
    if (!rn.has_body && rn.target_mean)
        fail(rn.target_mean_at, "", "target_mean needs a declared distribution");
    return rn;
}

PartialEdge parse_edge_line(Cursor& cur) {
    PartialEdge pe;
    pe.source = cur.expect_ident("a source node").text;
    cur.expect_punct("->");
    pe.target = cur.expect_ident("a target node").text;
    cur.expect_punct(":");

    if (cur.accept_ident("random")) {
        pe.mode = EdgeMode::random_function;
    } else if (cur.accept_ident("required_if_exists")) {
        pe.mode = EdgeMode::required_if_exists;
    } else if (cur.accept_ident("optional")) {
        pe.mode = EdgeMode::optional;
        if (cur.accept_punct("(")) {
            const Token& p = cur.expect_ident("p");
            if (p.text != "p") fail(p, "p", "optional takes a single 'p=...' argument");
            cur.expect_punct("=");
            pe.presence_p = cur.expect_number("a probability");
            cur.expect_punct(")");
            if (!(*pe.presence_p >= 0.0 && *pe.presence_p <= 1.0))
                fail(p, "", "presence probability must lie in [0, 1]");
        }
    } else {
        const Token& fn = cur.expect_ident("an edge function");
        EdgeFuncKind kind;
        if (!edge_func_from_name(fn.text, kind))
            fail(fn, "an edge function", "unknown edge function '" + fn.text + "'");
        EdgeFunction f;
        f.kind = kind;
        if (cur.accept_punct("(")) {
            if (!cur.accept_punct(")")) {
                std::set<std::string> seen;
                while (true) {
                    const Token& key = cur.expect_ident("a function parameter");
                    cur.expect_punct("=");
                    const double v = cur.expect_number("a number");
                    if (!seen.insert(key.text).second)
                        fail(key, "", "'" + key.text + "' given twice");
                    const bool parametric = kind == EdgeFuncKind::sigmoid ||
                                            kind == EdgeFuncKind::gaussian_rbf ||
                                            kind == EdgeFuncKind::arctan;
                    if (parametric && key.text == "alpha")
                        f.alpha = v;
                    else if (parametric && key.text == "beta")
                        f.beta = v;
                    else if (parametric && key.text == "gamma")
                        f.gamma = v;
                    else if (kind == EdgeFuncKind::power && key.text == "phi")
                        f.phi = v;
                    else
                        fail(key, "", "'" + key.text + "' is not a parameter of " +
                                          std::string(edge_func_name(kind)));
                    if (cur.accept_punct(")")) break;
                    cur.expect_punct(",");
                }
            }
        }
        pe.mode = EdgeMode::fixed;
        pe.function = f;
    }

    while (cur.accept_punct(",")) {
        const Token& t = cur.expect_ident("correction");
        if (t.text != "correction") fail(t, "correction", "unknown clause '" + t.text + "'");
        if (pe.correction) fail(t, "", "correction given twice");
        pe.correction = true;
    }
    cur.expect_end();
    return pe;
}

} // namespace

// ------------------------------------------------------------- PartialGraph

bool ParamExpression::has_holes() const {
    return std::any_of(terms.begin(), terms.end(),
                       [](const ExprTerm& t) { return !t.coef.has_value(); });
}

const ExprTerm* ParamExpression::find(const ExprTerm& key) const {
    for (const ExprTerm& t : terms)
        if (t.degree == key.degree && t.a == key.a && t.b == key.b) return &t;
    return nullptr;
}

std::size_t PartialGraph::node_index(std::string_view name) const {
    for (std::size_t i = 0; i < nodes.size(); ++i)
        if (nodes[i].name == name) return i;
    throw UnknownNode("unknown node '" + std::string(name) + "'");
}

bool PartialGraph::has_node(std::string_view name) const {
    return std::any_of(nodes.begin(), nodes.end(),
                       [&](const PartialNode& n) { return n.name == name; });
}

std::vector<std::string> PartialGraph::declared_parents(std::string_view node) const {
    std::vector<std::size_t> idx;
    for (const PartialEdge& e : edges)
        if (e.target == node) idx.push_back(node_index(e.source));
    std::sort(idx.begin(), idx.end());
    std::vector<std::string> out;
    for (std::size_t i : idx) out.push_back(nodes[i].name);
    return out;
}

bool PartialGraph::fully_specified() const {
    for (const PartialNode& n : nodes) {
        if (n.random || n.optional || !n.body) return false;
        for (const ParamExpression& e : n.body->params)
            if (e.has_holes()) return false;
    }
    for (const PartialEdge& e : edges)
        if (e.mode != EdgeMode::fixed) return false;
    return true;
}

std::vector<std::optional<double>> expression_row(const ParamExpression& expr,
                                                  std::span<const std::string> parents) {
    const std::size_t d = parents.size();
    // a lone '?' randomizes the whole row: every basis element becomes a hole
    if (expr.terms.size() == 1 && expr.terms[0].degree == 0 && !expr.terms[0].coef)
        return std::vector<std::optional<double>>(zeta_length(d), std::nullopt);
    std::vector<std::optional<double>> row(zeta_length(d), 0.0);
    const auto pos_of = [&](const std::string& name) -> std::size_t {
        for (std::size_t i = 0; i < d; ++i)
            if (parents[i] == name) return i;
        return d;
    };
    for (const ExprTerm& t : expr.terms) {
        std::size_t at;
        if (t.degree == 0) {
            at = 0;
        } else if (t.degree == 1) {
            const std::size_t i = pos_of(t.a);
            if (i == d) continue; // parent dropped during randomization
            at = 1 + i;
        } else {
            std::size_t i = pos_of(t.a), j = pos_of(t.b);
            if (i == d || j == d) continue;
            if (j < i) std::swap(i, j);
            at = 1 + d + i * d - i * (i - 1) / 2 + (j - i);
        }
        row[at] = t.coef ? std::optional<double>(*t.coef) : std::nullopt;
    }
    return row;
}

Graph PartialGraph::to_graph() const {
    Graph g;
    for (const PartialNode& n : nodes) {
        if (n.random || n.optional || !n.body)
            throw Error("'" + n.name + "' is not fully specified; randomize the description first");
        const std::vector<std::string> parents = declared_parents(n.name);
        NodeSpec spec;
        spec.name = n.name;
        spec.kind = n.body->kind;
        spec.dtype = n.body->dtype.value_or(default_dtype(n.body->kind));
        for (const ParamExpression& e : n.body->params) {
            std::vector<double> row;
            for (const auto& v : expression_row(e, parents)) {
                if (!v)
                    throw Error("'" + n.name +
                                "' has unresolved '?' holes; randomize the description first");
                row.push_back(*v);
            }
            spec.weights.push_back(std::move(row));
        }
        spec.corrections = n.body->corrections;
        spec.corrections.resize(spec.weights.size());
        g.add_node(std::move(spec));
    }
    for (const PartialEdge& e : edges) {
        if (e.mode != EdgeMode::fixed || !e.function)
            throw Error("edge " + e.source + "->" + e.target +
                        " is not fully specified; randomize the description first");
        EdgeSpec spec;
        spec.source = e.source;
        spec.target = e.target;
        spec.function = *e.function;
        spec.correction.enabled = e.correction;
        g.add_edge(std::move(spec));
    }
    return validate(std::move(g));
}

// ------------------------------------------------------------------ parsing

ParamExpression parse_param_expression(std::string_view text,
                                       std::span<const std::string> parents) {
    Cursor cur(tokenize_line(text, 1));
    if (cur.at_end()) throw SyntaxError(1, 1, "an expression", "empty parameter expression");
    ParamExpression expr = parse_expression(cur, parents);
    cur.expect_end();
    return expr;
}

PartialGraph parse_description(std::string_view text) {
    std::vector<RawNode> raw_nodes;
    std::vector<PartialEdge> raw_edges;
    std::vector<Token> edge_at;

    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        std::string_view line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        start = pos + 1;

        Cursor cur(tokenize_line(line, line_no));
        if (cur.at_end()) {
            if (pos == text.size()) break;
            continue;
        }
        const Token& head = cur.expect_ident("node or edge");
        if (head.text == "node") {
            raw_nodes.push_back(parse_node_line(cur));
        } else if (head.text == "edge") {
            edge_at.push_back(cur.peek());
            raw_edges.push_back(parse_edge_line(cur));
        } else {
            fail(head, "node or edge", "unknown entry '" + head.text + "'");
        }
        if (pos == text.size()) break;
    }

    PartialGraph pg;
    for (RawNode& rn : raw_nodes) {
        if (pg.has_node(rn.node.name))
            throw DuplicateNode("node '" + rn.node.name + "' declared twice (line " +
                                std::to_string(rn.at.line) + ")");
        pg.nodes.push_back(rn.node);
    }
    std::set<std::pair<std::string, std::string>> seen_edges;
    for (std::size_t i = 0; i < raw_edges.size(); ++i) {
        const PartialEdge& e = raw_edges[i];
        const Token& at = edge_at[i];
        if (!pg.has_node(e.source))
            throw UnknownParent("line " + std::to_string(at.line) + ": edge source '" + e.source +
                                "' is not a declared node");
        if (!pg.has_node(e.target))
            throw UnknownParent("line " + std::to_string(at.line) + ": edge target '" + e.target +
                                "' is not a declared node");
        if (!seen_edges.insert({e.source, e.target}).second)
            fail(at, "", "edge " + e.source + "->" + e.target + " declared twice");
        pg.edges.push_back(e);
    }

    // params could not be resolved until all edges were known
    for (std::size_t i = 0; i < raw_nodes.size(); ++i) {
        RawNode& rn = raw_nodes[i];
        if (!rn.has_body) continue;
        const std::vector<std::string> parents = pg.declared_parents(rn.node.name);

        NodeBody body;
        body.kind = rn.kind;
        // an explicit dtype equal to the kind's default carries no information;
        // normalizing it away keeps parse/serialize a fixpoint on the structure
        body.dtype = (rn.dtype && *rn.dtype == default_dtype(rn.kind)) ? std::nullopt : rn.dtype;
        body.params.resize(dist_param_count(rn.kind));
        body.corrections.resize(dist_param_count(rn.kind));
        for (RawParam& rp : rn.params) {
            const auto& names = dist_param_names(rn.kind);
            const std::size_t k = static_cast<std::size_t>(
                std::find(names.begin(), names.end(), rp.name) - names.begin());
            Cursor cur(rp.tokens);
            if (cur.at_end()) fail(rp.at, "an expression", "empty parameter expression");
            body.params[k] = parse_expression(cur, parents);
            cur.expect_end();
        }

        for (const auto& [pname, corr, at] : rn.correction_clauses) {
            std::size_t k;
            if (pname.empty()) {
                const auto ix = dist_constrained_param(rn.kind);
                if (!ix)
                    fail(at, "correction(param=...)",
                         std::string(dist_kind_name(rn.kind)) +
                             " has no range-constrained parameter; name one explicitly");
                k = *ix;
            } else {
                const auto& names = dist_param_names(rn.kind);
                const auto it = std::find(names.begin(), names.end(), pname);
                if (it == names.end())
                    fail(at, "a parameter of " + std::string(dist_kind_name(rn.kind)),
                         "unknown parameter '" + pname + "'");
                k = static_cast<std::size_t>(it - names.begin());
            }
            if (body.corrections[k]) fail(at, "", "duplicate correction for one parameter");
            body.corrections[k] = corr;
        }
        if (rn.target_mean) {
            const auto ix = dist_constrained_param(rn.kind);
            if (!ix || !body.corrections[*ix])
                fail(rn.target_mean_at, "", "target_mean needs a correction clause");
            body.corrections[*ix]->target_mean = rn.target_mean;
        }
        for (const auto& c : body.corrections) {
            if (!c) continue;
            if (!(c->lower < c->upper))
                fail(rn.at, "", "correction bounds must satisfy lower < upper");
            if (c->target_mean && !(*c->target_mean > c->lower && *c->target_mean < c->upper))
                fail(rn.at, "", "target mean must lie strictly inside (lower, upper)");
        }
        pg.nodes[i].body = std::move(body);
    }
    return pg;
}

} // namespace parcs
