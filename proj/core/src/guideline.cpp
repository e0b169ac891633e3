#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <set>

#include "parcs/errors.hpp"
#include "parcs/guideline.hpp"

namespace parcs {

// ------------------------------------------------------------ IntervalUnion

bool IntervalUnion::contains(double v) const {
    return std::any_of(parts.begin(), parts.end(),
                       [v](const auto& p) { return p.first <= v && v <= p.second; });
}

double IntervalUnion::total_length() const {
    double sum = 0.0;
    for (const auto& [lo, hi] : parts) sum += hi - lo;
    return sum;
}

void IntervalUnion::check() const {
    if (parts.empty()) throw InvalidRange("empty interval union");
    for (const auto& [lo, hi] : parts) {
        if (!std::isfinite(lo) || !std::isfinite(hi))
            throw InvalidRange("interval bounds must be finite");
        if (lo > hi) throw InvalidRange("interval has lower bound above upper bound");
    }
}

double IntervalUnion::sample(UniformStream& rng) const {
    check();
    const double total = total_length();
    if (total == 0.0) // all parts are points: uniform over the points
        return parts[rng.index(parts.size())].first;
    double x = rng.next() * total;
    for (const auto& [lo, hi] : parts) {
        const double w = hi - lo;
        if (x < w) return lo + x;
        x -= w;
    }
    return parts.back().second;
}

// ----------------------------------------------------------- ConnectionMask

bool ConnectionMask::admissible(std::string_view source, std::string_view target) const {
    const auto group_of = [&](std::string_view node) -> const std::string* {
        for (const auto& [name, members] : groups)
            if (std::find(members.begin(), members.end(), node) != members.end()) return &name;
        return nullptr;
    };
    const std::string* gs = group_of(source);
    const std::string* gt = group_of(target);
    // The mask is a 0/1 matrix over (source group x target group); a node
    // outside every group has no row or column, hence no 1 entries.
    if (!gs || !gt) return false;
    return std::any_of(allowed.begin(), allowed.end(),
                       [&](const auto& p) { return p.first == *gs && p.second == *gt; });
}

// ------------------------------------------------------------------ parsing

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
    const auto is_digit = [](char c) { return std::isdigit(static_cast<unsigned char>(c)); };
    while (i < line.size()) {
        const char c = line[i];
        if (c == '#') break;
        if (c == ' ' || c == '\t') {
            ++i;
            continue;
        }
        const int col = static_cast<int>(i) + 1;
        if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
            std::size_t j = i + 1;
            while (j < line.size() &&
                   (std::isalnum(static_cast<unsigned char>(line[j])) || line[j] == '_'))
                ++j;
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
        } else if (std::string_view(":,[]{}()=-+").find(c) != std::string_view::npos) {
            out.push_back({Token::punct, std::string(1, c), line_no, col});
            ++i;
        } else {
            throw SyntaxError(line_no, col, "", std::string("stray character '") + c + "'");
        }
    }
    out.push_back({Token::end, "", line_no, static_cast<int>(line.size()) + 1});
    return out;
}

class Cursor {
public:
    explicit Cursor(std::vector<Token> toks) : toks_(std::move(toks)) {}
    const Token& peek() const { return toks_[std::min(pos_, toks_.size() - 1)]; }
    const Token& take() { return toks_[std::min(pos_++, toks_.size() - 1)]; }
    bool at_end() const { return peek().kind == Token::end; }
    bool accept_punct(std::string_view p) {
        if (peek().kind == Token::punct && peek().text == p) {
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

// part := '[' num ',' num ']' | '{' num (',' num)* '}' | num
// union := part (('U'|'u') part)*
IntervalUnion parse_interval_union(Cursor& cur) {
    IntervalUnion iu;
    while (true) {
        if (cur.accept_punct("[")) {
            const double lo = cur.expect_number("a lower bound");
            cur.expect_punct(",");
            const double hi = cur.expect_number("an upper bound");
            cur.expect_punct("]");
            iu.parts.emplace_back(lo, hi);
        } else if (cur.accept_punct("{")) {
            while (true) {
                const double v = cur.expect_number("a point value");
                iu.parts.emplace_back(v, v);
                if (cur.accept_punct("}")) break;
                cur.expect_punct(",");
            }
        } else {
            const double v = cur.expect_number("an interval, point set, or number");
            iu.parts.emplace_back(v, v);
        }
        if (!(cur.peek().kind == Token::ident && (cur.peek().text == "U" || cur.peek().text == "u")))
            break;
        cur.take();
    }
    iu.check();
    return iu;
}

bool parse_bool(Cursor& cur) {
    const Token& t = cur.expect_ident("true or false");
    if (t.text == "true") return true;
    if (t.text == "false") return false;
    fail(t, "true or false", "unexpected '" + t.text + "'");
}

EdgeFunctionChoice parse_function_choice(Cursor& cur) {
    const Token& name = cur.expect_ident("an edge function");
    EdgeFunctionChoice c;
    if (!edge_func_from_name(name.text, c.kind))
        fail(name, "an edge function", "unknown edge function '" + name.text + "'");
    if (!cur.accept_punct("(")) return c;
    if (cur.accept_punct(")")) return c;
    std::set<std::string> seen;
    while (true) {
        const Token& key = cur.expect_ident("a function parameter");
        cur.expect_punct("=");
        if (!seen.insert(key.text).second) fail(key, "", "'" + key.text + "' given twice");
        const bool parametric = c.kind == EdgeFuncKind::sigmoid ||
                                c.kind == EdgeFuncKind::gaussian_rbf ||
                                c.kind == EdgeFuncKind::arctan;
        IntervalUnion iu = parse_interval_union(cur);
        if (parametric && key.text == "alpha")
            c.alpha = std::move(iu);
        else if (parametric && key.text == "beta")
            c.beta = std::move(iu);
        else if (parametric && key.text == "gamma")
            c.gamma = std::move(iu);
        else if (c.kind == EdgeFuncKind::power && key.text == "phi")
            c.phi = std::move(iu);
        else
            fail(key, "",
                 "'" + key.text + "' is not a parameter of " + std::string(edge_func_name(c.kind)));
        if (cur.accept_punct(")")) break;
        cur.expect_punct(",");
    }
    return c;
}

} // namespace

IntervalUnion parse_interval_union(std::string_view text) {
    Cursor cur(tokenize_line(text, 1));
    IntervalUnion iu = parse_interval_union(cur);
    cur.expect_end();
    return iu;
}

Guideline parse_guideline(std::string_view text) {
    Guideline g;
    bool have_mask = false;
    ConnectionMask mask;
    std::set<std::string> seen_keys;

    enum class Section { none, nodes, edges, corrections, groups } section = Section::none;

    int line_no = 0;
    std::size_t start = 0;
    while (start <= text.size()) {
        std::size_t pos = text.find('\n', start);
        if (pos == std::string_view::npos) pos = text.size();
        std::string_view line = text.substr(start, pos - start);
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        ++line_no;
        const bool last = pos == text.size();
        start = pos + 1;

        Cursor cur(tokenize_line(line, line_no));
        if (cur.at_end()) {
            if (last) break;
            continue;
        }
        const Token& key = cur.expect_ident("a section or key");
        cur.expect_punct(":");
        if (cur.at_end()) { // bare "name:" opens a section
            if (key.text == "nodes")
                section = Section::nodes;
            else if (key.text == "edges")
                section = Section::edges;
            else if (key.text == "corrections")
                section = Section::corrections;
            else if (key.text == "groups")
                section = Section::groups;
            else
                fail(key, "nodes, edges, corrections, or groups",
                     "unknown section '" + key.text + "'");
            if (last) break;
            continue;
        }

        if (section != Section::groups && !seen_keys.insert(key.text).second)
            fail(key, "", "'" + key.text + "' given twice");

        switch (section) {
        case Section::none:
            fail(key, "a section header", "'" + key.text + "' appears before any section");
        case Section::nodes:
            if (key.text == "distributions") {
                g.distribution_choices.clear();
                while (true) {
                    const Token& t = cur.expect_ident("a distribution kind");
                    DistKind kind;
                    if (!dist_kind_from_name(t.text, kind))
                        fail(t, "a distribution kind", "unknown distribution '" + t.text + "'");
                    g.distribution_choices.push_back(kind);
                    if (!cur.accept_punct(",")) break;
                }
                if (g.distribution_choices.empty())
                    throw EmptyChoiceList("no distributions to choose from");
            } else if (key.text == "coefficients") {
                g.coefficient_range = parse_interval_union(cur);
            } else if (key.text == "existence") {
                g.node_existence_default = cur.expect_number("a probability");
                if (!(g.node_existence_default >= 0.0 && g.node_existence_default <= 1.0))
                    fail(key, "", "existence must lie in [0, 1]");
            } else if (key.text == "quadratic") {
                g.quadratic_terms = parse_bool(cur);
            } else {
                fail(key, "distributions, coefficients, existence, or quadratic",
                     "unknown key '" + key.text + "'");
            }
            break;
        case Section::edges:
            if (key.text == "functions") {
                g.edge_function_choices.clear();
                while (true) {
                    g.edge_function_choices.push_back(parse_function_choice(cur));
                    if (!cur.accept_punct(",")) break;
                }
                if (g.edge_function_choices.empty())
                    throw EmptyChoiceList("no edge functions to choose from");
            } else if (key.text == "sparsity") {
                g.sparsity = parse_interval_union(cur);
                for (const auto& [lo, hi] : g.sparsity.parts)
                    if (lo < 0.0 || hi > 1.0)
                        throw InvalidRange("sparsity must lie within [0, 1]");
            } else {
                fail(key, "functions or sparsity", "unknown key '" + key.text + "'");
            }
            break;
        case Section::corrections:
            if (key.text == "policy") {
                const Token& t = cur.expect_ident("always, bounded_only, or never");
                if (t.text == "always")
                    g.correction_policy = CorrectionPolicy::always;
                else if (t.text == "bounded_only")
                    g.correction_policy = CorrectionPolicy::bounded_only;
                else if (t.text == "never")
                    g.correction_policy = CorrectionPolicy::never;
                else
                    fail(t, "always, bounded_only, or never", "unknown policy '" + t.text + "'");
            } else if (key.text == "lower") {
                g.correction_lower = parse_interval_union(cur);
            } else if (key.text == "upper") {
                g.correction_upper = parse_interval_union(cur);
            } else if (key.text == "target_mean") {
                g.target_mean_range = parse_interval_union(cur);
            } else if (key.text == "edges") {
                g.edge_corrections = parse_bool(cur);
            } else {
                fail(key, "policy, lower, upper, target_mean, or edges",
                     "unknown key '" + key.text + "'");
            }
            break;
        case Section::groups:
            have_mask = true;
            if (key.text == "allow") {
                while (true) {
                    const Token& src = cur.expect_ident("a group name");
                    cur.expect_punct("->");
                    const Token& dst = cur.expect_ident("a group name");
                    mask.allowed.emplace_back(src.text, dst.text);
                    if (!cur.accept_punct(",")) break;
                }
            } else {
                if (mask.groups.count(key.text))
                    fail(key, "", "group '" + key.text + "' given twice");
                auto& members = mask.groups[key.text];
                while (true) {
                    members.push_back(cur.expect_ident("a node name").text);
                    if (!cur.accept_punct(",")) break;
                }
            }
            break;
        }
        cur.expect_end();
        if (last) break;
    }

    if (have_mask) {
        for (const auto& [src, dst] : mask.allowed) {
            if (!mask.groups.count(src))
                throw SyntaxError(0, 0, "", "allow refers to unknown group '" + src + "'");
            if (!mask.groups.count(dst))
                throw SyntaxError(0, 0, "", "allow refers to unknown group '" + dst + "'");
        }
        g.mask = std::move(mask);
    }

    // a draw from `lower` must stay below every draw from `upper`
    double max_lo = g.correction_lower.parts.front().second;
    double min_hi = g.correction_upper.parts.front().first;
    for (const auto& p : g.correction_lower.parts) max_lo = std::max(max_lo, p.second);
    for (const auto& p : g.correction_upper.parts) min_hi = std::min(min_hi, p.first);
    if (!(max_lo < min_hi))
        throw InvalidRange("correction lower bounds must stay below upper bounds");
    if (g.target_mean_range) {
        g.target_mean_range->check();
        for (const auto& [lo, hi] : g.target_mean_range->parts)
            if (!(lo > max_lo && hi < min_hi))
                throw InvalidRange("target means must lie strictly inside the correction bounds");
    }
    g.coefficient_range.check();
    g.sparsity.check();
    return g;
}

} // namespace parcs
