#include <doctest.h>

#include <optional>
#include <random>
#include <string>
#include <vector>

#include "parcs/errors.hpp"
#include "parcs/graph.hpp"
#include "parcs/pdl.hpp"

using namespace parcs;

namespace {

using Row = std::vector<std::optional<double>>;

Row row_of(const std::string& expr_text, std::vector<std::string> parents) {
    return expression_row(parse_param_expression(expr_text, parents), parents);
}

} // namespace

TEST_SUITE("pdl") {

TEST_CASE("a mixed partial description parses into its declared structure") {
    const std::string text =
        "# three observed variables and one latent candidate\n"
        "node Z1: normal(mu=0, sigma=1)\n"
        "node Z2: bernoulli(p=?), correction(0, 1), target_mean=0.4\n"
        "node Z3: random\n"
        "node Z4: optional(p=0.6) { normal(mu=2 + Z1, sigma=1) }\n"
        "\n"
        "edge Z1 -> Z2: identity\n"
        "edge Z1 -> Z4: sigmoid(alpha=1, beta=0, gamma=1)\n"
        "edge Z2 -> Z3: random\n"
        "edge Z1 -> Z3: optional(p=0.3)\n";
    const PartialGraph pg = parse_description(text);

    REQUIRE(pg.nodes.size() == 4);
    CHECK(pg.nodes[0].name == "Z1");
    CHECK_FALSE(pg.nodes[0].random);
    CHECK_FALSE(pg.nodes[0].optional);
    REQUIRE(pg.nodes[0].body);
    CHECK(pg.nodes[0].body->kind == DistKind::normal);

    REQUIRE(pg.nodes[1].body);
    CHECK(pg.nodes[1].body->params[0].has_holes());
    REQUIRE(pg.nodes[1].body->corrections[0]);
    CHECK(pg.nodes[1].body->corrections[0]->lower == 0.0);
    CHECK(pg.nodes[1].body->corrections[0]->upper == 1.0);
    CHECK(pg.nodes[1].body->corrections[0]->target_mean == 0.4);

    CHECK(pg.nodes[2].random);
    CHECK_FALSE(pg.nodes[2].body);

    CHECK(pg.nodes[3].optional);
    CHECK(pg.nodes[3].presence_p == 0.6);
    REQUIRE(pg.nodes[3].body);

    REQUIRE(pg.edges.size() == 4);
    CHECK(pg.edges[0].mode == EdgeMode::fixed);
    CHECK(pg.edges[1].function->kind == EdgeFuncKind::sigmoid);
    CHECK(pg.edges[2].mode == EdgeMode::random_function);
    CHECK(pg.edges[3].mode == EdgeMode::optional);
    CHECK(pg.edges[3].presence_p == 0.3);

    CHECK_FALSE(pg.fully_specified());
    CHECK(pg.declared_parents("Z3") == std::vector<std::string>{"Z1", "Z2"});
}

TEST_CASE("empty and comment-only text give an empty description") {
    CHECK(parse_description("").nodes.empty());
    const PartialGraph pg = parse_description("# nothing to see\n\n   # still nothing\n");
    CHECK(pg.nodes.empty());
    CHECK(pg.edges.empty());
    CHECK(pg.fully_specified()); // vacuously
}

TEST_CASE("edges must point at declared nodes") {
    CHECK_THROWS_AS(parse_description("node A: normal(mu=0, sigma=1)\n"
                                      "edge A -> B: identity\n"),
                    UnknownParent);
    CHECK_THROWS_AS(parse_description("node A: normal(mu=0, sigma=1)\n"
                                      "edge Q -> A: identity\n"),
                    UnknownParent);
}

TEST_CASE("duplicate declarations are rejected") {
    CHECK_THROWS_AS(parse_description("node A: normal(mu=0, sigma=1)\n"
                                      "node A: bernoulli(p=0.5)\n"),
                    DuplicateNode);
    CHECK_THROWS_AS(parse_description("node A: normal(mu=0, sigma=1)\n"
                                      "node B: normal(mu=A, sigma=1)\n"
                                      "edge A -> B: identity\n"
                                      "edge A -> B: identity\n"),
                    SyntaxError);
}

TEST_CASE("syntax errors carry line and column diagnostics") {
    try {
        parse_description("node A: normal(mu=0, sigma=1)\n"
                          "node B: gauss(mu=0, sigma=1)\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 2);
        CHECK(e.col() == 9);
        CHECK(std::string(e.what()).find("gauss") != std::string::npos);
    }
    // expected-token hint is part of the message
    try {
        parse_description("node A normal(mu=0, sigma=1)\n");
        FAIL("expected SyntaxError");
    } catch (const SyntaxError& e) {
        CHECK(e.line() == 1);
        CHECK(std::string(e.what()).find(":") != std::string::npos);
    }
}

TEST_CASE("malformed inputs throw instead of crashing") {
    const char* bad[] = {
        "node",
        "node :",
        "node A:",
        "node A: normal",
        "node A: normal(mu=0)",
        "node A: normal(mu=0, sigma=1, sigma=2)",
        "node A: normal(mu=0, sigma=1), correction(1)",
        "node A: normal(mu=0, sigma=1), correction(2, 1)",
        "node A: bernoulli(p=0.5), target_mean=0.4",
        "node A: poisson(lambda=(3))",
        "edge",
        "edge A",
        "edge A -> : identity",
        "node A: normal(mu=0, sigma=1)\nedge A -> A: warp",
        "blob A: normal(mu=0, sigma=1)",
        "node A: optional { random",
        "node A: normal(mu=0, sigma=1) trailing",
        "node 9A: normal(mu=0, sigma=1)",
    };
    for (const char* text : bad) {
        CAPTURE(text);
        CHECK_THROWS_AS(parse_description(text), Error);
    }
}

TEST_CASE("expression rows land on the feature-vector layout") {
    const std::vector<std::string> two = {"Z1", "Z2"};
    SUBCASE("linear terms") {
        const Row r = row_of("1 + Z1 + Z2", two);
        CHECK(r == Row{1.0, 1.0, 1.0, 0.0, 0.0, 0.0});
    }
    SUBCASE("interaction lands in the cross slot") {
        const Row r = row_of("2 + Z1*Z2", two);
        CHECK(r == Row{2.0, 0.0, 0.0, 0.0, 1.0, 0.0});
    }
    SUBCASE("squares use the diagonal slots") {
        const Row r = row_of("Z1^2 - 3*Z2^2", two);
        CHECK(r == Row{0.0, 0.0, 0.0, 1.0, 0.0, -3.0});
    }
    SUBCASE("coefficients multiply and signs fold in") {
        const Row r = row_of("-2*Z1 + 0.5*Z2 - 1", two);
        CHECK(r == Row{-1.0, -2.0, 0.5, 0.0, 0.0, 0.0});
    }
    SUBCASE("duplicate basis terms accumulate") {
        const Row r = row_of("Z1 + 2*Z1", two);
        CHECK(r == Row{0.0, 3.0, 0.0, 0.0, 0.0, 0.0});
    }
    SUBCASE("product order normalizes to declaration order") {
        const Row a = row_of("Z2*Z1", two);
        const Row b = row_of("Z1*Z2", two);
        CHECK(a == b);
    }
    SUBCASE("holes stay holes") {
        const Row r = row_of("? + 2*Z1 + ?*Z2", two);
        REQUIRE(r.size() == 6);
        CHECK_FALSE(r[0].has_value());
        CHECK(r[1] == 2.0);
        CHECK_FALSE(r[2].has_value());
        CHECK(r[3] == 0.0);
    }
    SUBCASE("a bare hole blankets the whole row") {
        const Row r = row_of("?", two);
        REQUIRE(r.size() == 6);
        for (const auto& v : r) CHECK_FALSE(v.has_value());
        // with no parents the row is the single bias hole
        const Row r0 = row_of("?", {});
        REQUIRE(r0.size() == 1);
        CHECK_FALSE(r0[0].has_value());
    }
    SUBCASE("terms over unknown names vanish from the row") {
        const std::vector<std::string> z9 = {"Z9"};
        ParamExpression e = parse_param_expression("1 + Z9", z9);
        const Row r = expression_row(e, two);
        CHECK(r == Row{1.0, 0.0, 0.0, 0.0, 0.0, 0.0});
    }
}

TEST_CASE("expressions beyond quadratic are rejected") {
    const std::vector<std::string> two = {"Z1", "Z2"};
    CHECK_THROWS_AS(parse_param_expression("Z1^3", two), NonQuadraticTerm);
    CHECK_THROWS_AS(parse_param_expression("Z1*Z2*Z1", two), NonQuadraticTerm);
    CHECK_THROWS_AS(parse_param_expression("Z1^2 * Z2", two), NonQuadraticTerm);
    // unknown names inside an expression are a syntax-level error
    CHECK_THROWS_AS(parse_param_expression("1 + W", two), Error);
}

TEST_CASE("descriptions with unresolved parts refuse graph conversion") {
    const PartialGraph holes = parse_description("node A: normal(mu=?, sigma=1)\n");
    CHECK_THROWS_AS(holes.to_graph(), Error);
    const PartialGraph rand = parse_description("node A: random\n");
    CHECK_THROWS_AS(rand.to_graph(), Error);
    const PartialGraph opt =
        parse_description("node A: optional { normal(mu=0, sigma=1) }\n");
    CHECK_THROWS_AS(opt.to_graph(), Error);
}

TEST_CASE("fully specified text converts and samples") {
    const PartialGraph pg = parse_description(
        "node Z1: normal(mu=1, sigma=1)\n"
        "node Z2: normal(mu=2 + 0.5*Z1 - Z1^2, sigma=1), dtype=continuous\n"
        "edge Z1 -> Z2: power(phi=2)\n");
    CHECK(pg.fully_specified());
    const Graph g = pg.to_graph();
    CHECK(g.nodes.size() == 2);
    CHECK(g.nodes[1].weights[0] == std::vector<double>{2.0, 0.5, -1.0});
    CHECK(g.edges[0].function.phi == 2.0);
    CHECK_NOTHROW(sample(g, 16, 1));
}

TEST_CASE("serialization round-trips structurally") {
    const std::string text =
        "node Z1: normal(mu=0, sigma=1)\n"
        "node Z2: bernoulli(p=?), correction(0, 1), target_mean=0.4, dtype=binary\n"
        "node Z3: random\n"
        "node Z4: optional(p=0.25) { exponential(rate=2 + Z1^2), correction(param=rate, "
        "lower=0.5, upper=9) }\n"
        "edge Z1 -> Z2: gaussian_rbf(alpha=2, beta=0.5, gamma=3), correction\n"
        "edge Z1 -> Z4: random\n"
        "edge Z2 -> Z3: optional\n"
        "edge Z2 -> Z4: required_if_exists\n";
    const PartialGraph pg = parse_description(text);
    const std::string canon = serialize(pg);
    const PartialGraph back = parse_description(canon);
    CHECK(back == pg);
    // canonical text is a fixpoint
    CHECK(serialize(back) == canon);
}

TEST_CASE("graph serialization survives the round trip") {
    Graph g;
    NodeSpec a;
    a.name = "A";
    a.kind = DistKind::normal;
    a.weights = {{0.1}, {1.25}};
    a.corrections.resize(2);
    NodeSpec b;
    b.name = "B";
    b.kind = DistKind::bernoulli;
    b.weights = {{0.0, 0.5, 0.25}};
    NodeCorrection c;
    c.lower = 0.0;
    c.upper = 1.0;
    b.corrections = {c};
    g.add_node(std::move(a));
    g.add_node(std::move(b));
    EdgeSpec e;
    e.source = "A";
    e.target = "B";
    e.function.kind = EdgeFuncKind::arctan;
    e.function.alpha = 1.5;
    g.add_edge(std::move(e));
    g = validate(std::move(g));

    const PartialGraph back = parse_description(serialize(g));
    CHECK(back.fully_specified());
    const Graph g2 = back.to_graph();
    CHECK(g2.nodes == g.nodes);
    CHECK(g2.edges == g.edges);
}

TEST_CASE("random line noise never crashes the parser") {
    std::mt19937_64 rng(2024);
    const std::string alphabet = "nodeedg AZ19->:(),{}=?^+-*.#\t _";
    std::uniform_int_distribution<std::size_t> pick(0, alphabet.size() - 1);
    std::uniform_int_distribution<int> len(0, 60);
    for (int iter = 0; iter < 3000; ++iter) {
        std::string text;
        const int lines = 1 + iter % 3;
        for (int l = 0; l < lines; ++l) {
            const int n = len(rng);
            for (int i = 0; i < n; ++i) text.push_back(alphabet[pick(rng)]);
            text.push_back('\n');
        }
        try {
            (void)parse_description(text);
        } catch (const Error&) {
            // any engine error is fine; crashes and foreign exceptions are not
        }
    }
}

} // TEST_SUITE
