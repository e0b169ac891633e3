#include <doctest.h>

#include <cmath>
#include <vector>

#include "parcs/errors.hpp"
#include "parcs/graph.hpp"

using namespace parcs;

namespace {

NodeSpec normal_node(const std::string& name, std::vector<double> mu_row,
                     std::vector<double> sigma_row) {
    NodeSpec n;
    n.name = name;
    n.kind = DistKind::normal;
    n.weights = {std::move(mu_row), std::move(sigma_row)};
    n.corrections.resize(2);
    return n;
}

NodeSpec const_node(const std::string& name, double value) {
    NodeSpec n;
    n.name = name;
    n.kind = DistKind::deterministic;
    n.weights = {{value}};
    n.corrections.resize(1);
    return n;
}

EdgeSpec edge(const std::string& s, const std::string& t,
              EdgeFuncKind k = EdgeFuncKind::identity) {
    EdgeSpec e;
    e.source = s;
    e.target = t;
    e.function.kind = k;
    return e;
}

// Z1 -> Z2, Z1 -> Z3, Z2 -> Z3 with the worked three-node example weights
Graph example_graph() {
    Graph g;
    g.add_node(const_node("Z1", 0.2));
    g.add_node(const_node("Z2", 0.3));
    g.add_node(normal_node("Z3", {1, 1, 1, 0, 0, 0}, {2, 0, 0, 0, 1, 0}));
    g.add_edge(edge("Z1", "Z2")); // makes Z2 downstream of Z1 (weight 0)
    g.add_edge(edge("Z1", "Z3"));
    g.add_edge(edge("Z2", "Z3"));
    // Z2 depends on Z1 structurally: value row over (1, z1, z1^2)
    g.nodes[1].weights = {{0.3, 0.0, 0.0}};
    return g;
}

} // namespace

TEST_SUITE("graph") {

TEST_CASE("validation computes the topological order") {
    Graph g = validate(example_graph());
    REQUIRE(g.topo_order().size() == 3);
    CHECK(g.nodes[g.topo_order()[0]].name == "Z1");
    CHECK(g.nodes[g.topo_order()[1]].name == "Z2");
    CHECK(g.nodes[g.topo_order()[2]].name == "Z3");
    CHECK(g.validated());
}

TEST_CASE("single node validates to itself") {
    Graph g;
    g.add_node(const_node("A", 1.0));
    g = validate(std::move(g));
    CHECK(g.topo_order() == std::vector<std::size_t>{0});
}

TEST_CASE("declaration order breaks topological ties") {
    Graph g;
    g.add_node(const_node("B", 1));
    g.add_node(const_node("A", 2));
    g.add_node(normal_node("C", {0, 1, 1, 0, 0, 0}, {1, 0, 0, 0, 0, 0}));
    g.add_edge(edge("B", "C"));
    g.add_edge(edge("A", "C"));
    g = validate(std::move(g));
    CHECK(g.nodes[g.topo_order()[0]].name == "B"); // declared first
    CHECK(g.nodes[g.topo_order()[1]].name == "A");
    CHECK(g.nodes[g.topo_order()[2]].name == "C");
}

TEST_CASE("cycles are reported with the offending nodes") {
    Graph g;
    g.add_node(normal_node("A", {0, 1, 0}, {1, 0, 0}));
    g.add_node(normal_node("B", {0, 1, 0}, {1, 0, 0}));
    g.add_edge(edge("A", "B"));
    g.add_edge(edge("B", "A"));
    try {
        validate(std::move(g));
        FAIL("expected CycleDetected");
    } catch (const CycleDetected& e) {
        CHECK(e.cycle().size() >= 2);
    }
}

TEST_CASE("structural defects are rejected") {
    SUBCASE("unknown endpoint") {
        Graph g;
        g.add_node(const_node("A", 1));
        g.add_edge(edge("A", "ghost"));
        CHECK_THROWS_AS(validate(std::move(g)), UnknownParent);
    }
    SUBCASE("duplicate names") {
        Graph g;
        g.add_node(const_node("A", 1));
        g.add_node(const_node("A", 2));
        CHECK_THROWS_AS(validate(std::move(g)), DuplicateNode);
    }
    SUBCASE("wrong row arity") {
        Graph g;
        g.add_node(const_node("A", 1));
        g.add_node(normal_node("B", {0, 1}, {1, 0})); // zeta over one parent has length 3
        g.add_edge(edge("A", "B"));
        CHECK_THROWS_AS(validate(std::move(g)), ShapeMismatch);
    }
    SUBCASE("wrong parameter count") {
        Graph g;
        NodeSpec n;
        n.name = "A";
        n.kind = DistKind::normal;
        n.weights = {{0.0}}; // normal needs two rows
        n.corrections.resize(1);
        g.add_node(std::move(n));
        CHECK_THROWS_AS(validate(std::move(g)), ShapeMismatch);
    }
}

TEST_CASE("parent queries are declaration-index sorted") {
    Graph g = validate(example_graph());
    CHECK(g.parent_names("Z3") == std::vector<std::string>{"Z1", "Z2"});
    CHECK(g.parent_names("Z1").empty());
}

TEST_CASE("calibration is needed only for unfrozen work") {
    Graph g = example_graph();
    g = validate(std::move(g));
    CHECK_FALSE(g.needs_calibration()); // no corrections at all

    Graph h = example_graph();
    NodeCorrection c;
    c.lower = 0.0;
    c.upper = 5.0;
    c.target_mean = 2.0;
    h.nodes[2].corrections[0] = c;
    h = validate(std::move(h));
    CHECK(h.needs_calibration());
    h = instantiate(std::move(h), 1000, 7);
    CHECK_FALSE(h.needs_calibration());
    CHECK(h.calibrated());
    CHECK(h.burn_in_used() == 1000);
}

TEST_CASE("offset calibration hits a known oracle") {
    // Bernoulli p raw = 2*Z1 with Z1 ~ N(10,1): burn-in mean of the raw
    // parameter is about 20, so the offset for target 0.5 lands near 20.
    Graph g;
    g.add_node(normal_node("Z1", {10}, {1}));
    NodeSpec b;
    b.name = "B";
    b.kind = DistKind::bernoulli;
    b.weights = {{0, 2, 0}};
    NodeCorrection c;
    c.lower = 0.0;
    c.upper = 1.0;
    c.target_mean = 0.5;
    b.corrections = {c};
    g.add_node(std::move(b));
    g.add_edge(edge("Z1", "B"));
    g = instantiate(validate(std::move(g)), 10000, 3);
    CHECK(std::abs(g.nodes[1].corrections[0]->offset - 20.0) < 0.2);
}

TEST_CASE("edge moments freeze to the parent's distribution") {
    Graph g;
    g.add_node(normal_node("Z1", {10}, {1}));
    g.add_node(normal_node("Z2", {0, 1, 0}, {1, 0, 0}));
    EdgeSpec e = edge("Z1", "Z2");
    e.correction.enabled = true;
    g.add_edge(std::move(e));
    g = validate(std::move(g));
    CHECK(g.needs_calibration());
    g = instantiate(std::move(g), 10000, 3);
    CHECK(g.edges[0].correction.frozen);
    CHECK(std::abs(g.edges[0].correction.mu - 10.0) < 0.05);
    CHECK(std::abs(g.edges[0].correction.sigma - 1.0) < 0.05);
}

TEST_CASE("re-instantiating with the same seed changes nothing") {
    Graph g;
    g.add_node(normal_node("Z1", {10}, {1}));
    g.add_node(normal_node("Z2", {0, 1, 0}, {1, 0, 0}));
    EdgeSpec e = edge("Z1", "Z2");
    e.correction.enabled = true;
    g.add_edge(std::move(e));
    const Graph once = instantiate(validate(std::move(g)), 5000, 11);
    const Graph twice = instantiate(once, 5000, 11);
    CHECK(once == twice);
}

TEST_CASE("no-correction graphs are untouched by instantiation") {
    const Graph g = validate(example_graph());
    const Graph h = instantiate(g, 1000, 5);
    CHECK(g == h);
}

TEST_CASE("interventions replace node behaviour") {
    Graph g = validate(example_graph());

    SUBCASE("unknown target") {
        Intervention iv;
        iv["ghost"] = SetConstant{1.0};
        CHECK_THROWS_AS(intervene(g, iv), UnknownNode);
    }
    SUBCASE("set_constant pins the column") {
        Intervention iv;
        iv["Z3"] = SetConstant{0.0};
        const Graph h = intervene(g, iv);
        const SampleBatch b = sample(h, 50, 1);
        for (std::size_t r = 0; r < 50; ++r) CHECK(b.data(r, 2) == 0.0);
    }
    SUBCASE("constants everywhere give a constant dataset") {
        Intervention iv;
        iv["Z1"] = SetConstant{1.0};
        iv["Z2"] = SetConstant{2.0};
        iv["Z3"] = SetConstant{3.0};
        const SampleBatch b = sample(intervene(g, iv), 20, 9);
        for (std::size_t r = 0; r < 20; ++r) {
            CHECK(b.data(r, 0) == 1.0);
            CHECK(b.data(r, 1) == 2.0);
            CHECK(b.data(r, 2) == 3.0);
        }
    }
    SUBCASE("replace_distribution changes the sampling law") {
        ReplaceDistribution rd;
        rd.kind = DistKind::uniform;
        rd.weights = {{5, 0, 0, 0, 0, 0}, {6, 0, 0, 0, 0, 0}};
        rd.corrections.resize(2);
        Intervention iv;
        iv["Z3"] = rd;
        const SampleBatch b = sample(intervene(g, iv), 100, 2);
        for (std::size_t r = 0; r < 100; ++r) {
            CHECK(b.data(r, 2) >= 5.0);
            CHECK(b.data(r, 2) <= 6.0);
        }
    }
    SUBCASE("sever_parents rewires the structure") {
        SeverParents sp;
        sp.parents = {"Z1"};
        Intervention iv;
        iv["Z3"] = sp;
        Graph h = intervene(g, iv);
        CHECK(h.parent_names("Z3") == std::vector<std::string>{"Z2"});
        // weight rows must have been re-shaped for one parent
        CHECK(h.nodes[2].weights[0].size() == zeta_length(1));
    }
}

TEST_CASE("interventions keep frozen constants of other nodes") {
    Graph g;
    g.add_node(normal_node("Z1", {10}, {1}));
    g.add_node(normal_node("Z2", {0, 1, 0}, {1, 0, 0}));
    g.add_node(normal_node("Z3", {0, 1, 0}, {1, 0, 0}));
    EdgeSpec e = edge("Z1", "Z2");
    e.correction.enabled = true;
    g.add_edge(std::move(e));
    g.add_edge(edge("Z2", "Z3"));
    g = instantiate(validate(std::move(g)), 2000, 4);
    Intervention iv;
    iv["Z3"] = SetConstant{0.0};
    const Graph h = intervene(g, iv);
    CHECK(h.edges[0].correction.mu == g.edges[0].correction.mu);
    CHECK(h.edges[0].correction.sigma == g.edges[0].correction.sigma);
    CHECK_FALSE(h.needs_calibration());
}

TEST_CASE("deterministic dummy nodes support squared-parent effects") {
    // value = Z1^2 via the quadratic basis slot of a deterministic node
    Graph g;
    g.add_node(normal_node("Z1", {2}, {1}));
    NodeSpec dummy;
    dummy.name = "D";
    dummy.kind = DistKind::deterministic;
    dummy.weights = {{0, 0, 1}}; // (1, z, z^2)
    dummy.corrections.resize(1);
    g.add_node(std::move(dummy));
    g.add_edge(edge("Z1", "D"));
    g = validate(std::move(g));
    const SampleBatch b = sample(g, 200, 8);
    for (std::size_t r = 0; r < 200; ++r)
        CHECK(b.data(r, 1) == b.data(r, 0) * b.data(r, 0));
}

} // TEST_SUITE
