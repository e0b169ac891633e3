#include <doctest.h>

#include <cmath>
#include <cstddef>
#include <string>
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

EdgeSpec edge(const std::string& s, const std::string& t) {
    EdgeSpec e;
    e.source = s;
    e.target = t;
    e.function.kind = EdgeFuncKind::identity;
    return e;
}

// A -> B chain: A ~ N(0,1), B ~ N(A, 1)
Graph chain2() {
    Graph g;
    g.add_node(normal_node("A", {0}, {1}));
    g.add_node(normal_node("B", {0, 1, 0}, {1, 0, 0}));
    g.add_edge(edge("A", "B"));
    return validate(std::move(g));
}

std::size_t col_of(const SampleBatch& b, const std::string& name) {
    for (std::size_t c = 0; c < b.columns.size(); ++c)
        if (b.columns[c] == name) return c;
    FAIL("column not found: ", name);
    return 0;
}

} // namespace

TEST_SUITE("sampling") {

TEST_CASE("same seed gives the identical batch") {
    const Graph g = chain2();
    const SampleBatch a = sample(g, 64, 42);
    const SampleBatch b = sample(g, 64, 42);
    CHECK(a.data == b.data);
    CHECK(a.errors == b.errors);
    CHECK(a.columns == b.columns);
    const SampleBatch c = sample(g, 64, 43);
    CHECK_FALSE(a.data == c.data);
}

TEST_CASE("error streams are keyed by node name, not position") {
    // adding an unrelated later node must not disturb existing columns
    const Graph g = chain2();
    Graph h = chain2();
    h.add_node(normal_node("C", {5}, {2}));
    h = validate(std::move(h));

    const SampleBatch bg = sample(g, 100, 7);
    const SampleBatch bh = sample(h, 100, 7);
    const std::size_t ga = col_of(bg, "A"), gb = col_of(bg, "B");
    const std::size_t ha = col_of(bh, "A"), hb = col_of(bh, "B");
    for (std::size_t r = 0; r < 100; ++r) {
        CHECK(bg.data(r, ga) == bh.data(r, ha));
        CHECK(bg.data(r, gb) == bh.data(r, hb));
    }
}

TEST_CASE("stored errors live strictly inside the unit interval") {
    const SampleBatch b = sample(chain2(), 5000, 3);
    for (std::size_t r = 0; r < b.errors.rows(); ++r)
        for (std::size_t c = 0; c < b.errors.cols(); ++c) {
            CHECK(b.errors(r, c) > 0.0);
            CHECK(b.errors(r, c) < 1.0);
        }
}

TEST_CASE("replaying a batch's errors reproduces the batch") {
    const Graph g = chain2();
    const SampleBatch a = sample(g, 128, 99);
    const SampleBatch b = sample_with_errors(g, a.errors);
    CHECK(a.data == b.data);
    CHECK(a.columns == b.columns);
}

TEST_CASE("an all-halves error matrix walks the median path") {
    const Graph g = chain2();
    Matrix errors(10, 2, 0.5);
    const SampleBatch b = sample_with_errors(g, errors);
    for (std::size_t r = 0; r < 10; ++r) {
        CHECK(b.data(r, 0) == doctest::Approx(0.0)); // median of N(0,1)
        // B's median given A is A itself
        CHECK(b.data(r, 1) == doctest::Approx(b.data(r, 0)));
    }
}

TEST_CASE("sampling demands calibration when corrections are pending") {
    Graph g = chain2();
    NodeCorrection c;
    c.lower = 0.0;
    c.upper = 1.0;
    c.target_mean = 0.4;
    NodeSpec bern;
    bern.name = "Y";
    bern.kind = DistKind::bernoulli;
    bern.weights = {{0, 1, 0}};
    bern.corrections = {c};
    g.add_node(std::move(bern));
    g.add_edge(edge("A", "Y"));
    g = validate(std::move(g));
    CHECK_THROWS_AS(sample(g, 10, 1), NotCalibrated);
    CHECK_THROWS_AS(sample_with_errors(g, Matrix(10, 3, 0.5)), NotCalibrated);
    g = instantiate(std::move(g), 500, 2);
    CHECK_NOTHROW(sample(g, 10, 1));
}

TEST_CASE("unvalidated graphs and bad error shapes are rejected") {
    Graph g;
    g.add_node(normal_node("A", {0}, {1}));
    CHECK_THROWS_AS(sample(g, 10, 1), Error);

    const Graph v = chain2();
    CHECK_THROWS_AS(sample_with_errors(v, Matrix(10, 5, 0.5)), ShapeMismatch);
}

TEST_CASE("data-backed columns stay row-aligned") {
    Graph g;
    NodeSpec x;
    x.name = "X";
    x.kind = DistKind::deterministic;
    x.data_column = 0;
    NodeSpec y;
    y.name = "Y";
    y.kind = DistKind::deterministic;
    y.data_column = 1;
    g.add_node(std::move(x));
    g.add_node(std::move(y));
    IngestedTable t;
    t.columns = {"X", "Y"};
    t.rows = Matrix(5, 2);
    for (std::size_t r = 0; r < 5; ++r) {
        t.rows(r, 0) = static_cast<double>(r);
        t.rows(r, 1) = static_cast<double>(r) + 100.0; // pairs (r, r+100)
    }
    g.table = t;
    g = validate(std::move(g));
    const SampleBatch b = sample(g, 400, 17);
    const std::size_t cx = col_of(b, "X"), cy = col_of(b, "Y");
    bool seen_all[5] = {};
    for (std::size_t r = 0; r < 400; ++r) {
        CHECK(b.data(r, cy) == b.data(r, cx) + 100.0);
        seen_all[static_cast<std::size_t>(b.data(r, cx))] = true;
    }
    for (bool s : seen_all) CHECK(s); // resampling reaches every row
}

TEST_CASE("replaying stored errors reproduces ingested rows too") {
    Graph g;
    NodeSpec x;
    x.name = "X";
    x.kind = DistKind::deterministic;
    x.data_column = 0;
    g.add_node(std::move(x));
    IngestedTable t;
    t.columns = {"X"};
    t.rows = Matrix(3, 1);
    for (std::size_t r = 0; r < 3; ++r) t.rows(r, 0) = 10.0 * static_cast<double>(r + 1);
    g.table = t;
    g = validate(std::move(g));
    const SampleBatch a = sample(g, 50, 23);
    const SampleBatch b = sample_with_errors(g, a.errors);
    CHECK(a.data == b.data);
}

TEST_CASE("deterministic chains propagate constants exactly") {
    Graph g;
    NodeSpec a;
    a.name = "A";
    a.kind = DistKind::deterministic;
    a.weights = {{2.5}};
    a.corrections.resize(1);
    NodeSpec b;
    b.name = "B";
    b.kind = DistKind::deterministic;
    b.weights = {{1.0, 2.0, 0.0}}; // 1 + 2a
    b.corrections.resize(1);
    NodeSpec c;
    c.name = "C";
    c.kind = DistKind::deterministic;
    c.weights = {{0.0, 0.0, 1.0}}; // b^2
    c.corrections.resize(1);
    g.add_node(std::move(a));
    g.add_node(std::move(b));
    g.add_node(std::move(c));
    g.add_edge(edge("A", "B"));
    g.add_edge(edge("B", "C"));
    g = validate(std::move(g));
    const SampleBatch s = sample(g, 8, 5);
    for (std::size_t r = 0; r < 8; ++r) {
        CHECK(s.data(r, 0) == 2.5);
        CHECK(s.data(r, 1) == 6.0);
        CHECK(s.data(r, 2) == 36.0);
    }
}

TEST_CASE("counterfactuals change only descendants of the target") {
    // A -> B -> C and a detached node D
    Graph g;
    g.add_node(normal_node("A", {0}, {1}));
    g.add_node(normal_node("B", {0, 1, 0}, {1, 0, 0}));
    g.add_node(normal_node("C", {0, 1, 0}, {1, 0, 0}));
    g.add_node(normal_node("D", {3}, {1}));
    g.add_edge(edge("A", "B"));
    g.add_edge(edge("B", "C"));
    g = validate(std::move(g));

    const SampleBatch obs = sample(g, 200, 31);
    Intervention iv;
    iv["B"] = SetConstant{0.0};
    const Graph h = intervene(g, iv);
    const SampleBatch cf = sample_with_errors(h, obs.errors);

    const std::size_t ca = col_of(obs, "A"), cb = col_of(obs, "B");
    const std::size_t cc = col_of(obs, "C"), cd = col_of(obs, "D");
    bool c_changed = false;
    for (std::size_t r = 0; r < 200; ++r) {
        CHECK(cf.data(r, ca) == obs.data(r, ca)); // non-descendant: bit-identical
        CHECK(cf.data(r, cd) == obs.data(r, cd));
        CHECK(cf.data(r, cb) == 0.0);
        if (cf.data(r, cc) != obs.data(r, cc)) c_changed = true;
    }
    CHECK(c_changed); // downstream column actually responds
}

TEST_CASE("integer-valued kinds give integral columns") {
    Graph g;
    NodeSpec b;
    b.name = "B";
    b.kind = DistKind::bernoulli;
    b.weights = {{0.5}};
    b.corrections.resize(1);
    NodeSpec p;
    p.name = "P";
    p.kind = DistKind::poisson;
    p.weights = {{4.0}};
    p.corrections.resize(1);
    g.add_node(std::move(b));
    g.add_node(std::move(p));
    g = validate(std::move(g));
    const SampleBatch s = sample(g, 500, 77);
    for (std::size_t r = 0; r < 500; ++r) {
        const double bv = s.data(r, col_of(s, "B"));
        const double pv = s.data(r, col_of(s, "P"));
        CHECK((bv == 0.0 || bv == 1.0));
        CHECK(pv == std::floor(pv));
        CHECK(pv >= 0.0);
    }
}

TEST_CASE("columns come out in topological order") {
    Graph g;
    g.add_node(normal_node("late", {0, 1, 0}, {1, 0, 0}));
    g.add_node(normal_node("early", {0}, {1}));
    g.add_edge(edge("early", "late"));
    g = validate(std::move(g));
    const SampleBatch s = sample(g, 4, 1);
    CHECK(s.columns == std::vector<std::string>{"early", "late"});
}

TEST_CASE("zero-row requests still carry the column layout") {
    const SampleBatch s = sample(chain2(), 0, 1);
    CHECK(s.columns.size() == 2);
    CHECK(s.data.rows() == 0);
}

} // TEST_SUITE
