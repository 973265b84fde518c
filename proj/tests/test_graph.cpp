#include "doctest.h"
#include "test_diagrams.hpp"

#include "alpharen/errors.hpp"

#include <queue>
#include <set>

using namespace alpharen;
using namespace testdiag;

namespace {

// BFS connectivity over an explicit adjacency list, independent of the library.
bool bfs_connected(const FeynmanGraph& g, int skip_line) {
    int n = g.num_vertices();
    std::vector<std::vector<int>> adj(n);
    for (int r = 0; r < g.num_internal(); ++r) {
        if (r == skip_line) continue;
        adj[g.internal()[r].from].push_back(g.internal()[r].to);
        adj[g.internal()[r].to].push_back(g.internal()[r].from);
    }
    std::vector<bool> seen(n, false);
    std::queue<int> q;
    q.push(0);
    seen[0] = true;
    int count = 1;
    while (!q.empty()) {
        int x = q.front();
        q.pop();
        for (int y : adj[x])
            if (!seen[y]) seen[y] = true, ++count, q.push(y);
    }
    return count == n;
}

// Cycle-space dimension from an explicit DFS spanning tree: non-tree edges.
int cycle_space_dim(const FeynmanGraph& g) {
    int n = g.num_vertices();
    std::vector<bool> seen(n, false);
    std::vector<bool> tree(g.num_internal(), false);
    std::vector<int> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        int x = stack.back();
        stack.pop_back();
        for (int r = 0; r < g.num_internal(); ++r) {
            const auto& l = g.internal()[r];
            int y = l.from == x ? l.to : (l.to == x ? l.from : -1);
            if (y >= 0 && !seen[y]) {
                seen[y] = true;
                tree[r] = true;
                stack.push_back(y);
            }
        }
    }
    int non_tree = 0;
    for (bool t : tree) non_tree += !t;
    return non_tree;
}

} // namespace

TEST_CASE("connectivity examples") {
    CHECK(is_connected(tadpole().graph()));
    FeynmanGraph two({"a", "b"}, {}, {{"x", "a", Direction::In}, {"y", "b", Direction::Out}});
    CHECK_FALSE(is_connected(two));
    CHECK(is_connected(bubble().graph()));
}

TEST_CASE("1PI examples") {
    CHECK(is_1pi(bubble().graph()));
    auto series = make("series", {"v1", "v2", "v3", "v4"},
                       {{"a", "v1", "v2"}, {"b", "v1", "v2"}, {"c", "v2", "v3"}, {"d", "v3", "v4"}, {"e", "v3", "v4"}},
                       {{"x1", "v1", Direction::In}, {"x2", "v4", Direction::Out}});
    CHECK_FALSE(is_1pi(series.graph()));
    FeynmanGraph lone({"v"}, {}, {{"x", "v", Direction::In}, {"y", "v", Direction::Out}});
    CHECK(is_1pi(lone));
}

TEST_CASE("loop count examples") {
    CHECK(loop_count(tadpole().graph()) == 1);
    CHECK(loop_count(bubble().graph()) == 1);
    CHECK(loop_count(sunset().graph()) == 2);
    FeynmanGraph two({"a", "b"}, {}, {{"x", "a", Direction::In}, {"y", "b", Direction::Out}});
    CHECK_THROWS_AS(loop_count(two), GraphError);
}

TEST_CASE("divergence degree examples") {
    CHECK(divergence_degree(bubble()) == 0);
    CHECK(divergence_degree(tadpole()) == 2);
    CHECK(divergence_degree(sunset()) == 2);
    CHECK(divergence_degree(nested_double_bubble()) == 0);
    auto series = make("series", {"v1", "v2", "v3"}, {{"a", "v1", "v2"}, {"b", "v2", "v3"}},
                       {{"x1", "v1", Direction::In}, {"x2", "v3", Direction::Out}});
    CHECK_THROWS_AS(divergence_degree(series), GraphError);
}

TEST_CASE("regularized degree reduces to the integer degree at z = 0") {
    for (const auto& d : {tadpole(), bubble(), sunset(), nested_double_bubble(), two_bubble_ring()}) {
        auto w = divergence_degree(d, {0.0, 0.0});
        CHECK(w.real() == static_cast<double>(divergence_degree(d)));
        CHECK(w.imag() == 0.0);
        auto wz = divergence_degree(d, {0.3, 0.1});
        CHECK(std::abs(wz - (static_cast<double>(divergence_degree(d)) - 2.0 * d.graph().num_internal() * std::complex<double>(0.3, 0.1))) <
              1e-14);
    }
}

TEST_CASE("random graphs: loop count and 1PI agree with independent oracles") {
    std::mt19937_64 rng(12345);
    int connected = 0, onepi = 0;
    for (int trial = 0; trial < 400; ++trial) {
        int nv = 1 + static_cast<int>(rng() % 5);
        int nl = static_cast<int>(rng() % 9);
        auto g = random_graph(rng, nv, nl);
        bool conn = bfs_connected(g, -1);
        CHECK(is_connected(g) == conn);
        if (!conn) continue;
        ++connected;
        CHECK(loop_count(g) == cycle_space_dim(g));
        bool brute = true;
        for (int r = 0; r < g.num_internal(); ++r) brute = brute && bfs_connected(g, r);
        CHECK(is_1pi(g) == brute);
        onepi += brute;
    }
    CHECK(connected > 50);
    CHECK(onepi > 20);
}

TEST_CASE("graph validation") {
    CHECK_THROWS_AS(FeynmanGraph({"a"}, {{"l", "a", "b"}}, {}), GraphError);
    CHECK_THROWS_AS(FeynmanGraph({"a", "a"}, {{"l", "a", "a"}}, {}), GraphError);
    CHECK_THROWS_AS(FeynmanGraph({"a"}, {{"l", "a", "a"}, {"l", "a", "a"}}, {}), GraphError);
    CHECK_THROWS_AS(FeynmanGraph({"a", "b"}, {{"l", "a", "a"}}, {}), GraphError); // b has no line
    try {
        FeynmanGraph({"a"}, {{"l", "a", "ghost"}}, {});
        FAIL("expected an error");
    } catch (const GraphError& e) {
        CHECK(std::string(e.what()).find("ghost") != std::string::npos);
    }
}

TEST_CASE("vertex operator canonicalization") {
    auto d = bubble();
    const auto& g = d.graph();
    int v1 = g.vertex_index("v1");
    // Incident at v1: e1 (in), e2 (in), l1 (out), l2 (out). Largest id: l2.
    auto raw = parse_polynomial("p_l2.p_l2");
    auto canon = canonical_vertex_operator(g, v1, raw);
    for (const auto& s : canon.symbols()) CHECK(s != "l2");
    CHECK(canonical_vertex_operator(g, v1, canon) == canon); // idempotent

    // Adding (conservation law) * anything leaves the class unchanged.
    LinearMomentum law{{"e1", 1}, {"e2", 1}, {"l1", -1}, {"l2", -1}};
    std::mt19937_64 rng(7);
    std::vector<std::string> syms{"e1", "e2", "l1", "l2"};
    for (int k = 0; k < 20; ++k) {
        LinearMomentum w;
        for (auto& s : syms) w[s] = static_cast<double>(static_cast<int>(rng() % 7) - 3);
        auto extra = DotPolynomial::dot_product(law, w) * DotPolynomial::constant(0.5 + (rng() % 3));
        auto shifted = raw + extra;
        auto c2 = canonical_vertex_operator(g, v1, shifted);
        CHECK((c2 - canon).is_zero());
    }
    CHECK_THROWS_AS(canonical_vertex_operator(g, v1, parse_polynomial("p_e3.p_e3")), GraphError);
}

TEST_CASE("self-loop momenta do not enter the conservation law") {
    auto d = tadpole();
    auto s = d.graph().incidence_signs(0);
    CHECK(s["l1"] == 0);
    CHECK(s["e1"] == 1);
    CHECK(s["e2"] == -1);
    auto c = canonical_vertex_operator(d.graph(), 0, parse_polynomial("p_e2.p_l1"));
    CHECK(c.to_string() == "p_e1.p_l1");
}

TEST_CASE("polynomial parser") {
    CHECK(parse_polynomial("").to_string() == "1");
    CHECK(parse_polynomial("1").to_string() == "1");
    CHECK(parse_polynomial("2*m2 + p_a.p_b").degree() == 2);
    CHECK(parse_polynomial("p_a*p_b") == parse_polynomial("p_b.p_a"));
    CHECK(parse_polynomial("(p_a+p_b).(p_a+p_b)") ==
          parse_polynomial("p_a.p_a + 2*p_a.p_b + p_b.p_b"));
    CHECK(parse_polynomial("p_a.p_b - p_a.p_b").is_zero());
    CHECK(parse_polynomial("1.5e-1*p_x.p_y").terms().begin()->second == doctest::Approx(0.15));
    CHECK_THROWS_AS(parse_polynomial("p_a"), ParseError);
    CHECK_THROWS_AS(parse_polynomial("1 +"), ParseError);
    CHECK_THROWS_AS(parse_polynomial("m2.p_a"), ParseError);
    CHECK_THROWS_AS(parse_polynomial("(1"), ParseError);
    auto p = parse_polynomial("3*p_a.p_b + m2*p_a.p_a - 0.25");
    CHECK(parse_polynomial(p.to_string()) == p);
}

TEST_CASE("diagram construction") {
    auto d = sunset();
    CHECK(d.m2_value() == 1.0);
    CHECK(d.constant_ops());
    CHECK_THROWS_AS(FeynmanDiagram("x", bubble().graph(), {}, {{"l1", 1.0}}), GraphError);
    CHECK_THROWS_AS(FeynmanDiagram("x", bubble().graph(), {}, {{"l1", 1.0}, {"l2", -1.0}}), GraphError);
    CHECK_THROWS_AS(FeynmanDiagram("x", bubble().graph(), {{"v9", DotPolynomial::constant(1)}},
                                   {{"l1", 1.0}, {"l2", 1.0}}),
                    GraphError);
}
