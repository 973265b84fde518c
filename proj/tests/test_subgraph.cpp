#include "doctest.h"
#include "test_diagrams.hpp"

#include "alpharen/errors.hpp"
#include "alpharen/subgraph.hpp"

#include <set>

using namespace alpharen;
using namespace testdiag;

namespace {

LineSet lines(const FeynmanDiagram& d, std::initializer_list<const char*> ids) {
    LineSet s = 0;
    for (auto id : ids) s |= bit(d.graph().internal_index(id));
    return s;
}

// Exhaustive oracle: every (vertex subset, line subset) pair satisfying the
// subdiagram conditions, tested by brute force single-line deletion.
std::set<std::pair<VertexSet, LineSet>> brute_subdiagrams(const FeynmanDiagram& d) {
    const auto& g = d.graph();
    std::set<std::pair<VertexSet, LineSet>> out;
    VertexSet allv = (VertexSet{1} << g.num_vertices()) - 1;
    for (VertexSet vs = 1; vs <= allv; ++vs)
        for (LineSet ls = 1; ls <= g.all_internal(); ++ls) {
            bool inside = true;
            for (int r = 0; r < g.num_internal(); ++r)
                if ((ls & bit(r)) && !((vs >> g.internal()[r].from & 1) && (vs >> g.internal()[r].to & 1)))
                    inside = false;
            if (!inside) continue;
            if (vs == allv && ls == g.all_internal()) continue;
            Subdiagram s{vs, ls};
            auto ind = induced_diagram(d, s);
            if (is_1pi(ind.graph())) out.insert({vs, ls});
        }
    return out;
}

} // namespace

TEST_CASE("subdiagram enumeration examples") {
    CHECK(enumerate_1pi_subdiagrams(bubble()).empty());
    auto s = sunset();
    auto subs = enumerate_1pi_subdiagrams(s);
    REQUIRE(subs.size() == 3);
    for (const auto& x : subs) {
        CHECK(x.num_lines() == 2);
        CHECK(x.num_vertices() == 2);
    }
    auto n = nested_double_bubble();
    auto ns = enumerate_1pi_subdiagrams(n);
    bool found = false;
    for (const auto& x : ns) found = found || x.lines == lines(n, {"b", "c"});
    CHECK(found);
}

TEST_CASE("enumeration matches the exhaustive oracle") {
    for (const auto& d : {sunset(), nested_double_bubble(), two_bubble_ring(), chain6()}) {
        auto subs = enumerate_1pi_subdiagrams(d);
        std::set<std::pair<VertexSet, LineSet>> got;
        for (const auto& s : subs) got.insert({s.vertices, s.lines});
        CHECK(got.size() == subs.size()); // duplicate free
        CHECK(got == brute_subdiagrams(d));
        CHECK(enumerate_1pi_subdiagrams(d) == subs); // stable
    }
}

TEST_CASE("disjoint families") {
    CHECK(enumerate_disjoint_families(bubble()).empty());
    auto fs = enumerate_disjoint_families(sunset());
    CHECK(fs.size() == 3);
    for (const auto& f : fs) CHECK(f.size() == 1);
    auto c = chain6();
    bool pair = false;
    for (const auto& f : enumerate_disjoint_families(c)) {
        for (size_t i = 0; i < f.size(); ++i)
            for (size_t j = i + 1; j < f.size(); ++j) CHECK((f[i].vertices & f[j].vertices) == 0);
        if (f.size() == 2 && f[0].lines == lines(c, {"a", "b"}) && f[1].lines == lines(c, {"e", "f"})) pair = true;
    }
    CHECK(pair);
    auto series = make("series", {"v1", "v2", "v3"}, {{"a", "v1", "v2"}, {"b", "v2", "v3"}},
                       {{"x1", "v1", Direction::In}, {"x2", "v3", Direction::Out}});
    CHECK_THROWS_AS(enumerate_disjoint_families(series), GraphError);
    CHECK_THROWS_AS(enumerate_1pi_subdiagrams(chain6(), 6), GraphError);
}

TEST_CASE("quotient examples") {
    auto s = sunset();
    Subdiagram g12{vertices_of(s.graph(), lines(s, {"l1", "l2"})), lines(s, {"l1", "l2"})};
    auto q = quotient(s, {g12}, {DotPolynomial::constant(1)});
    CHECK(q.graph().num_vertices() == 1);
    CHECK(q.graph().num_internal() == 1);
    CHECK(q.graph().internal()[0].from == q.graph().internal()[0].to);
    CHECK(q.graph().external().size() == 2);

    auto n = nested_double_bubble();
    Subdiagram inner{vertices_of(n.graph(), lines(n, {"b", "c"})), lines(n, {"b", "c"})};
    auto qn = quotient(n, {inner}, {DotPolynomial::constant(1)});
    CHECK(qn.graph().num_vertices() == 2);
    CHECK(qn.graph().num_internal() == 2);
    CHECK(is_1pi(qn.graph()));
    CHECK(divergence_degree(qn) == 0);

    Subdiagram whole{vertices_of(s.graph(), s.graph().all_internal()), s.graph().all_internal()};
    CHECK_THROWS_AS(quotient(s, {whole}, {DotPolynomial::constant(1)}), GraphError);
    CHECK_THROWS_AS(quotient(s, {g12}, {}), GraphError);
}

TEST_CASE("quotient keeps vertex operators in parent momenta") {
    auto s = sunset();
    Subdiagram g12{vertices_of(s.graph(), lines(s, {"l1", "l2"})), lines(s, {"l1", "l2"})};
    auto ind = induced_diagram(s, g12);
    CHECK(ind.graph().external_index("l3:in") >= 0);
    CHECK(ind.graph().external_index("l3:out") >= 0);
    auto q = quotient(s, {g12}, {parse_polynomial("p_l3:in.p_l3:in")});
    auto syms = q.op(0).symbols();
    for (const auto& x : syms) CHECK(x.find(':') == std::string::npos);
    CHECK(q.op(0).degree() == 2);
}

TEST_CASE("loop and degree additivity over every family") {
    for (const auto& d : {sunset(), nested_double_bubble(), two_bubble_ring(), chain6()}) {
        int L = loop_count(d.graph());
        for (const auto& fam : enumerate_disjoint_families(d)) {
            int sum = 0;
            std::vector<DotPolynomial> ones(fam.size(), DotPolynomial::constant(1));
            auto q = quotient(d, fam, ones);
            for (const auto& g : fam) sum += g.loops();
            CHECK(L == loop_count(q.graph()) + sum);
            if (fam.size() == 1) {
                int omega_g = divergence_degree(induced_diagram(d, fam[0]));
                for (int delta : {0, 2}) {
                    DotPolynomial op = delta == 0 ? DotPolynomial::constant(1) : DotPolynomial();
                    if (delta == 2) {
                        auto ind = induced_diagram(d, fam[0]);
                        const auto& leg = ind.graph().external()[0].id;
                        op = DotPolynomial::dot_product({{leg, 1}}, {{leg, 1}});
                    }
                    auto qd = quotient(d, fam, {op});
                    if (!qd.op(qd.graph().vertex_index(quotient_vertex_id(d, fam, 0))).is_zero())
                        CHECK(divergence_degree(qd) == divergence_degree(d) - omega_g + delta);
                }
            }
        }
    }
}

TEST_CASE("painted components") {
    auto s = sunset();
    auto c = painted_components(s, lines(s, {"l1", "l2"}));
    REQUIRE(c.size() == 1);
    CHECK(c[0].lines == lines(s, {"l1", "l2"}));
    CHECK(painted_components(s, lines(s, {"l1"})).empty());
    CHECK(painted_components(s, 0).empty());
    auto n = nested_double_bubble();
    auto cn = painted_components(n, lines(n, {"b", "c", "d"}));
    REQUIRE(cn.size() == 1);
    CHECK(cn[0].lines == lines(n, {"b", "c"}));
    for (const auto& d : {sunset(), nested_double_bubble(), two_bubble_ring(), chain6()})
        for (const auto& g : enumerate_1pi_subdiagrams(d)) {
            auto pc = painted_components(d, g.lines);
            REQUIRE(pc.size() == 1);
            CHECK(pc[0] == g);
        }
    auto r = two_bubble_ring();
    CHECK(painted_components(r, lines(r, {"a", "b", "c", "d", "e"})).size() == 2);
}
