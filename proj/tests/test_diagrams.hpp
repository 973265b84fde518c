#pragma once
// Small diagrams shared by the unit tests.

#include "alpharen/graph.hpp"

#include "alpharen/parametric.hpp"

#include <random>

namespace testdiag {

using namespace alpharen;
using IS = FeynmanGraph::InternalSpec;
using ES = FeynmanGraph::ExternalSpec;

inline FeynmanDiagram make(const std::string& name, std::vector<std::string> v, std::vector<IS> in,
                           std::vector<ES> ex, double m = 1.0, std::map<std::string, DotPolynomial> ops = {}) {
    std::map<std::string, double> masses;
    for (const auto& l : in) masses[l.id] = m;
    return FeynmanDiagram(name, FeynmanGraph(v, in, ex), ops, masses);
}

inline FeynmanDiagram tadpole(double m = 1.0) {
    return make("tadpole", {"v1"}, {{"l1", "v1", "v1"}},
                {{"e1", "v1", Direction::In}, {"e2", "v1", Direction::Out}}, m);
}

inline FeynmanDiagram bubble(double m = 1.0) {
    return make("bubble", {"v1", "v2"}, {{"l1", "v1", "v2"}, {"l2", "v1", "v2"}},
                {{"e1", "v1", Direction::In}, {"e2", "v1", Direction::In}, {"e3", "v2", Direction::Out},
                 {"e4", "v2", Direction::Out}},
                m);
}

inline FeynmanDiagram sunset(double m = 1.0) {
    return make("sunset", {"v1", "v2"}, {{"l1", "v1", "v2"}, {"l2", "v1", "v2"}, {"l3", "v1", "v2"}},
                {{"e1", "v1", Direction::In}, {"e2", "v2", Direction::Out}}, m);
}

/// Inner bubble (b, c) inserted into the outer bubble (a, d).
inline FeynmanDiagram nested_double_bubble(double m = 1.0) {
    return make("nested", {"v1", "v2", "v3"},
                {{"a", "v1", "v2"}, {"b", "v2", "v3"}, {"c", "v2", "v3"}, {"d", "v3", "v1"}},
                {{"e1", "v1", Direction::In}, {"e2", "v1", Direction::Out}, {"e3", "v2", Direction::In},
                 {"e4", "v3", Direction::Out}},
                m);
}

/// Two bubbles closed into a ring by two single lines.
inline FeynmanDiagram two_bubble_ring(double m = 1.0) {
    return make("ring", {"v1", "v2", "v3", "v4"},
                {{"a", "v1", "v2"}, {"b", "v1", "v2"}, {"c", "v2", "v3"}, {"d", "v3", "v4"}, {"e", "v3", "v4"},
                 {"f", "v4", "v1"}},
                {{"x1", "v1", Direction::In}, {"x2", "v2", Direction::Out}, {"x3", "v3", Direction::In},
                 {"x4", "v4", Direction::Out}},
                m);
}

/// Six vertices in a ring, two of the links doubled into bubbles.
inline FeynmanDiagram chain6(double m = 1.0) {
    return make("chain6", {"v1", "v2", "v3", "v4", "v5", "v6"},
                {{"a", "v1", "v2"}, {"b", "v1", "v2"}, {"c", "v2", "v3"}, {"d", "v3", "v4"}, {"e", "v4", "v5"},
                 {"f", "v4", "v5"}, {"g", "v5", "v6"}, {"h", "v6", "v1"}},
                {{"x1", "v1", Direction::In}, {"x2", "v2", Direction::Out}, {"x3", "v3", Direction::In},
                 {"x4", "v3", Direction::Out}, {"x5", "v4", Direction::In}, {"x6", "v5", Direction::Out},
                 {"x7", "v6", Direction::In}, {"x8", "v6", Direction::Out}},
                m);
}

/// Random multigraph (self-loops allowed) with one external leg per vertex.
/// Vertex ids are zero padded so their order matches creation order.
inline FeynmanGraph random_graph(std::mt19937_64& rng, int nv, int nl) {
    std::vector<std::string> v;
    for (int i = 0; i < nv; ++i) v.push_back("v" + std::to_string(10 + i));
    std::uniform_int_distribution<int> pick(0, nv - 1);
    std::vector<IS> in;
    for (int r = 0; r < nl; ++r) in.push_back({"l" + std::to_string(10 + r), v[pick(rng)], v[pick(rng)]});
    std::vector<ES> ex;
    for (int i = 0; i < nv; ++i)
        ex.push_back({"x" + std::to_string(10 + i), v[i], (i % 2) ? Direction::Out : Direction::In});
    return FeynmanGraph(v, in, ex);
}

/// Random connected 1PI diagram with nl lines on nv vertices (rejection sampling).
inline FeynmanDiagram random_1pi(std::mt19937_64& rng, int nv, int nl, double m = 1.0) {
    for (;;) {
        auto g = random_graph(rng, nv, nl);
        if (!is_1pi(g)) continue;
        std::map<std::string, double> masses;
        for (const auto& l : g.internal()) masses[l.id] = m;
        return FeynmanDiagram("random", g, {}, masses);
    }
}

/// Random external momenta obeying conservation.
inline Momenta random_momenta(std::mt19937_64& rng, const FeynmanGraph& g, double scale = 1.0) {
    std::uniform_real_distribution<double> u(-scale, scale);
    std::map<std::string, Vec4> given;
    for (size_t e = 0; e + 1 < g.external().size(); ++e) given[g.external()[e].id] = {u(rng), u(rng), u(rng), u(rng)};
    return complete_momenta(g, given);
}

inline Eigen::VectorXd random_alpha(std::mt19937_64& rng, int n, double lo = 0.1, double hi = 2.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    Eigen::VectorXd a(n);
    for (int r = 0; r < n; ++r) a[r] = u(rng);
    return a;
}

/// The same diagram with internal line `id` reversed; vertex operators are
/// rewritten so they describe the same physical momenta.
inline FeynmanDiagram flip_line(const FeynmanDiagram& d, const std::string& id) {
    const auto& g = d.graph();
    std::vector<IS> in;
    std::map<std::string, double> masses;
    for (int r = 0; r < g.num_internal(); ++r) {
        const auto& l = g.internal()[r];
        auto from = g.vertices()[l.from], to = g.vertices()[l.to];
        if (l.id == id) std::swap(from, to);
        in.push_back({l.id, from, to});
        masses[l.id] = d.mass(r);
    }
    std::vector<ES> ex;
    for (const auto& e : g.external()) ex.push_back({e.id, g.vertices()[e.vertex], e.dir});
    std::map<std::string, DotPolynomial> ops;
    for (int v = 0; v < g.num_vertices(); ++v) ops[g.vertices()[v]] = d.op(v).substitute(id, {{id, -1.0}});
    return FeynmanDiagram(d.name(), FeynmanGraph(g.vertices(), in, ex), ops, masses, d.m2_value());
}

} // namespace testdiag
