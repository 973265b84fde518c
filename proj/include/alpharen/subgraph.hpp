#pragma once

#include "alpharen/graph.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace alpharen {

using VertexSet = std::uint64_t;

/// A subdiagram of a parent diagram: a vertex subset and a subset of the
/// internal lines joining those vertices. Boundary (external) lines are
/// implied by the parent.
struct Subdiagram {
    VertexSet vertices = 0;
    LineSet lines = 0;

    int num_vertices() const { return __builtin_popcountll(vertices); }
    int num_lines() const { return popcount(lines); }
    int loops() const { return num_lines() - num_vertices() + 1; }
    bool operator==(const Subdiagram&) const = default;
};

using DisjointFamily = std::vector<Subdiagram>;

/// Vertex set touched by the given internal lines.
VertexSet vertices_of(const FeynmanGraph& g, LineSet lines);

/// Whether the lines form a 1PI graph on the vertices they touch.
bool lines_are_1pi(const FeynmanGraph& g, LineSet lines);

/// Proper 1PI subdiagrams with at least one internal line, sorted by vertex
/// identifiers, then line identifiers. Throws GraphError if `d` is not 1PI or
/// has more than `max_lines` internal lines.
std::vector<Subdiagram> enumerate_1pi_subdiagrams(const FeynmanDiagram& d, int max_lines = 12);

/// All non-empty families of pairwise vertex-disjoint proper 1PI subdiagrams.
/// Members are ordered as in enumerate_1pi_subdiagrams; families are ordered
/// lexicographically by member position.
std::vector<DisjointFamily> enumerate_disjoint_families(const FeynmanDiagram& d, int max_lines = 12);

/// The subdiagram as a diagram of its own. Parent lines leaving the vertex
/// set become external legs; a parent line with both ends inside but not in
/// the subdiagram becomes two legs `<id>:out` and `<id>:in`.
FeynmanDiagram induced_diagram(const FeynmanDiagram& d, const Subdiagram& s);

/// Stable text key of a subdiagram, e.g. "{v1,v2|l1,l2}".
std::string subdiagram_key(const FeynmanGraph& g, const Subdiagram& s);

/// Collapse each family member to a fresh vertex carrying ops[i]; ops are
/// written in the member's induced external momenta (`<id>:in`/`<id>:out`
/// names are mapped back to the parent line). Throws GraphError on invalid
/// families.
FeynmanDiagram quotient(const FeynmanDiagram& d, const DisjointFamily& fam, const std::vector<DotPolynomial>& ops);

/// Identifier of the vertex that replaces member `i` in quotient().
std::string quotient_vertex_id(const FeynmanDiagram& d, const DisjointFamily& fam, size_t i);

/// 2-edge-connected components of the graph formed by the lines in A, i.e.
/// its 1PI pieces with at least one line.
std::vector<Subdiagram> painted_components(const FeynmanDiagram& d, LineSet A);

} // namespace alpharen
