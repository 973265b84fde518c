#pragma once

#include "alpharen/polynomial.hpp"

#include <complex>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace alpharen {

/// Bit r set means internal line r (index into FeynmanGraph::internal()).
using LineSet = std::uint64_t;
constexpr int kMaxLines = 63;

inline int popcount(LineSet s) { return __builtin_popcountll(s); }
inline LineSet bit(int r) { return LineSet{1} << r; }

enum class Direction { In, Out };

struct InternalLine {
    std::string id;
    int from = -1; ///< vertex index the momentum leaves
    int to = -1;   ///< vertex index the momentum enters
};

struct ExternalLine {
    std::string id;
    int vertex = -1;
    Direction dir = Direction::In;
};

/// Vertices, internal and external lines. All three lists are kept sorted by
/// identifier so every index-based algorithm is deterministic.
class FeynmanGraph {
public:
    struct InternalSpec {
        std::string id, from, to;
    };
    struct ExternalSpec {
        std::string id, vertex;
        Direction dir = Direction::In;
    };

    FeynmanGraph() = default;
    FeynmanGraph(std::vector<std::string> vertices, std::vector<InternalSpec> internal,
                 std::vector<ExternalSpec> external);

    const std::vector<std::string>& vertices() const { return vertices_; }
    const std::vector<InternalLine>& internal() const { return internal_; }
    const std::vector<ExternalLine>& external() const { return external_; }
    int num_vertices() const { return static_cast<int>(vertices_.size()); }
    int num_internal() const { return static_cast<int>(internal_.size()); }
    LineSet all_internal() const { return num_internal() == 0 ? 0 : (~LineSet{0} >> (64 - num_internal())); }

    int vertex_index(const std::string& id) const;          ///< throws GraphError
    int internal_index(const std::string& id) const;        ///< -1 if absent
    int external_index(const std::string& id) const;        ///< -1 if absent

    /// Net sign of each incident line at vertex v in the conservation law
    /// sum(incoming) - sum(outgoing) = 0; keyed by line id, zero entries kept
    /// for self-loops.
    std::map<std::string, int> incidence_signs(int v) const;

    /// Maximal number of line ends at a vertex.
    int max_vertex_degree() const;

    bool operator==(const FeynmanGraph& o) const;

private:
    std::vector<std::string> vertices_;
    std::vector<InternalLine> internal_;
    std::vector<ExternalLine> external_;
};

/// Connectivity of the vertex set through the internal lines in `lines`.
bool is_connected(const FeynmanGraph& g, LineSet lines);
bool is_connected(const FeynmanGraph& g);
bool is_1pi(const FeynmanGraph& g);
int loop_count(const FeynmanGraph& g); ///< throws GraphError if disconnected

/// Canonical representative of a vertex operator modulo momentum
/// conservation: the incident line with the largest identifier and nonzero
/// net sign is eliminated.
DotPolynomial canonical_vertex_operator(const FeynmanGraph& g, int v, const DotPolynomial& raw);

class FeynmanDiagram {
public:
    FeynmanDiagram() = default;
    /// Missing vertex operators default to 1. `m2_value` is the value of the
    /// `m2` token; defaults to the largest squared internal mass.
    FeynmanDiagram(std::string name, FeynmanGraph graph, const std::map<std::string, DotPolynomial>& ops,
                   const std::map<std::string, double>& masses, std::optional<double> m2_value = std::nullopt);

    const std::string& name() const { return name_; }
    const FeynmanGraph& graph() const { return graph_; }
    const std::vector<DotPolynomial>& ops() const { return ops_; }
    const std::vector<double>& masses() const { return masses_; }
    double m2_value() const { return m2_value_; }
    const DotPolynomial& op(int v) const { return ops_[v]; }
    double mass(int r) const { return masses_[r]; }
    bool constant_ops() const;
    int total_vertex_degree() const;

    FeynmanDiagram with_name(std::string n) const;
    bool operator==(const FeynmanDiagram& o) const;

private:
    std::string name_;
    FeynmanGraph graph_;
    std::vector<DotPolynomial> ops_;
    std::vector<double> masses_;
    double m2_value_ = 0;
};

/// Superficial degree of divergence at z = 0. Throws GraphError unless 1PI.
int divergence_degree(const FeynmanDiagram& d);
/// Regularized degree: each internal line contributes 4 - 2(1+z).
std::complex<double> divergence_degree(const FeynmanDiagram& d, std::complex<double> z);

} // namespace alpharen
