#include "alpharen/graph.hpp"

#include "alpharen/errors.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <set>

namespace alpharen {

namespace {

void check_identifier(const std::string& id, const char* what) {
    if (id.empty()) throw GraphError(std::string("empty ") + what + " identifier");
    for (char c : id) {
        bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':' || c == '-';
        if (!ok) throw GraphError(std::string(what) + " identifier '" + id + "' contains '" + c + "'");
    }
}

struct UnionFind {
    std::vector<int> parent;
    explicit UnionFind(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
    int find(int x) {
        while (parent[x] != x) x = parent[x] = parent[parent[x]];
        return x;
    }
    bool unite(int a, int b) {
        a = find(a);
        b = find(b);
        if (a == b) return false;
        parent[std::max(a, b)] = std::min(a, b);
        return true;
    }
};

} // namespace

FeynmanGraph::FeynmanGraph(std::vector<std::string> vertices, std::vector<InternalSpec> internal,
                           std::vector<ExternalSpec> external) {
    std::sort(vertices.begin(), vertices.end());
    for (size_t i = 0; i < vertices.size(); ++i) {
        check_identifier(vertices[i], "vertex");
        if (i && vertices[i] == vertices[i - 1]) throw GraphError("duplicate vertex '" + vertices[i] + "'");
    }
    vertices_ = std::move(vertices);
    if (internal.size() > static_cast<size_t>(kMaxLines)) throw GraphError("too many internal lines");

    std::set<std::string> line_ids;
    auto vidx = [&](const std::string& v, const std::string& line) {
        auto it = std::lower_bound(vertices_.begin(), vertices_.end(), v);
        if (it == vertices_.end() || *it != v)
            throw GraphError("line '" + line + "' references unknown vertex '" + v + "'");
        return static_cast<int>(it - vertices_.begin());
    };
    std::sort(internal.begin(), internal.end(), [](auto& a, auto& b) { return a.id < b.id; });
    for (const auto& s : internal) {
        check_identifier(s.id, "line");
        if (!line_ids.insert(s.id).second) throw GraphError("duplicate line '" + s.id + "'");
        internal_.push_back({s.id, vidx(s.from, s.id), vidx(s.to, s.id)});
    }
    std::sort(external.begin(), external.end(), [](auto& a, auto& b) { return a.id < b.id; });
    for (const auto& s : external) {
        check_identifier(s.id, "line");
        if (!line_ids.insert(s.id).second) throw GraphError("duplicate line '" + s.id + "'");
        external_.push_back({s.id, vidx(s.vertex, s.id), s.dir});
    }
    std::vector<int> ends(vertices_.size(), 0);
    for (const auto& l : internal_) ++ends[l.from], ++ends[l.to];
    for (const auto& l : external_) ++ends[l.vertex];
    for (size_t v = 0; v < vertices_.size(); ++v)
        if (ends[v] == 0) throw GraphError("vertex '" + vertices_[v] + "' has no lines");
}

int FeynmanGraph::vertex_index(const std::string& id) const {
    auto it = std::lower_bound(vertices_.begin(), vertices_.end(), id);
    if (it == vertices_.end() || *it != id) throw GraphError("unknown vertex '" + id + "'");
    return static_cast<int>(it - vertices_.begin());
}

int FeynmanGraph::internal_index(const std::string& id) const {
    auto it = std::lower_bound(internal_.begin(), internal_.end(), id,
                               [](const InternalLine& l, const std::string& s) { return l.id < s; });
    return (it != internal_.end() && it->id == id) ? static_cast<int>(it - internal_.begin()) : -1;
}

int FeynmanGraph::external_index(const std::string& id) const {
    auto it = std::lower_bound(external_.begin(), external_.end(), id,
                               [](const ExternalLine& l, const std::string& s) { return l.id < s; });
    return (it != external_.end() && it->id == id) ? static_cast<int>(it - external_.begin()) : -1;
}

std::map<std::string, int> FeynmanGraph::incidence_signs(int v) const {
    std::map<std::string, int> s;
    for (const auto& l : internal_) {
        if (l.to == v) s[l.id] += 1;
        if (l.from == v) s[l.id] -= 1;
    }
    for (const auto& e : external_)
        if (e.vertex == v) s[e.id] += e.dir == Direction::In ? 1 : -1;
    return s;
}

int FeynmanGraph::max_vertex_degree() const {
    std::vector<int> ends(vertices_.size(), 0);
    for (const auto& l : internal_) ++ends[l.from], ++ends[l.to];
    for (const auto& l : external_) ++ends[l.vertex];
    return ends.empty() ? 0 : *std::max_element(ends.begin(), ends.end());
}

bool FeynmanGraph::operator==(const FeynmanGraph& o) const {
    if (vertices_ != o.vertices_ || internal_.size() != o.internal_.size() || external_.size() != o.external_.size())
        return false;
    for (size_t i = 0; i < internal_.size(); ++i)
        if (internal_[i].id != o.internal_[i].id || internal_[i].from != o.internal_[i].from ||
            internal_[i].to != o.internal_[i].to)
            return false;
    for (size_t i = 0; i < external_.size(); ++i)
        if (external_[i].id != o.external_[i].id || external_[i].vertex != o.external_[i].vertex ||
            external_[i].dir != o.external_[i].dir)
            return false;
    return true;
}

bool is_connected(const FeynmanGraph& g, LineSet lines) {
    if (g.num_vertices() <= 1) return true;
    UnionFind uf(g.num_vertices());
    int comps = g.num_vertices();
    for (int r = 0; r < g.num_internal(); ++r)
        if (lines & bit(r))
            if (uf.unite(g.internal()[r].from, g.internal()[r].to)) --comps;
    return comps == 1;
}

bool is_connected(const FeynmanGraph& g) { return is_connected(g, g.all_internal()); }

bool is_1pi(const FeynmanGraph& g) {
    if (!is_connected(g)) return false;
    for (int r = 0; r < g.num_internal(); ++r)
        if (!is_connected(g, g.all_internal() & ~bit(r))) return false;
    return true;
}

int loop_count(const FeynmanGraph& g) {
    if (!is_connected(g)) throw GraphError("loop_count requires a connected graph");
    return g.num_internal() - g.num_vertices() + 1;
}

DotPolynomial canonical_vertex_operator(const FeynmanGraph& g, int v, const DotPolynomial& raw) {
    auto signs = g.incidence_signs(v);
    for (const auto& s : raw.symbols())
        if (!signs.count(s))
            throw GraphError("vertex '" + g.vertices()[v] + "' operator uses momentum p_" + s +
                             " of a line not incident to it");
    std::string elim;
    for (const auto& [id, s] : signs)
        if (s != 0) elim = id; // map order: ends at the largest identifier
    if (elim.empty()) return raw;
    LinearMomentum repl;
    const double se = signs[elim];
    for (const auto& [id, s] : signs)
        if (id != elim && s != 0) repl[id] = -static_cast<double>(s) / se;
    return raw.substitute(elim, repl);
}

FeynmanDiagram::FeynmanDiagram(std::string name, FeynmanGraph graph, const std::map<std::string, DotPolynomial>& ops,
                               const std::map<std::string, double>& masses, std::optional<double> m2_value)
    : name_(std::move(name)), graph_(std::move(graph)) {
    for (const auto& [v, p] : ops) graph_.vertex_index(v);
    for (int v = 0; v < graph_.num_vertices(); ++v) {
        auto it = ops.find(graph_.vertices()[v]);
        ops_.push_back(it == ops.end() ? DotPolynomial::constant(1.0)
                                       : canonical_vertex_operator(graph_, v, it->second));
    }
    for (const auto& [id, m] : masses)
        if (graph_.internal_index(id) < 0) throw GraphError("mass given for unknown internal line '" + id + "'");
    double m2max = 0;
    for (const auto& l : graph_.internal()) {
        auto it = masses.find(l.id);
        if (it == masses.end()) throw GraphError("internal line '" + l.id + "' has no mass");
        if (!(it->second >= 0)) throw GraphError("internal line '" + l.id + "' has a negative mass");
        masses_.push_back(it->second);
        m2max = std::max(m2max, it->second * it->second);
    }
    m2_value_ = m2_value.value_or(m2max);
}

bool FeynmanDiagram::constant_ops() const {
    return std::all_of(ops_.begin(), ops_.end(), [](const DotPolynomial& p) { return p.is_constant(); });
}

int FeynmanDiagram::total_vertex_degree() const {
    int d = 0;
    for (const auto& p : ops_) d += p.degree();
    return d;
}

FeynmanDiagram FeynmanDiagram::with_name(std::string n) const {
    FeynmanDiagram d = *this;
    d.name_ = std::move(n);
    return d;
}

bool FeynmanDiagram::operator==(const FeynmanDiagram& o) const {
    return graph_ == o.graph_ && ops_ == o.ops_ && masses_ == o.masses_ && m2_value_ == o.m2_value_;
}

int divergence_degree(const FeynmanDiagram& d) {
    if (!is_1pi(d.graph())) throw GraphError("divergence degree requires a 1PI diagram");
    return d.total_vertex_degree() - 4 * d.graph().num_vertices() + 2 * d.graph().num_internal() + 4;
}

std::complex<double> divergence_degree(const FeynmanDiagram& d, std::complex<double> z) {
    if (!is_1pi(d.graph())) throw GraphError("divergence degree requires a 1PI diagram");
    const double base = d.total_vertex_degree() - 4 * d.graph().num_vertices() + 4;
    return base + static_cast<double>(d.graph().num_internal()) * (4.0 - 2.0 * (1.0 + z));
}

} // namespace alpharen
