#include "alpharen/subgraph.hpp"

#include "alpharen/errors.hpp"

#include <algorithm>
#include <functional>
#include <numeric>
#include <set>

namespace alpharen {

namespace {

bool connected_on(const FeynmanGraph& g, VertexSet vs, LineSet lines) {
    int n = g.num_vertices();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (int r = 0; r < g.num_internal(); ++r)
        if (lines & bit(r)) parent[find(g.internal()[r].from)] = find(g.internal()[r].to);
    int root = -1;
    for (int v = 0; v < n; ++v) {
        if (!(vs & (VertexSet{1} << v))) continue;
        if (root < 0) root = find(v);
        else if (find(v) != root) return false;
    }
    return true;
}

std::vector<std::string> vertex_ids(const FeynmanGraph& g, VertexSet vs) {
    std::vector<std::string> out;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (vs & (VertexSet{1} << v)) out.push_back(g.vertices()[v]);
    return out;
}

std::vector<std::string> line_ids(const FeynmanGraph& g, LineSet ls) {
    std::vector<std::string> out;
    for (int r = 0; r < g.num_internal(); ++r)
        if (ls & bit(r)) out.push_back(g.internal()[r].id);
    return out;
}

bool before(const FeynmanGraph& g, const Subdiagram& a, const Subdiagram& b) {
    auto va = vertex_ids(g, a.vertices), vb = vertex_ids(g, b.vertices);
    if (va != vb) return va < vb;
    return line_ids(g, a.lines) < line_ids(g, b.lines);
}

void require_1pi(const FeynmanDiagram& d, int max_lines) {
    if (!is_1pi(d.graph())) throw GraphError("diagram '" + d.name() + "' is not 1PI");
    if (d.graph().num_internal() > max_lines)
        throw GraphError("diagram '" + d.name() + "' has " + std::to_string(d.graph().num_internal()) +
                         " internal lines, above the limit of " + std::to_string(max_lines));
}

} // namespace

VertexSet vertices_of(const FeynmanGraph& g, LineSet lines) {
    VertexSet vs = 0;
    for (int r = 0; r < g.num_internal(); ++r)
        if (lines & bit(r)) vs |= (VertexSet{1} << g.internal()[r].from) | (VertexSet{1} << g.internal()[r].to);
    return vs;
}

bool lines_are_1pi(const FeynmanGraph& g, LineSet lines) {
    if (lines == 0) return false;
    VertexSet vs = vertices_of(g, lines);
    if (!connected_on(g, vs, lines)) return false;
    for (int r = 0; r < g.num_internal(); ++r)
        if ((lines & bit(r)) && !connected_on(g, vs, lines & ~bit(r))) return false;
    return true;
}

std::vector<Subdiagram> enumerate_1pi_subdiagrams(const FeynmanDiagram& d, int max_lines) {
    require_1pi(d, max_lines);
    const auto& g = d.graph();
    const LineSet all = g.all_internal();
    const VertexSet allv = g.num_vertices() == 64 ? ~VertexSet{0} : ((VertexSet{1} << g.num_vertices()) - 1);
    std::vector<Subdiagram> out;
    for (LineSet s = 1; s <= all && s != 0; ++s) {
        if (!lines_are_1pi(g, s)) continue;
        Subdiagram sub{vertices_of(g, s), s};
        if (sub.lines == all && sub.vertices == allv) continue;
        out.push_back(sub);
    }
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return before(g, a, b); });
    return out;
}

std::vector<DisjointFamily> enumerate_disjoint_families(const FeynmanDiagram& d, int max_lines) {
    auto subs = enumerate_1pi_subdiagrams(d, max_lines);
    std::vector<DisjointFamily> out;
    DisjointFamily cur;
    std::function<void(size_t, VertexSet)> rec = [&](size_t start, VertexSet used) {
        for (size_t i = start; i < subs.size(); ++i) {
            if (subs[i].vertices & used) continue;
            cur.push_back(subs[i]);
            out.push_back(cur);
            rec(i + 1, used | subs[i].vertices);
            cur.pop_back();
        }
    };
    rec(0, 0);
    return out;
}

std::string subdiagram_key(const FeynmanGraph& g, const Subdiagram& s) {
    std::string k = "{";
    auto vs = vertex_ids(g, s.vertices);
    for (size_t i = 0; i < vs.size(); ++i) k += (i ? "," : "") + vs[i];
    k += "|";
    auto ls = line_ids(g, s.lines);
    for (size_t i = 0; i < ls.size(); ++i) k += (i ? "," : "") + ls[i];
    return k + "}";
}

FeynmanDiagram induced_diagram(const FeynmanDiagram& d, const Subdiagram& s) {
    const auto& g = d.graph();
    auto in = [&](int v) { return (s.vertices >> v) & 1; };
    std::vector<std::string> verts = vertex_ids(g, s.vertices);
    std::vector<FeynmanGraph::InternalSpec> ints;
    std::vector<FeynmanGraph::ExternalSpec> exts;
    std::map<std::string, double> masses;
    // Per-vertex renaming of parent line momenta into the induced leg names.
    std::vector<std::map<std::string, std::string>> rename(g.num_vertices());
    for (int r = 0; r < g.num_internal(); ++r) {
        const auto& l = g.internal()[r];
        if (s.lines & bit(r)) {
            ints.push_back({l.id, g.vertices()[l.from], g.vertices()[l.to]});
            masses[l.id] = d.mass(r);
        } else if (in(l.from) && in(l.to)) {
            exts.push_back({l.id + ":out", g.vertices()[l.from], Direction::Out});
            exts.push_back({l.id + ":in", g.vertices()[l.to], Direction::In});
            rename[l.from][l.id] = l.id + ":out";
            if (l.to != l.from) rename[l.to][l.id] = l.id + ":in";
        } else if (in(l.from)) {
            exts.push_back({l.id, g.vertices()[l.from], Direction::Out});
        } else if (in(l.to)) {
            exts.push_back({l.id, g.vertices()[l.to], Direction::In});
        }
    }
    for (const auto& e : g.external())
        if (in(e.vertex)) exts.push_back({e.id, g.vertices()[e.vertex], e.dir});
    std::map<std::string, DotPolynomial> ops;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (in(v)) ops[g.vertices()[v]] = d.op(v).rename(rename[v]);
    FeynmanGraph sg(verts, ints, exts);
    return FeynmanDiagram(d.name() + subdiagram_key(g, s), std::move(sg), ops, masses, d.m2_value());
}

std::string quotient_vertex_id(const FeynmanDiagram& d, const DisjointFamily& fam, size_t i) {
    auto vs = vertex_ids(d.graph(), fam.at(i).vertices);
    std::string id;
    for (size_t k = 0; k < vs.size(); ++k) id += (k ? ":" : "") + vs[k];
    std::set<std::string> taken(d.graph().vertices().begin(), d.graph().vertices().end());
    while (taken.count(id)) id += ":q";
    return id;
}

FeynmanDiagram quotient(const FeynmanDiagram& d, const DisjointFamily& fam, const std::vector<DotPolynomial>& ops) {
    const auto& g = d.graph();
    if (ops.size() != fam.size()) throw GraphError("quotient needs one vertex operator per family member");
    const VertexSet allv = (VertexSet{1} << g.num_vertices()) - 1;
    VertexSet used = 0;
    for (const auto& s : fam) {
        if (s.vertices & used) throw GraphError("family members share a vertex");
        if (s.lines == g.all_internal() && s.vertices == allv)
            throw GraphError("a family member equals the whole diagram");
        if (!lines_are_1pi(g, s.lines) || vertices_of(g, s.lines) != s.vertices)
            throw GraphError("family member is not a 1PI subdiagram");
        used |= s.vertices;
    }
    std::vector<std::string> vname(g.num_vertices());
    for (int v = 0; v < g.num_vertices(); ++v) vname[v] = g.vertices()[v];
    std::vector<std::string> fresh;
    for (size_t i = 0; i < fam.size(); ++i) {
        fresh.push_back(quotient_vertex_id(d, fam, i));
        for (int v = 0; v < g.num_vertices(); ++v)
            if (fam[i].vertices & (VertexSet{1} << v)) vname[v] = fresh.back();
    }
    LineSet removed = 0;
    for (const auto& s : fam) removed |= s.lines;

    std::vector<std::string> verts;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (!(used & (VertexSet{1} << v))) verts.push_back(vname[v]);
    verts.insert(verts.end(), fresh.begin(), fresh.end());
    std::vector<FeynmanGraph::InternalSpec> ints;
    std::map<std::string, double> masses;
    for (int r = 0; r < g.num_internal(); ++r) {
        if (removed & bit(r)) continue;
        const auto& l = g.internal()[r];
        ints.push_back({l.id, vname[l.from], vname[l.to]});
        masses[l.id] = d.mass(r);
    }
    std::vector<FeynmanGraph::ExternalSpec> exts;
    for (const auto& e : g.external()) exts.push_back({e.id, vname[e.vertex], e.dir});

    std::map<std::string, DotPolynomial> qops;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (!(used & (VertexSet{1} << v))) qops[vname[v]] = d.op(v);
    for (size_t i = 0; i < fam.size(); ++i) {
        std::map<std::string, std::string> back;
        for (const auto& sym : ops[i].symbols()) {
            auto pos = sym.rfind(':');
            if (pos != std::string::npos && (sym.substr(pos) == ":in" || sym.substr(pos) == ":out"))
                back[sym] = sym.substr(0, pos);
        }
        qops[fresh[i]] = ops[i].rename(back);
    }
    FeynmanGraph qg(verts, ints, exts);
    std::string name = d.name() + "/";
    for (size_t i = 0; i < fam.size(); ++i) name += subdiagram_key(g, fam[i]);
    return FeynmanDiagram(name, std::move(qg), qops, masses, d.m2_value());
}

std::vector<Subdiagram> painted_components(const FeynmanDiagram& d, LineSet A) {
    const auto& g = d.graph();
    LineSet kept = 0;
    for (int r = 0; r < g.num_internal(); ++r) {
        if (!(A & bit(r))) continue;
        const auto& l = g.internal()[r];
        VertexSet ends = (VertexSet{1} << l.from) | (VertexSet{1} << l.to);
        // r is a bridge of the painted graph iff its ends separate without it.
        if (l.from == l.to || connected_on(g, ends, A & ~bit(r))) kept |= bit(r);
    }
    // Group the non-bridge lines into connected components.
    std::vector<Subdiagram> out;
    LineSet rest = kept;
    while (rest) {
        int r0 = __builtin_ctzll(rest);
        LineSet comp = bit(r0);
        VertexSet vs = vertices_of(g, comp);
        bool grew = true;
        while (grew) {
            grew = false;
            for (int r = 0; r < g.num_internal(); ++r) {
                if (!(rest & bit(r)) || (comp & bit(r))) continue;
                const auto& l = g.internal()[r];
                if ((vs >> l.from & 1) || (vs >> l.to & 1)) {
                    comp |= bit(r);
                    vs |= vertices_of(g, bit(r));
                    grew = true;
                }
            }
        }
        out.push_back({vs, comp});
        rest &= ~comp;
    }
    std::sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return before(g, a, b); });
    return out;
}

} // namespace alpharen
