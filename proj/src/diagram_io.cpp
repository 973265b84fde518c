#include "alpharen/diagram_io.hpp"

#include "alpharen/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>

namespace alpharen {

namespace {

using nlohmann::json;

int line_at(const std::string& text, size_t pos) {
    pos = std::min(pos, text.size());
    return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n'));
}

/// Locates the text of a JSON value: the first occurrence of `needle` after
/// the key `section`. nlohmann::json keeps no positions, so semantic errors
/// are placed by searching the source.
class Locator {
public:
    explicit Locator(const std::string& text) : text_(text) {}

    /// Line of the nth occurrence of `needle` after the key `section`; an
    /// empty section searches the whole text.
    int line(const std::string& section, const std::string& needle = "", int nth = 1) const {
        size_t at = section.empty() ? 0 : text_.find("\"" + section + "\"");
        if (at == std::string::npos) return 1;
        if (needle.empty()) return line_at(text_, at);
        size_t hit = at;
        for (int k = 0; k < nth && hit != std::string::npos; ++k)
            hit = text_.find(needle, k == 0 ? hit : hit + 1);
        return line_at(text_, hit == std::string::npos ? at : hit);
    }
    static std::string quoted(const std::string& s) { return json(s).dump(); }

private:
    const std::string& text_;
};

class Parser {
public:
    Parser(const std::string& text, std::string source) : text_(text), loc_(text), source_(std::move(source)) {}

    [[noreturn]] void fail(const std::string& what, int line) const {
        throw ParseError(source_.empty() ? what : source_ + ": " + what, line);
    }

    const json& field(const json& obj, const std::string& key, json::value_t type, const std::string& section,
                      const std::string& needle) const {
        auto it = obj.find(key);
        if (it == obj.end()) fail("missing field '" + key + "'", loc_.line(section, needle));
        const bool ok = it->type() == type ||
                        (type == json::value_t::number_float && (it->is_number_integer() || it->is_number_unsigned()));
        if (!ok) fail("field '" + key + "' has the wrong type", loc_.line(section, needle));
        return *it;
    }

    void only(const json& obj, const std::set<std::string>& keys, const std::string& section,
              const std::string& needle) const {
        for (const auto& [k, v] : obj.items())
            if (!keys.count(k)) fail("unknown field '" + k + "'", loc_.line(section, needle.empty() ? Locator::quoted(k) : needle));
    }

    FeynmanDiagram run() {
        json doc;
        try {
            doc = json::parse(text_);
        } catch (const json::parse_error& e) {
            std::string msg = e.what();
            // Drop nlohmann's "[json.exception.parse_error.101] " prefix.
            if (auto p = msg.find("] "); p != std::string::npos) msg = msg.substr(p + 2);
            fail(msg, line_at(text_, e.byte == 0 ? 0 : e.byte - 1));
        }
        if (!doc.is_object()) fail("a diagram file is a JSON object", 1);
        only(doc, {"name", "vertices", "internal_lines", "external_lines", "vertex_ops", "m2"}, "", "");

        const std::string name = field(doc, "name", json::value_t::string, "name", "").get<std::string>();
        std::vector<std::string> vertices;
        std::set<std::string> vset;
        for (const auto& v : field(doc, "vertices", json::value_t::array, "vertices", "")) {
            if (!v.is_string()) fail("vertex ids are strings", loc_.line("vertices"));
            auto id = v.get<std::string>();
            if (!vset.insert(id).second)
                fail("duplicate vertex '" + id + "'", loc_.line("vertices", Locator::quoted(id), 2));
            vertices.push_back(id);
        }
        auto known_vertex = [&](const std::string& v, const std::string& section, const std::string& owner) {
            if (!vset.count(v))
                fail(owner + " references unknown vertex '" + v + "'", loc_.line(section, Locator::quoted(owner)));
        };

        std::vector<FeynmanGraph::InternalSpec> internal;
        std::map<std::string, double> masses;
        std::set<std::string> ids;
        for (const auto& l : field(doc, "internal_lines", json::value_t::array, "internal_lines", "")) {
            if (!l.is_object()) fail("internal lines are objects", loc_.line("internal_lines"));
            const auto id = field(l, "id", json::value_t::string, "internal_lines", "").get<std::string>();
            const std::string where = Locator::quoted(id);
            only(l, {"id", "from", "to", "mass"}, "internal_lines", where);
            if (!ids.insert(id).second) fail("duplicate line '" + id + "'", loc_.line("internal_lines", where, 2));
            auto from = field(l, "from", json::value_t::string, "internal_lines", where).get<std::string>();
            auto to = field(l, "to", json::value_t::string, "internal_lines", where).get<std::string>();
            known_vertex(from, "internal_lines", id);
            known_vertex(to, "internal_lines", id);
            const double m = field(l, "mass", json::value_t::number_float, "internal_lines", where).get<double>();
            if (!(m >= 0)) fail("line '" + id + "' has a negative mass", loc_.line("internal_lines", where));
            internal.push_back({id, from, to});
            masses[id] = m;
        }

        std::vector<FeynmanGraph::ExternalSpec> external;
        for (const auto& e : field(doc, "external_lines", json::value_t::array, "external_lines", "")) {
            if (!e.is_object()) fail("external lines are objects", loc_.line("external_lines"));
            const auto id = field(e, "id", json::value_t::string, "external_lines", "").get<std::string>();
            const std::string where = Locator::quoted(id);
            only(e, {"id", "vertex", "direction"}, "external_lines", where);
            if (!ids.insert(id).second)
                fail("duplicate line '" + id + "'", loc_.line("", "\"id\": " + where, 2));
            auto v = field(e, "vertex", json::value_t::string, "external_lines", where).get<std::string>();
            known_vertex(v, "external_lines", id);
            auto dir = field(e, "direction", json::value_t::string, "external_lines", where).get<std::string>();
            if (dir != "in" && dir != "out")
                fail("direction of '" + id + "' must be \"in\" or \"out\"", loc_.line("external_lines", where));
            external.push_back({id, v, dir == "in" ? Direction::In : Direction::Out});
        }

        std::map<std::string, std::string> op_text;
        if (doc.contains("vertex_ops")) {
            for (const auto& [v, expr] : field(doc, "vertex_ops", json::value_t::object, "vertex_ops", "").items()) {
                if (!vset.count(v))
                    fail("vertex_ops names unknown vertex '" + v + "'", loc_.line("vertex_ops", Locator::quoted(v)));
                if (!expr.is_string())
                    fail("vertex operator of '" + v + "' must be a string", loc_.line("vertex_ops", Locator::quoted(v)));
                op_text[v] = expr.get<std::string>();
            }
        }
        std::optional<double> m2;
        if (doc.contains("m2")) {
            m2 = field(doc, "m2", json::value_t::number_float, "m2", "").get<double>();
            if (!(*m2 >= 0)) fail("m2 must be non-negative", loc_.line("m2"));
        }

        FeynmanGraph graph;
        try {
            graph = FeynmanGraph(vertices, internal, external);
        } catch (const GraphError& e) {
            fail(e.what(), 1);
        }
        std::map<std::string, DotPolynomial> ops;
        for (const auto& [v, expr] : op_text) {
            const int line = loc_.line("vertex_ops", Locator::quoted(v));
            try {
                ops[v] = expr.find_first_not_of(" \t") == std::string::npos ? DotPolynomial::constant(1)
                                                                            : parse_polynomial(expr);
            } catch (const ParseError& e) {
                fail("vertex operator of '" + v + "': " + e.what(), line);
            }
            for (const auto& s : ops[v].symbols())
                if (graph.internal_index(s) < 0 && graph.external_index(s) < 0)
                    fail("vertex operator of '" + v + "' uses unknown momentum 'p_" + s + "'", line);
        }
        try {
            return FeynmanDiagram(name, graph, ops, masses, m2);
        } catch (const GraphError& e) {
            fail(e.what(), loc_.line("vertex_ops"));
        }
    }

private:
    const std::string& text_;
    Locator loc_;
    std::string source_;
};

} // namespace

FeynmanDiagram parse_diagram(const std::string& text, const std::string& source) {
    return Parser(text, source).run();
}

FeynmanDiagram parse_diagram_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open diagram file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_diagram(ss.str(), path);
}

std::string serialize_diagram(const FeynmanDiagram& d) {
    const auto& g = d.graph();
    auto q = [](const std::string& s) { return json(s).dump(); };
    auto num = [](double x) { return json(x).dump(); };
    std::ostringstream os;
    os << "{\n  \"name\": " << q(d.name()) << ",\n  \"vertices\": [";
    for (int v = 0; v < g.num_vertices(); ++v) os << (v ? ", " : "") << q(g.vertices()[v]);
    os << "],\n  \"internal_lines\": [";
    for (int r = 0; r < g.num_internal(); ++r) {
        const auto& l = g.internal()[r];
        os << (r ? "," : "") << "\n    {\"id\": " << q(l.id) << ", \"from\": " << q(g.vertices()[l.from])
           << ", \"to\": " << q(g.vertices()[l.to]) << ", \"mass\": " << num(d.mass(r)) << "}";
    }
    os << (g.num_internal() ? "\n  " : "") << "],\n  \"external_lines\": [";
    for (size_t e = 0; e < g.external().size(); ++e) {
        const auto& x = g.external()[e];
        os << (e ? "," : "") << "\n    {\"id\": " << q(x.id) << ", \"vertex\": " << q(g.vertices()[x.vertex])
           << ", \"direction\": " << q(x.dir == Direction::In ? "in" : "out") << "}";
    }
    os << (g.external().empty() ? "" : "\n  ") << "],\n  \"vertex_ops\": {";
    for (int v = 0; v < g.num_vertices(); ++v)
        os << (v ? ", " : "") << q(g.vertices()[v]) << ": " << q(d.op(v).to_string());
    os << "}";
    // m2 is written only when it differs from the default.
    FeynmanDiagram plain(d.name(), g, {}, [&] {
        std::map<std::string, double> m;
        for (int r = 0; r < g.num_internal(); ++r) m[g.internal()[r].id] = d.mass(r);
        return m;
    }());
    if (plain.m2_value() != d.m2_value()) os << ",\n  \"m2\": " << num(d.m2_value());
    os << "\n}\n";
    return os.str();
}

} // namespace alpharen
