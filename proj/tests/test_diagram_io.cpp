#include "doctest.h"
#include "test_diagrams.hpp"

#include "alpharen/diagram_io.hpp"
#include "alpharen/errors.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace alpharen;
using namespace testdiag;

namespace {

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int error_line(const std::string& text) {
    try {
        parse_diagram(text);
    } catch (const ParseError& e) {
        return e.line();
    }
    return -1;
}

std::string error_text(const std::string& text) {
    try {
        parse_diagram(text);
    } catch (const ParseError& e) {
        return e.what();
    }
    return "";
}

const std::string kBubble = R"({
  "name": "bubble",
  "vertices": ["v1", "v2"],
  "internal_lines": [
    {"id": "l1", "from": "v1", "to": "v2", "mass": 1.0},
    {"id": "l2", "from": "v1", "to": "v2", "mass": 1.0}
  ],
  "external_lines": [
    {"id": "e1", "vertex": "v1", "direction": "in"},
    {"id": "e2", "vertex": "v1", "direction": "in"},
    {"id": "e3", "vertex": "v2", "direction": "out"},
    {"id": "e4", "vertex": "v2", "direction": "out"}
  ],
  "vertex_ops": {"v1": "1", "v2": "1"}
}
)";

std::string replace(std::string s, const std::string& from, const std::string& to) {
    auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
}

} // namespace

TEST_CASE("bubble file") {
    auto d = parse_diagram(kBubble);
    CHECK(d.graph().num_vertices() == 2);
    CHECK(d.graph().num_internal() == 2);
    CHECK(d.graph().external().size() == 4);
    CHECK(d == bubble());
    CHECK(serialize_diagram(d) == kBubble);
}

TEST_CASE("corpus files are canonical") {
    const std::filesystem::path dir = ALPHAREN_DIAGRAM_DIR;
    int n = 0;
    for (const auto& entry : std::filesystem::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        INFO(entry.path().string());
        const std::string text = slurp(entry.path());
        auto d = parse_diagram_file(entry.path().string());
        CHECK(serialize_diagram(d) == text);
        CHECK(parse_diagram(serialize_diagram(d)) == d);
        ++n;
    }
    CHECK(n >= 6);
}

TEST_CASE("round trip on random diagrams with operators") {
    std::mt19937_64 rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        auto g = random_graph(rng, 2 + static_cast<int>(rng() % 3), 2 + static_cast<int>(rng() % 4));
        std::map<std::string, double> masses;
        for (const auto& l : g.internal()) masses[l.id] = 0.25 * static_cast<double>(rng() % 8);
        std::map<std::string, DotPolynomial> ops;
        const auto& l0 = g.internal()[0];
        ops[g.vertices()[l0.from]] = parse_polynomial("2.5*p_" + l0.id + ".p_" + l0.id + " - m2");
        std::optional<double> m2;
        if (trial % 3 == 0) m2 = 0.3;
        FeynmanDiagram d("r" + std::to_string(trial), g, ops, masses, m2);
        auto text = serialize_diagram(d);
        auto back = parse_diagram(text);
        CHECK(back == d);
        CHECK(serialize_diagram(back) == text);
    }
}

TEST_CASE("vertex operator defaults") {
    auto d = parse_diagram(replace(kBubble, R"("vertex_ops": {"v1": "1", "v2": "1"})", R"("vertex_ops": {"v1": ""})"));
    CHECK(d.op(0) == DotPolynomial::constant(1));
    CHECK(d.op(1) == DotPolynomial::constant(1));
    auto e = parse_diagram(replace(kBubble, ",\n  \"vertex_ops\": {\"v1\": \"1\", \"v2\": \"1\"}", ""));
    CHECK(e == d);
}

TEST_CASE("errors carry the line of the offending text") {
    SUBCASE("syntax") {
        CHECK(error_line(replace(kBubble, R"("mass": 1.0},)", R"("mass": 1.0,},)")) == 5);
        CHECK(error_line("{\n  \"name\": \"x\",\n") == 3);
        CHECK(error_line("[1, 2]") == 1);
    }
    SUBCASE("unknown vertex is named") {
        auto text = replace(kBubble, R"("id": "l2", "from": "v1", "to": "v2")", R"("id": "l2", "from": "v1", "to": "v9")");
        CHECK(error_line(text) == 6);
        CHECK(error_text(text).find("'v9'") != std::string::npos);
        auto leg = replace(kBubble, R"("id": "e3", "vertex": "v2")", R"("id": "e3", "vertex": "w")");
        CHECK(error_line(leg) == 11);
        CHECK(error_text(leg).find("'w'") != std::string::npos);
    }
    SUBCASE("duplicate ids") {
        CHECK(error_line(replace(kBubble, R"("id": "l2")", R"("id": "l1")")) == 6);
        CHECK(error_line(replace(kBubble, R"("id": "e4")", R"("id": "e2")")) == 12);
        CHECK(error_line(replace(kBubble, R"(["v1", "v2"])", R"(["v1", "v2", "v1"])")) == 3);
    }
    SUBCASE("field shape") {
        CHECK(error_line(replace(kBubble, R"(, "mass": 1.0},
    {"id": "l2")", R"(},
    {"id": "l2")")) == 5);
        CHECK(error_text(replace(kBubble, R"("direction": "in"},)", R"("direction": "sideways"},)"))
                  .find("direction") != std::string::npos);
        CHECK(error_line(replace(kBubble, R"("mass": 1.0},)", R"("mass": 1.0, "spin": 0},)")) == 5);
        CHECK(error_line(replace(kBubble, R"("mass": 1.0},)", R"("mass": -1.0},)")) == 5);
        CHECK(error_line(replace(kBubble, R"("name": "bubble")", R"("name": 3)")) == 2);
    }
    SUBCASE("vertex operators") {
        CHECK(error_line(replace(kBubble, R"("v2": "1")", R"("v2": "p_l1 +* 2")")) == 14);
        CHECK(error_line(replace(kBubble, R"("v2": "1")", R"("v2": "p_zz.p_zz")")) == 14);
        CHECK(error_line(replace(kBubble, R"("v2": "1")", R"("v3": "1")")) == 14);
    }
    CHECK_THROWS_AS(parse_diagram_file("/nonexistent/diagram.json"), ParseError);
}
