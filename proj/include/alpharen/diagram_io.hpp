#pragma once

#include "alpharen/graph.hpp"

#include <string>

namespace alpharen {

/// Diagram files are strict JSON objects:
///   {"name": ..., "vertices": [...],
///    "internal_lines": [{"id", "from", "to", "mass"}, ...],
///    "external_lines": [{"id", "vertex", "direction": "in"|"out"}, ...],
///    "vertex_ops": {"<vertex>": "<polynomial>", ...},
///    "m2": <number, optional>}
/// Missing or empty vertex_ops entries mean "1". Throws ParseError with the
/// 1-based line of the offending text; `source` prefixes the message.
FeynmanDiagram parse_diagram(const std::string& text, const std::string& source = "");
FeynmanDiagram parse_diagram_file(const std::string& path);

/// Canonical text: fixed key order, one line or leg per row, canonical vertex
/// operators. parse_diagram(serialize_diagram(d)) == d.
std::string serialize_diagram(const FeynmanDiagram& d);

} // namespace alpharen
