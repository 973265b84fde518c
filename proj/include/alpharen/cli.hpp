#pragma once

#include "alpharen/laurent.hpp"
#include "alpharen/parametric.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace alpharen {

enum class ReportFormat { Text, JsonLines };

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 1,         ///< bad arguments, unreadable or malformed diagram
    kExitCertification = 2, ///< a check ran and failed
    kExitNumerical = 3,     ///< quadrature, fit or unsupported-case failure
};

struct RunConfig {
    std::string command;
    std::string diagram; ///< path of the diagram file
    Scheme scheme = Scheme::Paper;
    double z_radius = 0.1;
    int z_samples = 32;
    double tol_fit = 1e-8;
    double tol_finite = 1e-4;
    double quad_rel_tol = 1e-8;
    int quad_max_level = 7;
    std::uint64_t seed = 1;
    ReportFormat format = ReportFormat::Text;
    int max_lines = 12;
    /// Momentum points, each "leg=p0,p1,p2,p3;leg=..."; unnamed free legs are
    /// zero. Empty selects p = 0 (and one seeded point for verify-finite).
    std::vector<std::string> points;
    bool subtract = true; ///< debug switch: skip every subtraction
    int draws = 100;      ///< random draws for kirchhoff-check

    /// Throws std::invalid_argument naming the first bad parameter.
    void validate() const;
};

const std::vector<std::string>& cli_commands();

/// Momenta for one point specification; the largest-id leg is fixed by
/// conservation. Throws ParseError on malformed text.
Momenta parse_point(const FeynmanGraph& g, const std::string& spec);

/// Executes one command. The report goes to `out`, diagnostics to `err`.
/// Output depends only on the diagram file and the configuration.
int run(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace alpharen
