#include "alpharen/cli.hpp"

#include "CLI11.hpp"

#include <iostream>
#include <map>

int main(int argc, char** argv) {
    using namespace alpharen;
    RunConfig cfg;
    CLI::App app{"Renormalized scalar Feynman amplitudes in the alpha representation"};
    app.require_subcommand(1, 1);

    const std::map<std::string, Scheme> schemes{{"paper", Scheme::Paper}, {"minimal", Scheme::Minimal}};
    const std::map<std::string, ReportFormat> formats{{"text", ReportFormat::Text},
                                                      {"json-lines", ReportFormat::JsonLines}};
    for (const auto& name : cli_commands()) {
        auto* sub = app.add_subcommand(name);
        sub->add_option("diagram", cfg.diagram, "Diagram file")->required()->check(CLI::ExistingFile);
        sub->add_option("--scheme", cfg.scheme, "Subtraction scheme: paper or minimal")
            ->transform(CLI::CheckedTransformer(schemes, CLI::ignore_case));
        sub->add_option("--z-radius", cfg.z_radius, "Radius of the regulator circle");
        sub->add_option("--z-samples", cfg.z_samples, "Regulator samples on the circle");
        sub->add_option("--tol-fit", cfg.tol_fit, "Largest accepted relative Laurent fit residual");
        sub->add_option("--tol-finite", cfg.tol_finite, "Largest accepted pole relative to |a_0|");
        sub->add_option("--quad-rel-tol", cfg.quad_rel_tol, "Relative quadrature tolerance");
        sub->add_option("--quad-max-level", cfg.quad_max_level, "Largest quadrature refinement level");
        sub->add_option("--seed", cfg.seed, "Random seed");
        sub->add_option("--format", cfg.format, "Report format: text or json-lines")
            ->transform(CLI::CheckedTransformer(formats, CLI::ignore_case));
        sub->add_option("--max-lines", cfg.max_lines, "Largest diagram accepted by the enumeration");
        sub->add_option("--point", cfg.points, "External momenta, \"e1=p0,p1,p2,p3;e2=...\"");
        sub->add_option("--draws", cfg.draws, "Random draws for kirchhoff-check");
        sub->add_flag("!--no-subtract", cfg.subtract, "Skip every subtraction (debugging)");
        sub->callback([&cfg, name] { cfg.command = name; });
    }
    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitUsage;
    }
    return run(cfg, std::cout, std::cerr);
}
