#include "alpharen/cli.hpp"

#include "alpharen/diagram_io.hpp"
#include "alpharen/errors.hpp"
#include "alpharen/renorm.hpp"
#include "alpharen/sector.hpp"
#include "alpharen/subgraph.hpp"

#include "json.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <random>
#include <sstream>
#include <stdexcept>

namespace alpharen {

namespace {

using Record = nlohmann::ordered_json;

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12e", x);
    return buf;
}

std::string text_value(const Record& v) {
    if (v.is_number_float()) return fmt_double(v.get<double>());
    if (v.is_string()) {
        const auto s = v.get<std::string>();
        return s.empty() || s.find_first_of(" \t\"=") != std::string::npos ? v.dump() : s;
    }
    return v.dump();
}

class Reporter {
public:
    Reporter(std::ostream& out, ReportFormat f) : out_(out), format_(f) {}

    void emit(const std::string& type, Record fields) {
        if (format_ == ReportFormat::JsonLines) {
            Record r;
            r["type"] = type;
            for (auto& [k, v] : fields.items()) r[k] = v;
            out_ << r.dump() << '\n';
            return;
        }
        out_ << type;
        for (const auto& [k, v] : fields.items()) out_ << ' ' << k << '=' << text_value(v);
        out_ << '\n';
    }

private:
    std::ostream& out_;
    ReportFormat format_;
};

std::string scheme_name(Scheme s) { return s == Scheme::Paper ? "paper" : "minimal"; }

/// Uniform double in [0, 1) from the top 53 bits; spelled out so reports do
/// not depend on the standard library's distribution algorithms.
double unit(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

Momenta random_point(const FeynmanGraph& g, std::mt19937_64& rng) {
    std::map<std::string, Vec4> given;
    for (const auto& leg : independent_legs(g)) {
        Vec4 v;
        for (auto& c : v) c = 2 * unit(rng) - 1;
        given[leg] = v;
    }
    return g.external().empty() ? zero_momenta(g) : complete_momenta(g, given);
}

Record momenta_record(const FeynmanGraph& g, const Momenta& p) {
    Record r = Record::object();
    for (size_t e = 0; e < g.external().size(); ++e) {
        Record row = Record::array();
        for (int c = 0; c < 4; ++c) row.push_back(p(static_cast<Eigen::Index>(e), c));
        r[g.external()[e].id] = row;
    }
    return r;
}

void emit_series(Reporter& rep, const std::string& type, const LaurentC& s, int kmin, int kmax, Record tag) {
    for (int k = kmin; k <= kmax; ++k) {
        Record r = tag;
        r["k"] = k;
        const cdouble a = k <= s.valid_through() ? s[k] : cdouble(std::numeric_limits<double>::quiet_NaN());
        r["re"] = a.real();
        r["im"] = a.imag();
        rep.emit(type, std::move(r));
    }
}

std::string omega_z_text(const FeynmanDiagram& d) {
    const int base = divergence_degree(d);
    const int n = d.graph().num_internal();
    std::ostringstream os;
    os << base;
    if (n > 0) os << '-' << 2 * n << 'z';
    return os.str();
}

RenormOptions renorm_options(const RunConfig& cfg) {
    RenormOptions opt;
    opt.scheme = cfg.scheme;
    opt.circle = {cfg.z_radius, cfg.z_samples};
    opt.tol_fit = cfg.tol_fit;
    opt.tol_finite = cfg.tol_finite;
    opt.subtract = cfg.subtract;
    opt.max_lines = cfg.max_lines;
    opt.sector.quad.rel_tol = cfg.quad_rel_tol;
    opt.sector.quad.max_level = cfg.quad_max_level;
    return opt;
}

std::vector<Momenta> requested_points(const RunConfig& cfg, const FeynmanGraph& g) {
    std::vector<Momenta> pts;
    for (const auto& s : cfg.points) pts.push_back(parse_point(g, s));
    return pts;
}

void require_1pi(const FeynmanDiagram& d) {
    if (!is_connected(d.graph())) throw GraphError("diagram '" + d.name() + "' is not connected");
    if (!is_1pi(d.graph())) throw GraphError("diagram '" + d.name() + "' is not 1PI");
}

int cmd_validate(const FeynmanDiagram& d, Reporter& rep) {
    const auto& g = d.graph();
    const bool connected = is_connected(g);
    const bool pi = connected && is_1pi(g);
    Record r;
    r["diagram"] = d.name();
    r["vertices"] = g.num_vertices();
    r["internal"] = g.num_internal();
    r["external"] = g.external().size();
    r["connected"] = connected;
    r["one_pi"] = pi;
    if (connected) r["loops"] = loop_count(g);
    rep.emit("validate", std::move(r));
    return pi ? kExitOk : kExitCertification;
}

int cmd_power_count(const FeynmanDiagram& d, Reporter& rep) {
    require_1pi(d);
    Record r;
    r["diagram"] = d.name();
    r["Omega"] = divergence_degree(d);
    r["Omega_z"] = omega_z_text(d);
    rep.emit("power-count", std::move(r));
    return kExitOk;
}

int cmd_subdiagrams(const RunConfig& cfg, const FeynmanDiagram& d, Reporter& rep) {
    require_1pi(d);
    const auto& g = d.graph();
    const auto subs = enumerate_1pi_subdiagrams(d, cfg.max_lines);
    for (const auto& s : subs) {
        Record r;
        r["key"] = subdiagram_key(g, s);
        r["loops"] = s.loops();
        r["Omega"] = divergence_degree(induced_diagram(d, s));
        rep.emit("subdiagram", std::move(r));
    }
    const auto fams = enumerate_disjoint_families(d, cfg.max_lines);
    for (const auto& fam : fams) {
        std::string key;
        for (const auto& s : fam) key += (key.empty() ? "" : " ") + subdiagram_key(g, s);
        Record r;
        r["members"] = fam.size();
        r["family"] = key;
        rep.emit("family", std::move(r));
    }
    Record sum;
    sum["subdiagrams"] = subs.size();
    sum["families"] = fams.size();
    rep.emit("summary", std::move(sum));
    return kExitOk;
}

int cmd_counterterm(const RunConfig& cfg, const FeynmanDiagram& d, Reporter& rep) {
    require_1pi(d);
    Renormalizer ren(renorm_options(cfg));
    ren.counterterm(d);
    const int L = loop_count(d.graph());
    for (const auto& key : ren.completed()) {
        const LocalCounterterm* ct = ren.find(key);
        Record head;
        head["diagram"] = ct->diagram;
        head["Omega"] = ct->omega;
        head["terms"] = ct->terms.size();
        rep.emit("counterterm", std::move(head));
        for (size_t i = 0; i < ct->terms.size(); ++i) {
            const auto& t = ct->terms[i];
            Record tag;
            tag["diagram"] = ct->diagram;
            tag["term"] = i;
            Record m = Record::object();
            for (size_t r = 0; r < t.m.size(); ++r)
                if (t.m[r]) m[ct->lines[r]] = t.m[r];
            tag["m"] = m;
            DotPolynomial mono;
            mono.add_term(t.monomial, 1.0);
            tag["monomial"] = mono.to_string();
            rep.emit("term", tag);
            emit_series(rep, "coefficient", t.coeff, -2 * L, -1, tag);
            if (cfg.scheme == Scheme::Paper) emit_series(rep, "coefficient", t.coeff, 0, 0, tag);
        }
    }
    return kExitOk;
}

int cmd_evaluate(const RunConfig& cfg, const FeynmanDiagram& d, Reporter& rep) {
    const auto& g = d.graph();
    if (!is_connected(g)) throw GraphError("diagram '" + d.name() + "' is not connected");
    const int L = loop_count(g);
    auto pts = requested_points(cfg, g);
    if (pts.empty()) pts.push_back(zero_momenta(g));
    Renormalizer ren(renorm_options(cfg));
    const Eigen::VectorXcd z = ren.z_vector();
    ParametricIntegrand pi(d);
    int status = kExitOk;
    for (size_t i = 0; i < pts.size(); ++i) {
        Record tag;
        tag["point"] = i;
        Record pr = tag;
        pr["p"] = momenta_record(g, pts[i]);
        rep.emit("point", std::move(pr));
        Eigen::VectorXcd v;
        if (g.num_internal() == 0) {
            v = Eigen::VectorXcd::Constant(z.size(), pi.constant_op_value());
        } else {
            auto amp = bare_amplitude(pi, pts[i], z, renorm_options(cfg).sector);
            v = amp.value;
            for (const auto& s : amp.sectors) {
                Record sr = tag;
                sr["sector"] = sector_name(g, s.A);
                sr["kind"] = s.kind == SectorKind::Regular ? "regular" : "singular";
                sr["level"] = s.level;
                sr["evaluations"] = s.evaluations;
                sr["error"] = s.error;
                rep.emit("sector", std::move(sr));
            }
        }
        auto f = ren.fit(v, L);
        emit_series(rep, "laurent", f.series, -2 * L, 2, tag);
        Record fr = tag;
        fr["fit_residual"] = f.relative_residual;
        fr["tol_fit"] = cfg.tol_fit;
        rep.emit("fit", std::move(fr));
        if (!(f.relative_residual <= cfg.tol_fit)) status = kExitNumerical;
    }
    return status;
}

int cmd_verify_finite(const RunConfig& cfg, const FeynmanDiagram& d, Reporter& rep, std::ostream& err) {
    require_1pi(d);
    const auto& g = d.graph();
    auto pts = requested_points(cfg, g);
    if (pts.empty()) {
        std::mt19937_64 rng(cfg.seed);
        pts.push_back(zero_momenta(g));
        pts.push_back(random_point(g, rng));
    }
    Renormalizer ren(renorm_options(cfg));
    auto res = ren.renormalize(d, pts);
    const int L = loop_count(g);
    bool fit_ok = true;
    for (size_t i = 0; i < res.points.size(); ++i) {
        const auto& pt = res.points[i];
        Record tag;
        tag["point"] = i;
        Record pr = tag;
        pr["p"] = momenta_record(g, pt.p);
        rep.emit("point", std::move(pr));
        emit_series(rep, "laurent", pt.series, -2 * L, 2, tag);
        Record c = tag;
        c["max_pole"] = pt.max_pole;
        c["scale"] = pt.scale;
        c["tol_finite"] = cfg.tol_finite;
        c["fit_residual"] = pt.fit_residual;
        c["certified"] = pt.certified;
        rep.emit("certificate", std::move(c));
        fit_ok = fit_ok && pt.fit_residual <= cfg.tol_fit;
    }
    Record s;
    s["diagram"] = res.diagram;
    s["Omega"] = res.omega;
    s["scheme"] = scheme_name(cfg.scheme);
    s["subtract"] = cfg.subtract;
    s["counterterms"] = ren.completed().size();
    s["sectors"] = res.sectors;
    s["certified"] = res.certified && fit_ok;
    rep.emit("verify-finite", std::move(s));
    if (!fit_ok) {
        err << "error: Laurent fit residual exceeds tol-fit\n";
        return kExitNumerical;
    }
    return res.certified ? kExitOk : kExitCertification;
}

Eigen::VectorXd log_uniform_alpha(std::mt19937_64& rng, int n, double lo, double hi) {
    Eigen::VectorXd a(n);
    for (int r = 0; r < n; ++r) a[r] = lo * std::pow(hi / lo, unit(rng));
    return a;
}

int cmd_kirchhoff(const RunConfig& cfg, const FeynmanDiagram& d, Reporter& rep) {
    require_1pi(d);
    const auto& g = d.graph();
    const int n = g.num_internal();
    const auto basis = build_loop_basis(g);
    std::mt19937_64 rng(cfg.seed);
    bool max_ok = true, energy_ok = true, eigen_ok = true;
    double worst_ratio = 0;
    std::vector<double> c_draw;
    for (int k = 0; k < cfg.draws; ++k) {
        const Eigen::VectorXd a = log_uniform_alpha(rng, n, 1e-3, 1e3);
        const Momenta p = random_point(g, rng);
        const auto q = kirchhoff_solve(d, a, p);
        double P = 0;
        for (Eigen::Index e = 0; e < p.rows(); ++e) P = std::max(P, p.row(e).norm());
        const double C = 2 * P * std::pow(static_cast<double>(g.max_vertex_degree()), n);
        for (int r = 0; r < n; ++r) {
            const double qn = q.row(r).norm();
            if (C > 0) worst_ratio = std::max(worst_ratio, qn / C);
            max_ok = max_ok && qn <= C * (1 + 1e-12) + 1e-300;
        }
        auto energy = [&](const Eigen::Matrix<double, Eigen::Dynamic, 4>& kk) {
            double e = 0;
            for (int r = 0; r < n; ++r) e += a[r] * kk.row(r).squaredNorm();
            return e;
        };
        const double e0 = energy(q);
        for (int s = 0; s < 4 && basis.loops() > 0; ++s) {
            Eigen::Matrix<double, Eigen::Dynamic, 4> dq(basis.loops(), 4);
            for (Eigen::Index i = 0; i < dq.size(); ++i) dq.data()[i] = 0.2 * (2 * unit(rng) - 1);
            energy_ok = energy_ok && energy(q + basis.C * dq) >= e0 * (1 - 1e-12);
        }
        // Exponential draws are uniform on the simplex once normalized.
        Eigen::VectorXd as(n);
        for (int r = 0; r < n; ++r) as[r] = -std::log1p(-unit(rng));
        const auto ev = min_eigenvalue_bound_check(d, as);
        c_draw.push_back(ev.c_witness);
    }
    // The fitted constant is the smallest witness. It must not depend on the
    // draws, so the two halves of the sample have to agree; it can never fall
    // below 1 since lambda_min >= min alpha.
    double ratio = 1, c_fit = 0;
    if (!c_draw.empty() && basis.loops() > 0) {
        const size_t h = c_draw.size() / 2;
        const double c1 = *std::min_element(c_draw.begin(), c_draw.begin() + static_cast<std::ptrdiff_t>(std::max<size_t>(h, 1)));
        const double c2 = h == 0 ? c1 : *std::min_element(c_draw.begin() + static_cast<std::ptrdiff_t>(h), c_draw.end());
        c_fit = std::min(c1, c2);
        ratio = std::max(c1, c2) / std::max(c_fit, std::numeric_limits<double>::min());
        eigen_ok = c_fit >= 1 - 1e-12 && ratio < 1.5;
    }
    Record r;
    r["diagram"] = d.name();
    r["draws"] = cfg.draws;
    r["max_principle"] = max_ok;
    r["worst_current_over_C"] = worst_ratio;
    r["energy_minimal"] = energy_ok;
    r["C_fit"] = c_fit;
    r["C_half_ratio"] = ratio;
    r["eigen_bound"] = eigen_ok;
    rep.emit("kirchhoff-check", std::move(r));
    return max_ok && energy_ok && eigen_ok ? kExitOk : kExitCertification;
}

} // namespace

void RunConfig::validate() const {
    auto positive = [](double x, const char* name) {
        if (!(x > 0) || !std::isfinite(x)) throw std::invalid_argument(std::string(name) + " must be positive");
    };
    positive(z_radius, "z-radius");
    positive(z_samples, "z-samples");
    positive(tol_fit, "tol-fit");
    positive(tol_finite, "tol-finite");
    positive(quad_rel_tol, "quad-rel-tol");
    positive(quad_max_level, "quad-max-level");
    positive(max_lines, "max-lines");
    positive(draws, "draws");
    if (seed == 0) throw std::invalid_argument("seed must be positive");
    if (max_lines > 63) throw std::invalid_argument("max-lines must be at most 63");
    const auto& cmds = cli_commands();
    if (std::find(cmds.begin(), cmds.end(), command) == cmds.end())
        throw std::invalid_argument("unknown command '" + command + "'");
}

const std::vector<std::string>& cli_commands() {
    static const std::vector<std::string> cmds = {"validate",  "power-count",   "subdiagrams",    "counterterm",
                                                  "evaluate",  "verify-finite", "kirchhoff-check"};
    return cmds;
}

Momenta parse_point(const FeynmanGraph& g, const std::string& spec) {
    std::map<std::string, Vec4> given;
    std::stringstream ss(spec);
    std::string item;
    while (std::getline(ss, item, ';')) {
        if (item.find_first_not_of(" \t") == std::string::npos) continue;
        const auto eq = item.find('=');
        if (eq == std::string::npos) throw ParseError("point entry '" + item + "' is not leg=p0,p1,p2,p3");
        std::string leg = item.substr(0, eq);
        leg.erase(0, leg.find_first_not_of(" \t"));
        leg.erase(leg.find_last_not_of(" \t") + 1);
        if (g.external_index(leg) < 0) throw ParseError("point names unknown external leg '" + leg + "'");
        if (given.count(leg)) throw ParseError("point gives leg '" + leg + "' twice");
        std::stringstream cs(item.substr(eq + 1));
        std::string comp;
        Vec4 v{};
        int c = 0;
        while (std::getline(cs, comp, ',')) {
            if (c == 4) throw ParseError("momentum of '" + leg + "' has more than 4 components");
            size_t used = 0;
            try {
                v[c] = std::stod(comp, &used);
            } catch (const std::exception&) {
                throw ParseError("bad momentum component '" + comp + "' for leg '" + leg + "'");
            }
            if (comp.find_first_not_of(" \t", used) != std::string::npos)
                throw ParseError("bad momentum component '" + comp + "' for leg '" + leg + "'");
            ++c;
        }
        if (c != 4) throw ParseError("momentum of '" + leg + "' needs 4 components");
        given[leg] = v;
    }
    if (g.external().empty()) return zero_momenta(g);
    for (const auto& leg : independent_legs(g))
        if (!given.count(leg)) given[leg] = Vec4{};
    try {
        return complete_momenta(g, given);
    } catch (const GraphError& e) {
        throw ParseError(std::string("point: ") + e.what());
    }
}

int run(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    try {
        cfg.validate();
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    Reporter rep(out, cfg.format);
    try {
        const FeynmanDiagram d = parse_diagram_file(cfg.diagram);
        if (cfg.command == "validate") return cmd_validate(d, rep);
        if (cfg.command == "power-count") return cmd_power_count(d, rep);
        if (cfg.command == "subdiagrams") return cmd_subdiagrams(cfg, d, rep);
        if (cfg.command == "counterterm") return cmd_counterterm(cfg, d, rep);
        if (cfg.command == "evaluate") return cmd_evaluate(cfg, d, rep);
        if (cfg.command == "verify-finite") return cmd_verify_finite(cfg, d, rep, err);
        return cmd_kirchhoff(cfg, d, rep);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const GraphError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UnsupportedError& e) {
        err << "unsupported: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::exception& e) {
        err << "internal error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace alpharen
