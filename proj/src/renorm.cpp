#include "alpharen/renorm.hpp"

#include "alpharen/errors.hpp"

#include <algorithm>
#include <cstring>
#include <iomanip>
#include <numeric>
#include <sstream>

namespace alpharen {

int CountertermTerm::order() const { return std::accumulate(m.begin(), m.end(), 0); }

LaurentC LocalCounterterm::evaluate(const FeynmanGraph& g, const Momenta& p) const {
    auto momentum = [&](const std::string& id) {
        int e = g.external_index(id);
        if (e < 0) throw std::invalid_argument("counterterm symbol '" + id + "' is not a leg of the diagram");
        return Vec4{p(e, 0), p(e, 1), p(e, 2), p(e, 3)};
    };
    LaurentC sum;
    for (const auto& t : terms) {
        DotPolynomial poly;
        poly.add_term(t.monomial, 1.0);
        sum = sum + t.coeff * cdouble(poly.evaluate(momentum, 0.0));
    }
    return sum;
}

void LocalCounterterm::check_homogeneity() const {
    for (const auto& t : terms)
        if (2 * t.order() + t.monomial.momentum_degree() != omega || t.monomial.m2_power != 0)
            throw std::logic_error("counterterm of " + diagram + " violates 2|m| + deg P = Omega");
}

std::string format_counterterm(const LocalCounterterm& ct, int precision) {
    std::ostringstream os;
    os << ct.diagram << " Omega=" << ct.omega << " terms=" << ct.terms.size() << "\n";
    for (const auto& t : ct.terms) {
        os << "  m=(";
        for (size_t r = 0; r < t.m.size(); ++r) os << (r ? "," : "") << t.m[r];
        DotPolynomial poly;
        poly.add_term(t.monomial, 1.0);
        os << ") P=" << poly.to_string() << " coeff=" << format_laurent(t.coeff, precision) << "\n";
    }
    return os.str();
}

std::vector<TaylorCoefficient> taylor_along(const std::function<Eigen::VectorXcd(double)>& f, int degree,
                                            double step, int levels) {
    if (degree < 0 || !(step > 0) || levels < 1) throw std::invalid_argument("taylor_along: bad stencil parameters");
    const int s = degree / 2 + 1;
    std::map<double, Eigen::VectorXcd> cache;
    auto at = [&](double t) -> const Eigen::VectorXcd& {
        auto it = cache.find(t);
        if (it == cache.end()) it = cache.emplace(t, f(t)).first;
        return it->second;
    };
    // table[k][l]: coefficient k from step / 2^l.
    std::vector<std::vector<Eigen::VectorXcd>> table(degree + 1);
    for (int l = 0; l < levels; ++l) {
        const double h = std::ldexp(step, -l);
        const Eigen::Index nz = at(0.0).size();
        // Even part as a polynomial of degree s in u = t^2 through j = 0..s;
        // odd part over t as a polynomial of degree s-1 through j = 1..s.
        Eigen::MatrixXd Ve(s + 1, s + 1), Vo(s, s);
        Eigen::MatrixXcd re(s + 1, nz), ro(s, nz);
        for (int j = 0; j <= s; ++j) {
            const double t = j * h, u = t * t;
            for (int i = 0; i <= s; ++i) Ve(j, i) = std::pow(u, i);
            const Eigen::VectorXcd& fp = at(t);
            const Eigen::VectorXcd& fm = at(-t);
            re.row(j) = (0.5 * (fp + fm)).transpose();
            if (j > 0) {
                for (int i = 0; i < s; ++i) Vo(j - 1, i) = std::pow(u, i);
                ro.row(j - 1) = ((fp - fm) / (2 * t)).transpose();
            }
        }
        Eigen::MatrixXcd ce = Ve.cast<cdouble>().fullPivLu().solve(re);
        Eigen::MatrixXcd co = Vo.cast<cdouble>().fullPivLu().solve(ro);
        for (int k = 0; k <= degree; ++k)
            table[k].push_back(k % 2 == 0 ? Eigen::VectorXcd(ce.row(k / 2).transpose())
                                          : Eigen::VectorXcd(co.row(k / 2).transpose()));
    }
    std::vector<TaylorCoefficient> out;
    for (int k = 0; k <= degree; ++k) {
        // Leading truncation exponent in u = h^2.
        const int e0 = k % 2 == 0 ? s + 1 - k / 2 : s - (k - 1) / 2;
        std::vector<Eigen::VectorXcd> col = table[k];
        double err = 0;
        for (int i = 1; i < levels; ++i) {
            const double r = std::pow(4.0, e0 + i - 1);
            std::vector<Eigen::VectorXcd> next;
            for (size_t l = 1; l < col.size(); ++l) next.push_back(col[l] + (col[l] - col[l - 1]) / (r - 1));
            err = (next.back() - col.back()).cwiseAbs().maxCoeff();
            col = std::move(next);
        }
        out.push_back({k, col.back(), err});
    }
    return out;
}

std::vector<std::string> independent_legs(const FeynmanGraph& g) {
    std::vector<std::string> legs;
    for (size_t e = 0; e + 1 < g.external().size(); ++e) legs.push_back(g.external()[e].id);
    return legs;
}

Momenta axis_momenta(const FeynmanGraph& g, const std::vector<std::string>& legs, double t) {
    std::map<std::string, Vec4> given;
    for (const auto& id : independent_legs(g)) given[id] = {0, 0, 0, 0};
    for (const auto& id : legs) {
        if (!given.count(id)) throw std::invalid_argument("leg '" + id + "' is not an independent leg");
        given[id] = {t, 0, 0, 0};
    }
    return complete_momenta(g, given);
}

std::vector<MomentumTaylorTerm> taylor_project(const FeynmanGraph& g,
                                               const std::function<Eigen::VectorXcd(const Momenta&)>& f,
                                               int degree, double step, int levels) {
    if (degree != 0 && degree != 2) throw UnsupportedError("momentum Taylor projection supports degree 0 and 2");
    std::vector<MomentumTaylorTerm> out;
    out.push_back({DotMonomial{}, f(zero_momenta(g)), 0});
    if (degree == 0) return out;
    const auto legs = independent_legs(g);
    auto second = [&](const std::vector<std::string>& on) {
        auto c = taylor_along([&](double t) { return f(t == 0 ? zero_momenta(g) : axis_momenta(g, on, t)); }, 2,
                              step, levels);
        return c[2];
    };
    std::vector<TaylorCoefficient> diag;
    for (const auto& a : legs) diag.push_back(second({a}));
    for (size_t a = 0; a < legs.size(); ++a) {
        DotMonomial mono;
        mono.dots = {{legs[a], legs[a]}};
        out.push_back({mono, diag[a].value, diag[a].error});
    }
    for (size_t a = 0; a < legs.size(); ++a)
        for (size_t b = a + 1; b < legs.size(); ++b) {
            auto both = second({legs[a], legs[b]});
            DotMonomial mono;
            mono.dots = {{legs[a], legs[b]}};
            out.push_back({mono, both.value - diag[a].value - diag[b].value,
                           both.error + diag[a].error + diag[b].error});
        }
    return out;
}

std::vector<Insertion> star_insert(const FeynmanDiagram& d, const DisjointFamily& fam,
                                   const std::vector<LocalCounterterm>& cts) {
    if (cts.size() != fam.size()) throw std::invalid_argument("star_insert: one counterterm per family member");
    for (size_t i = 0; i < fam.size(); ++i)
        if (static_cast<int>(cts[i].lines.size()) != fam[i].num_lines())
            throw std::invalid_argument("star_insert: counterterm " + cts[i].diagram + " does not match " +
                                        subdiagram_key(d.graph(), fam[i]));
    std::vector<Insertion> out;
    for (const auto& ct : cts)
        if (ct.empty()) return out;
    for (const auto& ct : cts)
        for (const auto& t : ct.terms)
            if (t.order() > 0)
                throw UnsupportedError("insertion of a counterterm term with alpha-derivatives (|m| > 0) from " +
                                       ct.diagram);
    std::vector<size_t> pick(cts.size(), 0);
    while (true) {
        std::vector<DotPolynomial> ops;
        LaurentC w = LaurentC::constant(1.0);
        for (size_t i = 0; i < cts.size(); ++i) {
            const auto& t = cts[i].terms[pick[i]];
            DotPolynomial poly;
            poly.add_term(t.monomial, 1.0);
            ops.push_back(poly);
            w = w * t.coeff;
        }
        out.push_back({quotient(d, fam, ops), w});
        size_t i = 0;
        while (i < cts.size() && ++pick[i] == cts[i].terms.size()) pick[i++] = 0;
        if (i == cts.size()) break;
    }
    return out;
}

std::string diagram_key(const FeynmanDiagram& d) {
    std::ostringstream os;
    os << std::setprecision(17);
    const auto& g = d.graph();
    for (const auto& l : g.internal())
        os << l.id << ":" << g.vertices()[l.from] << ">" << g.vertices()[l.to] << ":" << d.mass(g.internal_index(l.id))
           << ";";
    os << "|";
    for (int v = 0; v < g.num_vertices(); ++v) os << g.vertices()[v] << "=" << d.op(v).to_string() << ";";
    os << "|";
    for (const auto& e : g.external())
        os << e.id << "@" << g.vertices()[e.vertex] << (e.dir == Direction::In ? "<" : ">") << ";";
    os << "|m2=" << d.m2_value();
    return os.str();
}

namespace {

std::string momenta_key(const Momenta& p) {
    std::string k(reinterpret_cast<const char*>(p.data()), sizeof(double) * static_cast<size_t>(p.size()));
    return k;
}

/// Momenta of `to`'s legs copied by id from `from`.
Momenta transfer(const FeynmanGraph& from, const Momenta& p, const FeynmanGraph& to) {
    Momenta q = zero_momenta(to);
    for (int e = 0; e < static_cast<int>(to.external().size()); ++e) {
        int src = from.external_index(to.external()[e].id);
        if (src < 0) throw GraphError("quotient leg '" + to.external()[e].id + "' missing from the parent");
        q.row(e) = p.row(src);
    }
    return q;
}

} // namespace

Renormalizer::Renormalizer(RenormOptions opt) : opt_(std::move(opt)), z_(opt_.circle.points()) {}

Eigen::VectorXcd Renormalizer::z_vector() const {
    return Eigen::Map<const Eigen::VectorXcd>(z_.data(), static_cast<Eigen::Index>(z_.size()));
}

LaurentFit Renormalizer::fit(const Eigen::VectorXcd& values, int loops) const {
    const int n = static_cast<int>(z_.size());
    const int kmin = -2 * loops, kmax = n - 5 - 2 * loops;
    if (kmax < 2) throw std::invalid_argument("too few regulator samples for a Laurent fit");
    return fit_laurent(z_, values, kmin, kmax);
}

double Renormalizer::taylor_step(const FeynmanDiagram& d) const {
    if (opt_.taylor.step > 0) return opt_.taylor.step;
    double m = 0;
    for (double x : d.masses())
        if (x > 0) m = m > 0 ? std::min(m, x) : x;
    if (!(m > 0)) throw UnsupportedError("Taylor projection at p = 0 needs a positive internal mass");
    return 0.2 * m;
}

Eigen::VectorXcd Renormalizer::bare(const FeynmanDiagram& d, const Momenta& p) {
    const std::string key = diagram_key(d) + "#" + momenta_key(p);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = bare_cache_.find(key);
        if (it != bare_cache_.end()) return it->second;
    }
    auto v = bare_amplitude(d, p, z_vector(), opt_.sector);
    std::lock_guard<std::mutex> lock(mu_);
    sectors_ += static_cast<long>(v.sectors.size());
    bare_cache_.emplace(key, v.value);
    return v.value;
}

Eigen::VectorXcd Renormalizer::rtilde(const FeynmanDiagram& d, const Momenta& p) {
    Eigen::VectorXcd v = bare(d, p);
    if (!opt_.subtract || d.graph().num_internal() == 0 || loop_count(d.graph()) == 0) return v;
    for (const auto& fam : enumerate_disjoint_families(d, opt_.max_lines)) {
        std::vector<LocalCounterterm> cts;
        bool any_empty = false;
        for (const auto& s : fam) {
            cts.push_back(counterterm(induced_diagram(d, s)));
            any_empty = any_empty || cts.back().empty();
        }
        if (any_empty) continue;
        for (const auto& ins : star_insert(d, fam, cts)) {
            Eigen::VectorXcd q = bare(ins.diagram, transfer(d.graph(), p, ins.diagram.graph()));
            for (Eigen::Index j = 0; j < q.size(); ++j) v[j] += ins.weight.evaluate(z_[j]) * q[j];
        }
    }
    return v;
}

const LocalCounterterm& Renormalizer::counterterm(const FeynmanDiagram& d) {
    const std::string key = diagram_key(d);
    {
        std::lock_guard<std::mutex> lock(mu_);
        auto it = table_.find(key);
        if (it != table_.end()) return *it->second;
    }
    auto ct = std::make_unique<LocalCounterterm>();
    ct->diagram = d.name();
    for (const auto& l : d.graph().internal()) ct->lines.push_back(l.id);
    const int L = d.graph().num_internal() == 0 ? 0 : loop_count(d.graph());
    ct->omega = L == 0 ? -1 : divergence_degree(d);
    if (L > 0 && ct->omega >= 0) {
        if (ct->omega > 2)
            throw UnsupportedError("counterterm of " + d.name() + " needs a Taylor polynomial of degree " +
                                   std::to_string(ct->omega) + " > 2");
        // Subdiagram counterterms first, smallest first, so the table fills in
        // dependency order.
        auto subs = enumerate_1pi_subdiagrams(d, opt_.max_lines);
        std::stable_sort(subs.begin(), subs.end(),
                         [](const Subdiagram& a, const Subdiagram& b) { return a.num_lines() < b.num_lines(); });
        for (const auto& s : subs) counterterm(induced_diagram(d, s));

        auto taylor = taylor_project(
            d.graph(), [&](const Momenta& p) { return rtilde(d, p); }, ct->omega, taylor_step(d),
            opt_.taylor.levels);
        const int nlines = d.graph().num_internal();
        for (const auto& t : taylor) {
            auto f = fit(t.value, L);
            const double scale = std::max(t.value.cwiseAbs().maxCoeff(), t.error);
            if (f.residual > opt_.tol_fit * scale + 2 * t.error)
                throw NumericalError("Laurent fit of the counterterm of " + d.name() + " has residual " +
                                     std::to_string(f.relative_residual));
            LaurentC c = -f.series.pole_part(opt_.scheme);
            if (c.is_zero()) continue;
            CountertermTerm term;
            term.m.assign(static_cast<size_t>(nlines), 0);
            term.monomial = t.monomial;
            // A constant term of a quadratically divergent diagram carries one
            // alpha-derivative; it is booked on the first line.
            if (2 * term.order() + t.monomial.momentum_degree() < ct->omega) term.m[0] = ct->omega / 2;
            term.coeff = c;
            ct->terms.push_back(std::move(term));
        }
        ct->check_homogeneity();
    }
    std::lock_guard<std::mutex> lock(mu_);
    auto [it, inserted] = table_.emplace(key, std::move(ct));
    if (inserted) order_.push_back(key);
    return *it->second;
}

const LocalCounterterm* Renormalizer::find(const std::string& key) const {
    auto it = table_.find(key);
    return it == table_.end() ? nullptr : it->second.get();
}

RenormalizedAmplitude Renormalizer::renormalize(const FeynmanDiagram& d, const std::vector<Momenta>& points) {
    RenormalizedAmplitude out;
    out.diagram = d.name();
    const int L = d.graph().num_internal() == 0 ? 0 : loop_count(d.graph());
    out.omega = L == 0 ? -1 : divergence_degree(d);
    const LocalCounterterm* ct = nullptr;
    if (opt_.subtract) ct = &counterterm(d);
    out.certified = true;
    for (const auto& p : points) {
        RenormalizedPoint pt;
        pt.p = p;
        Eigen::VectorXcd v = rtilde(d, p);
        auto f = fit(v, L);
        pt.rtilde = f.series;
        pt.fit_residual = f.relative_residual;
        pt.series = ct ? f.series + ct->evaluate(d.graph(), p) : f.series;
        pt.scale = std::abs(f.series[0]);
        for (int k = pt.series.min_exp(); k < 0; ++k) pt.max_pole = std::max(pt.max_pole, std::abs(pt.series[k]));
        pt.certified = pt.max_pole <= opt_.tol_finite * pt.scale;
        out.certified = out.certified && pt.certified;
        out.points.push_back(std::move(pt));
    }
    std::lock_guard<std::mutex> lock(mu_);
    out.sectors = sectors_;
    return out;
}

} // namespace alpharen
