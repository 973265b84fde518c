#include "alpharen/sector.hpp"

#include "alpharen/errors.hpp"
#include "alpharen/jet.hpp"
#include "alpharen/special.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

namespace alpharen {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

using RJet = Jet<double>;
using CJet = Jet<cdouble>;

// 1 - (35u^4 - 84u^5 + 70u^6 - 20u^7) on u in [0, 1].
RJet smoothstep_down(const RJet& x, double lo, double hi) {
    if (x[0] <= lo) return RJet(x.order(), 1.0);
    if (x[0] >= hi) return RJet(x.order(), 0.0);
    RJet u = (x + (-lo)) * (1 / (hi - lo));
    RJet inner = u * (-20.0) + 70.0;
    inner = u * inner + (-84.0);
    inner = u * inner + 35.0;
    RJet u2 = u * u;
    return (u2 * u2 * inner) * (-1.0) + 1.0;
}

/// Lines sharing one simplex sum(x) = 1; the last position is the dependent
/// coordinate. Positions map to integration coordinates offset, offset+1, ...
struct Block {
    int offset = 0;
    std::vector<int> lines;
    std::vector<double> lo, hi;
    std::vector<std::vector<double>> kinks;
    std::vector<std::vector<double>> rest_sums;
    std::vector<double> min_rest, max_rest;

    int size() const { return static_cast<int>(lines.size()); }
    int free() const { return std::max(0, size() - 1); }

    void finalize() {
        const int m = size();
        rest_sums.assign(m, {});
        min_rest.assign(m, 0);
        max_rest.assign(m, 0);
        std::set<double> sums{0.0};
        double mn = 0, mx = 0;
        for (int j = m - 1; j >= 0; --j) {
            rest_sums[j].assign(sums.begin(), sums.end());
            min_rest[j] = mn;
            max_rest[j] = mx;
            std::set<double> next = sums;
            for (double s : sums)
                for (double k : kinks[j])
                    if (std::isfinite(k) && k < 1) next.insert(s + k);
            sums.clear();
            for (double s : next)
                if (s < 1) sums.insert(s);
            mn += lo[j];
            mx += hi[j];
        }
    }

    double budget(int j, const std::vector<NodePoint>& pts) const {
        double M = 1;
        for (int i = 0; i < j; ++i) M -= pts[offset + i].x;
        return M;
    }

    void limits(int j, const std::vector<NodePoint>& pts, double& l, double& h, std::vector<double>& br) const {
        const double M = budget(j, pts);
        l = std::max(lo[j], M - max_rest[j]);
        h = std::min(hi[j], M - min_rest[j]);
        for (double k : kinks[j])
            if (std::isfinite(k)) br.push_back(k);
        for (double s : rest_sums[j]) br.push_back(M - s);
    }

    /// Writes the coordinate of every line of the block into out[line].
    void coordinates(const std::vector<NodePoint>& pts, double* out) const {
        const int m = size();
        if (m == 0) return;
        for (int i = 0; i + 1 < m; ++i) out[lines[i]] = pts[offset + i].x;
        if (m == 1) {
            out[lines[0]] = 1.0;
            return;
        }
        const NodePoint& last = pts[offset + m - 2];
        out[lines[m - 1]] = last.to_hi + (budget(m - 2, pts) - last.hi);
    }
};

/// Block over `lines` with the dependent position taken by the last line not
/// in `prefer_not` (if any).
Block make_block(std::vector<int> lines, LineSet prefer_not, int offset) {
    for (int i = static_cast<int>(lines.size()) - 1; i >= 0; --i)
        if (!(prefer_not & bit(lines[i]))) {
            std::rotate(lines.begin() + i, lines.begin() + i + 1, lines.end());
            break;
        }
    Block b;
    b.offset = offset;
    b.lines = std::move(lines);
    const int m = b.size();
    b.lo.assign(m, 0);
    b.hi.assign(m, kInf);
    b.kinks.assign(m, {});
    return b;
}

std::vector<int> lines_of(LineSet s, int n) {
    std::vector<int> out;
    for (int r = 0; r < n; ++r)
        if (s & bit(r)) out.push_back(r);
    return out;
}

/// Gamma(s0 - j + n z_k) for every Wick order j.
std::vector<Eigen::VectorXcd> gamma_table(int n, int L, int jmax, const Eigen::VectorXcd& z) {
    std::vector<Eigen::VectorXcd> out;
    for (int j = 0; j <= jmax; ++j) {
        Eigen::VectorXcd g(z.size());
        for (int k = 0; k < z.size(); ++k) g[k] = gamma_c(static_cast<double>(n - 2 * L - j) + static_cast<double>(n) * z[k]);
        out.push_back(g);
    }
    return out;
}

/// Simplex integrand with the radial integral done in closed form.
struct ClosedFormIntegrand {
    const ParametricIntegrand& pi;
    const Momenta& p;
    MultilinearPoly fp;
    const Eigen::VectorXcd& z;
    std::vector<Eigen::VectorXcd> gam;
    double pi2L;

    ClosedFormIntegrand(const ParametricIntegrand& pi_, const Momenta& p_, const Eigen::VectorXcd& z_)
        : pi(pi_), p(p_), fp(pi_.f().with_momenta(p_)), z(z_),
          gam(gamma_table(pi_.lines(), pi_.loops(), pi_.max_contractions(), z_)),
          pi2L(std::pow(kPi, 2 * pi_.loops())) {}

    void add(const Eigen::VectorXd& beta, double weight, Eigen::VectorXcd& acc) const {
        const int n = pi.lines(), L = pi.loops();
        GaussianTerms t = pi.terms(beta, p, fp);
        const double c = t.phi + t.mass;
        if (!(c > 0)) throw NumericalError("exponent vanishes on the simplex (massless line at zero momentum)");
        const double logc = std::log(c);
        double logb = 0;
        for (int r = 0; r < n; ++r) logb += std::log(beta[r]);
        const double base = weight * pi2L / (t.U * t.U);
        std::vector<double> cw(t.wick.size());
        for (size_t j = 0; j < t.wick.size(); ++j)
            cw[j] = t.wick[j] * std::exp(-static_cast<double>(n - 2 * L - static_cast<int>(j)) * logc);
        const double expo = logb - n * logc;
        for (int k = 0; k < z.size(); ++k) {
            cdouble s = 0;
            for (size_t j = 0; j < cw.size(); ++j)
                if (cw[j] != 0) s += cw[j] * gam[j][k];
            acc[k] += base * std::exp(z[k] * expo) * s;
        }
    }
};

QuadratureResult require(const QuadratureResult& r, const std::string& what) {
    if (!r.converged) {
        std::ostringstream os;
        os << what << ": quadrature did not converge (change " << r.error << " at level " << r.level << ")";
        throw NumericalError(os.str());
    }
    return r;
}

SectorValue regular_sector(const ParametricIntegrand& pi, const SectorPartition& part, LineSet A, const Momenta& p,
                           const Eigen::VectorXcd& z, const QuadratureOptions& opt) {
    const int n = pi.lines();
    Block blk = make_block(lines_of((LineSet{1} << n) - 1, n), A, 0);
    for (int i = 0; i < blk.size(); ++i) {
        const bool small = A & bit(blk.lines[i]);
        blk.lo[i] = small ? 0.0 : part.lower();
        blk.hi[i] = small ? part.upper() : kInf;
        blk.kinks[i] = {part.lower(), part.upper()};
    }
    blk.finalize();
    ClosedFormIntegrand cf(pi, p, z);
    Eigen::VectorXd beta(n);
    LimitsFn limits = [&](int k, const std::vector<NodePoint>& pts, double& lo, double& hi, std::vector<double>& br) {
        blk.limits(k, pts, lo, hi, br);
    };
    IntegrandFn f = [&](const std::vector<NodePoint>& pts, double w, Eigen::VectorXcd& acc) {
        blk.coordinates(pts, beta.data());
        const double eta = part.eta(A, beta.data());
        if (eta != 0) cf.add(beta, w * eta, acc);
    };
    auto r = require(adaptive_integral(n - 1, static_cast<int>(z.size()), limits, f, opt),
                     "sector " + sector_name(pi.diagram().graph(), A));
    return {A, SectorKind::Regular, r.value, r.error, r.level, r.evaluations};
}

/// Sector whose small lines contain one cycle gamma. With beta_gamma = t xi
/// and beta_rest = (1 - t) zeta the integrand is t^{a + b z} f(t, xi, zeta),
/// a = n_gamma - 3, b = n_gamma, f smooth at t = 0.
class SingularSector {
public:
    SingularSector(const ParametricIntegrand& pi, const SectorPartition& part, const SectorShape& shape,
                   const Momenta& p, const Eigen::VectorXcd& z)
        : pi_(pi), part_(part), A_(shape.A), G_(shape.gamma.lines), z_(z) {
        n_ = pi.lines();
        R_ = ((LineSet{1} << n_) - 1) & ~G_;
        ng_ = popcount(G_);
        nr_ = n_ - ng_;
        L_ = pi.loops();
        a_ = ng_ - 3;
        b_ = ng_;
        K_ = std::max(0, 4 - 2 * ng_ + 2);
        s0_ = n_ - 2 * L_;
        T_ = std::min(1.0, ng_ * part.upper());
        for (int r = 0; r < n_; ++r) m2_.push_back(pi.diagram().mass(r) * pi.diagram().mass(r));
        auto split = [&](const MultilinearPoly& poly, std::vector<Mono>& out) {
            for (const auto& [mask, c] : poly.terms) {
                const int mg = popcount(mask & G_);
                if (mg < 1) throw NumericalError("Symanzik monomial without a line of the cycle");
                out.push_back({c, mask, mg - 1, popcount(mask & R_)});
            }
        };
        split(pi.u(), u_);
        split(pi.f().with_momenta(p), f_);
        xi_ = make_block(lines_of(G_, n_), 0, 1);
        zeta_ = make_block(lines_of(R_, n_), A_, ng_);
    }

    SectorValue evaluate(const QuadratureOptions& opt) {
        const int nz = static_cast<int>(z_.size());
        const std::string name = "sector " + sector_name(pi_.diagram().graph(), A_);
        // Remainder t^{a+bz} (f - sum_{k<K} f_k t^k) over t in [0, T].
        std::vector<double> tbreaks = t_breakpoints();
        std::vector<double> x(n_);
        double cached_t = -1;
        LimitsFn limits = [&](int k, const std::vector<NodePoint>& pts, double& lo, double& hi,
                              std::vector<double>& br) {
            if (k == 0) {
                lo = 0;
                hi = T_;
                br = tbreaks;
                return;
            }
            if (pts[0].x != cached_t) {
                cached_t = pts[0].x;
                set_bounds(cached_t);
            }
            if (k - 1 < xi_.free())
                xi_.limits(k - 1, pts, lo, hi, br);
            else
                zeta_.limits(k - 1 - xi_.free(), pts, lo, hi, br);
        };
        IntegrandFn rem = [&](const std::vector<NodePoint>& pts, double w, Eigen::VectorXcd& acc) {
            const double t = pts[0].x;
            xi_.coordinates(pts, x.data());
            zeta_.coordinates(pts, x.data());
            remainder(t, x, w, acc);
        };
        xi_.offset = 1;
        zeta_.offset = 1 + xi_.free();
        auto r = require(adaptive_integral(n_ - 1, nz, limits, rem, opt), name);

        Eigen::VectorXcd total = r.value;
        double error = r.error;
        long evals = r.evaluations;
        int level = r.level;
        if (K_ > 0) {
            // Taylor coefficients F_k = int f_k over the t = 0 slice.
            set_bounds(0.0);
            xi_.offset = 0;
            zeta_.offset = xi_.free();
            LimitsFn lim0 = [&](int k, const std::vector<NodePoint>& pts, double& lo, double& hi,
                                std::vector<double>& br) {
                if (k < xi_.free())
                    xi_.limits(k, pts, lo, hi, br);
                else
                    zeta_.limits(k - xi_.free(), pts, lo, hi, br);
            };
            IntegrandFn jets = [&](const std::vector<NodePoint>& pts, double w, Eigen::VectorXcd& acc) {
                xi_.coordinates(pts, x.data());
                zeta_.coordinates(pts, x.data());
                std::vector<Eigen::VectorXcd> fk;
                if (!taylor(x, fk)) return;
                for (int k = 0; k < K_; ++k) acc.segment(k * nz, nz) += w * fk[k];
            };
            auto q = require(adaptive_integral(n_ - 2, K_ * nz, lim0, jets, opt), name + " (Taylor terms)");
            std::vector<Eigen::VectorXcd> F;
            for (int k = 0; k < K_; ++k) F.push_back(q.value.segment(k * nz, nz));
            total += analytic_lambda_terms(F, a_, b_, z_, T_);
            error += q.error * std::pow(T_, a_ + 1) / std::max(0.5, std::abs(a_ + 1.0));
            evals += q.evaluations;
            level = std::max(level, q.level);
        }
        const double pref = std::pow(kPi, 2 * L_) * pi_.constant_op_value();
        Eigen::VectorXcd value(nz);
        double gmax = 0;
        for (int k = 0; k < nz; ++k) {
            cdouble g = gamma_c(static_cast<double>(s0_) + static_cast<double>(n_) * z_[k]);
            value[k] = pref * g * total[k];
            gmax = std::max(gmax, std::abs(pref * g));
        }
        return {A_, SectorKind::Singular, value, error * gmax, level, evals};
    }

private:
    struct Mono {
        double c;
        LineSet mask;
        int tpow, rpow; ///< powers of t and (1 - t) after dividing U by t
    };

    void set_bounds(double t) {
        const double c1 = part_.lower(), c2 = part_.upper();
        for (int i = 0; i < xi_.size(); ++i) {
            xi_.lo[i] = 0;
            xi_.hi[i] = kInf;
            xi_.kinks[i].clear();
            // The subtracted Taylor terms live on the whole xi simplex, so only
            // the kinks of f's support are marked.
            if (t > 0) xi_.kinks[i] = {c1 / t, c2 / t};
        }
        xi_.finalize();
        for (int i = 0; i < zeta_.size(); ++i) {
            const bool small = A_ & bit(zeta_.lines[i]);
            zeta_.lo[i] = small ? 0.0 : c1;
            zeta_.hi[i] = small ? c2 / (1 - t) : kInf;
            zeta_.kinks[i] = {c1, c2};
            if (t > 0) {
                zeta_.kinks[i].push_back(c1 / (1 - t));
                zeta_.kinks[i].push_back(c2 / (1 - t));
            }
        }
        zeta_.finalize();
    }

    std::vector<double> t_breakpoints() const {
        const std::vector<double> thr{part_.lower(), part_.upper()};
        std::set<double> out;
        for (double s : threshold_sums(thr, ng_)) out.insert(s);
        for (double s : threshold_sums(thr, nr_)) out.insert(1 - s);
        for (double c : thr)
            for (double d : thr) out.insert(1 - c / d);
        std::vector<double> v;
        for (double t : out)
            if (t > 0 && t < T_) v.push_back(t);
        return v;
    }

    /// Real factor g and exponent B with f = g exp(z B), as jets in t of the
    /// given order around t0 (order 0 gives the point value).
    void factors(const RJet& t, const std::vector<double>& x, RJet& g, RJet& B) const {
        const int ord = t.order();
        RJet one(ord, 1.0);
        RJet s = one - t;
        std::vector<RJet> tp{one}, sp{one};
        for (int e = 1; e <= n_; ++e) {
            tp.push_back(tp.back() * t);
            sp.push_back(sp.back() * s);
        }
        auto eval = [&](const std::vector<Mono>& ms) {
            RJet acc(ord, 0.0);
            for (const auto& m : ms) {
                double prod = m.c;
                for (int r = 0; r < n_; ++r)
                    if (m.mask & bit(r)) prod *= x[r];
                acc += tp[m.tpow] * sp[m.rpow] * prod;
            }
            return acc;
        };
        RJet U = eval(u_);
        RJet F = eval(f_);
        double mg = 0, mr = 0;
        RJet eta = one;
        for (int r = 0; r < n_; ++r) {
            const bool in_g = G_ & bit(r);
            (in_g ? mg : mr) += m2_[r] * x[r];
            RJet beta = (in_g ? t : s) * x[r];
            RJet S = smoothstep_down(beta, part_.lower(), part_.upper());
            eta = eta * ((A_ & bit(r)) ? S : one - S);
        }
        RJet c = F / U + t * mg + s * mr;
        if (!(c[0] > 0)) throw NumericalError("exponent vanishes on the simplex (massless line at zero momentum)");
        RJet logc = log(c), logs = log(s);
        double logx = 0;
        for (int r = 0; r < n_; ++r) logx += std::log(x[r]);
        g = eta / (U * U) * exp(logs * static_cast<double>(nr_ - 1) - logc * static_cast<double>(s0_));
        B = logs * static_cast<double>(nr_) - logc * static_cast<double>(n_) + logx;
    }

    /// f_k(z) for k < K at the t = 0 slice; false if all vanish.
    bool taylor(const std::vector<double>& x, std::vector<Eigen::VectorXcd>& fk) const {
        RJet g, B;
        factors(RJet::variable(K_ - 1, 0.0, 1.0), x, g, B);
        bool any = false;
        for (int k = 0; k < K_; ++k) any = any || g[k] != 0;
        if (!any) return false;
        fk.assign(K_, Eigen::VectorXcd::Zero(z_.size()));
        CJet gc = g.cast<cdouble>(), Bc = B.cast<cdouble>();
        for (int j = 0; j < z_.size(); ++j) {
            CJet f = gc * exp(Bc * z_[j]);
            for (int k = 0; k < K_; ++k) fk[k][j] = f[k];
        }
        return true;
    }

    void remainder(double t, const std::vector<double>& x, double w, Eigen::VectorXcd& acc) const {
        RJet g0, B0;
        factors(RJet(0, t), x, g0, B0);
        const double g = g0[0], B = B0[0];
        const double logt = std::log(t);
        const double ta = w * std::exp(a_ * logt);
        if (K_ == 0) {
            if (g == 0) return;
            for (int j = 0; j < z_.size(); ++j) acc[j] += ta * g * std::exp(z_[j] * (B + b_ * logt));
            return;
        }
        RJet gj, Bj;
        factors(RJet::variable(K_ - 1, 0.0, 1.0), x, gj, Bj);
        bool jets = false;
        for (int k = 0; k < K_; ++k) jets = jets || gj[k] != 0;
        if (g == 0 && !jets) return;
        const double Bjet0 = Bj[0];
        RJet dB = Bj + (-Bjet0);
        CJet gc = gj.cast<cdouble>(), dBc = dB.cast<cdouble>();
        for (int j = 0; j < z_.size(); ++j) {
            const cdouble zj = z_[j];
            cdouble h = jets ? (gc * exp(dBc * zj)).evaluate(t) : cdouble(0);
            cdouble v = -std::exp(zj * (Bjet0 + b_ * logt)) * h;
            if (g != 0) v += g * std::exp(zj * (B + b_ * logt));
            acc[j] += ta * v;
        }
    }

    const ParametricIntegrand& pi_;
    const SectorPartition& part_;
    LineSet A_, G_, R_ = 0;
    const Eigen::VectorXcd& z_;
    int n_ = 0, ng_ = 0, nr_ = 0, L_ = 0, a_ = 0, b_ = 0, K_ = 0, s0_ = 0;
    double T_ = 1;
    std::vector<double> m2_;
    std::vector<Mono> u_, f_;
    Block xi_, zeta_;
};

} // namespace

double smoothstep_down(double x, double lo, double hi) {
    if (x <= lo) return 1;
    if (x >= hi) return 0;
    const double u = (x - lo) / (hi - lo);
    const double u2 = u * u;
    return 1 - u2 * u2 * (35 + u * (-84 + u * (70 - 20 * u)));
}

SectorPartition::SectorPartition(int lines, double delta, double gamma_smooth)
    : n_(lines), delta_(delta), gamma_(gamma_smooth) {
    if (n_ < 1 || n_ > static_cast<int>(kMaxLines)) throw std::invalid_argument("partition needs 1..63 lines");
    if (!(gamma_ > 0 && gamma_ < 1)) throw std::invalid_argument("smoothing width must lie in (0, 1)");
    if (!(delta_ > 0 && delta_ * (1 + gamma_) < 1.0 / n_))
        throw std::invalid_argument("partition threshold must satisfy 0 < delta (1 + gamma) < 1/n");
}

double SectorPartition::eta(LineSet A, const double* beta) const {
    double e = 1;
    for (int r = 0; r < n_ && e != 0; ++r) {
        const double s = small(beta[r]);
        e *= (A & bit(r)) ? s : 1 - s;
    }
    return e;
}

std::vector<LineSet> SectorPartition::sectors() const {
    std::vector<LineSet> out;
    const LineSet full = (LineSet{1} << n_) - 1;
    for (LineSet A = 0; A < full; ++A) out.push_back(A);
    return out;
}

SectorPartition build_partition(int lines, double delta, double gamma_smooth) {
    if (lines < 1) throw std::invalid_argument("partition needs at least one line");
    return SectorPartition(lines, delta > 0 ? delta : 1.0 / (4 * lines), gamma_smooth);
}

std::string sector_name(const FeynmanGraph& g, LineSet A) {
    std::string s = "{";
    bool first = true;
    for (int r = 0; r < g.num_internal(); ++r)
        if (A & bit(r)) {
            s += (first ? "" : ",") + g.internal()[r].id;
            first = false;
        }
    return s + "}";
}

SectorShape classify_sector(const FeynmanDiagram& d, LineSet A) {
    auto comps = painted_components(d, A);
    if (comps.empty()) return {A, SectorKind::Regular, {}};
    const std::string name = sector_name(d.graph(), A);
    if (comps.size() > 1 || comps[0].loops() != 1)
        throw UnsupportedError("sector " + name + " of " + d.name() +
                               ": small lines contain more than one cycle");
    if (!d.constant_ops())
        throw UnsupportedError("sector " + name + " of " + d.name() +
                               ": momentum-dependent vertex operators in a singular sector");
    return {A, SectorKind::Singular, comps[0]};
}

SectorValue sector_eval(const ParametricIntegrand& pi, const SectorPartition& part, LineSet A, const Momenta& p,
                        const Eigen::VectorXcd& z, const QuadratureOptions& opt) {
    if (part.lines() != pi.lines()) throw std::invalid_argument("partition and diagram have different line counts");
    SectorShape shape = classify_sector(pi.diagram(), A);
    if (shape.kind == SectorKind::Regular) return regular_sector(pi, part, A, p, z, opt);
    return SingularSector(pi, part, shape, p, z).evaluate(opt);
}

AmplitudeValue bare_amplitude(const ParametricIntegrand& pi, const Momenta& p, const Eigen::VectorXcd& z,
                              const SectorOptions& opt) {
    SectorPartition part = build_partition(pi.lines(), opt.delta, opt.gamma_smooth);
    auto sectors = part.sectors();
    for (LineSet A : sectors) classify_sector(pi.diagram(), A); // fail fast on unsupported sectors
    std::function<SectorValue(size_t)> job = [&](size_t i) { return sector_eval(pi, part, sectors[i], p, z, opt.quad); };
    AmplitudeValue out;
    out.sectors = parallel_map<SectorValue>(sectors.size(), job);
    out.value = Eigen::VectorXcd::Zero(z.size());
    for (const auto& s : out.sectors) out.value += s.value;
    return out;
}

AmplitudeValue bare_amplitude(const FeynmanDiagram& d, const Momenta& p, const Eigen::VectorXcd& z,
                              const SectorOptions& opt) {
    return bare_amplitude(ParametricIntegrand(d), p, z, opt);
}

QuadratureResult direct_amplitude(const ParametricIntegrand& pi, const Momenta& p, const Eigen::VectorXcd& z,
                                  const QuadratureOptions& opt) {
    const int n = pi.lines();
    Block blk = make_block(lines_of((LineSet{1} << n) - 1, n), 0, 0);
    blk.finalize();
    ClosedFormIntegrand cf(pi, p, z);
    Eigen::VectorXd beta(n);
    LimitsFn limits = [&](int k, const std::vector<NodePoint>& pts, double& lo, double& hi, std::vector<double>& br) {
        blk.limits(k, pts, lo, hi, br);
    };
    IntegrandFn f = [&](const std::vector<NodePoint>& pts, double w, Eigen::VectorXcd& acc) {
        blk.coordinates(pts, beta.data());
        cf.add(beta, w, acc);
    };
    return adaptive_integral(n - 1, static_cast<int>(z.size()), limits, f, opt);
}

QuadratureResult radial_profile(const ParametricIntegrand& pi, const Momenta& p, cdouble z,
                                const std::vector<double>& lambdas, const QuadratureOptions& opt) {
    const int n = pi.lines(), L = pi.loops();
    for (double l : lambdas)
        if (!(l > 0)) throw std::invalid_argument("radial profile needs positive lambda");
    Block blk = make_block(lines_of((LineSet{1} << n) - 1, n), 0, 0);
    blk.finalize();
    const MultilinearPoly fp = pi.f().with_momenta(p);
    const double pi2L = std::pow(kPi, 2 * L);
    Eigen::VectorXd beta(n);
    LimitsFn limits = [&](int k, const std::vector<NodePoint>& pts, double& lo, double& hi, std::vector<double>& br) {
        blk.limits(k, pts, lo, hi, br);
    };
    IntegrandFn f = [&](const std::vector<NodePoint>& pts, double w, Eigen::VectorXcd& acc) {
        blk.coordinates(pts, beta.data());
        GaussianTerms t = pi.terms(beta, p, fp);
        double logb = 0;
        for (int r = 0; r < n; ++r) logb += std::log(beta[r]);
        const double c = t.phi + t.mass;
        for (size_t i = 0; i < lambdas.size(); ++i) {
            const double lam = lambdas[i], ll = std::log(lam);
            double wick = 0;
            for (size_t j = 0; j < t.wick.size(); ++j) wick += t.wick[j] * std::pow(lam, -static_cast<double>(j));
            const double real = pi2L / (t.U * t.U) * std::exp((n - 1 - 2 * L) * ll - lam * c) * wick;
            acc[static_cast<Eigen::Index>(i)] += w * real * std::exp(z * (logb + n * ll));
        }
    };
    return adaptive_integral(n - 1, static_cast<int>(lambdas.size()), limits, f, opt);
}

Eigen::VectorXcd analytic_lambda_terms(const std::vector<Eigen::VectorXcd>& taylor, double a, double b,
                                       const Eigen::VectorXcd& z, double cutoff) {
    if (!(cutoff > 0)) throw std::invalid_argument("cutoff must be positive");
    Eigen::VectorXcd out = Eigen::VectorXcd::Zero(z.size());
    const double lc = std::log(cutoff);
    for (size_t k = 0; k < taylor.size(); ++k) {
        if (taylor[k].size() != z.size()) throw std::invalid_argument("Taylor data and regulator samples differ");
        for (int j = 0; j < z.size(); ++j) {
            const cdouble e = a + b * z[j] + static_cast<double>(k) + 1.0;
            if (std::abs(e) < 1e-12) throw NumericalError("regulator sample sits on a pole of the lambda integral");
            out[j] += taylor[k][j] * std::exp(e * lc) / e;
        }
    }
    return out;
}

QuadratureResult analytic_lambda(const std::function<Eigen::VectorXcd(double)>& f,
                                 const std::vector<Eigen::VectorXcd>& taylor, double a, double b,
                                 const Eigen::VectorXcd& z, double cutoff, const QuadratureOptions& opt) {
    LimitsFn limits = [&](int, const std::vector<NodePoint>&, double& lo, double& hi, std::vector<double>&) {
        lo = 0;
        hi = cutoff;
    };
    IntegrandFn rem = [&](const std::vector<NodePoint>& pts, double w, Eigen::VectorXcd& acc) {
        const double t = pts[0].x, lt = std::log(t);
        Eigen::VectorXcd v = f(t);
        double tk = 1;
        for (const auto& c : taylor) {
            v -= c * tk;
            tk *= t;
        }
        for (int j = 0; j < z.size(); ++j) acc[j] += w * std::exp((a + b * z[j]) * lt) * v[j];
    };
    QuadratureResult r = adaptive_integral(1, static_cast<int>(z.size()), limits, rem, opt);
    r.value += analytic_lambda_terms(taylor, a, b, z, cutoff);
    return r;
}

FactorizationResult factorization_check(const FeynmanDiagram& d, LineSet A, const Momenta& p, double z, int level,
                                        const SectorOptions& opt) {
    const auto& g = d.graph();
    const int n = g.num_internal();
    SectorShape shape = classify_sector(d, A);
    if (shape.kind != SectorKind::Singular)
        throw std::invalid_argument("factorization check needs a sector whose small lines contain a cycle");
    for (int e = 0; e < p.rows(); ++e)
        if (p.row(e).tail<3>().norm() > 1e-14 * std::max(1.0, p.row(e).norm()))
            throw std::invalid_argument("factorization check needs external momenta along the first axis");

    const FeynmanDiagram gam = induced_diagram(d, shape.gamma);
    const FeynmanDiagram quo = quotient(d, {shape.gamma}, {DotPolynomial::constant(1.0)});
    const ParametricIntegrand pid(d), pig(gam);
    const LoopBasis qb = build_loop_basis(quo.graph());
    if (qb.loops() != 1) throw UnsupportedError("factorization check needs a one-loop quotient");
    const auto& qg = quo.graph();

    // Quotient externals carry the parent's identifiers.
    Momenta pq(qg.external().size(), 4);
    for (size_t e = 0; e < qg.external().size(); ++e) pq.row(e) = p.row(g.external_index(qg.external()[e].id));
    std::vector<int> qline_parent(qg.num_internal());
    for (int r = 0; r < qg.num_internal(); ++r) qline_parent[r] = g.internal_index(qg.internal()[r].id);
    // Each leg of gamma is a parent external (>= 0) or a quotient line (encoded as -1 - index).
    std::vector<int> leg_source;
    for (const auto& e : gam.graph().external()) {
        int ext = g.external_index(e.id);
        if (ext >= 0) {
            leg_source.push_back(ext);
            continue;
        }
        std::string id = e.id;
        if (auto pos = id.find(':'); pos != std::string::npos && (id.ends_with(":in") || id.ends_with(":out")))
            id = id.substr(0, pos);
        leg_source.push_back(-1 - qg.internal_index(id));
    }
    std::vector<int> gline_parent;
    for (const auto& l : gam.graph().internal()) gline_parent.push_back(g.internal_index(l.id));
    double outside_ops = 1;
    for (int v = 0; v < g.num_vertices(); ++v)
        if (!(shape.gamma.vertices >> v & 1)) outside_ops *= d.op(v).constant_value(d.m2_value());

    auto [xr, wr] = gauss_legendre(48);
    auto [xt, wt] = gauss_legendre(24);
    double pmax = 0;
    for (int e = 0; e < p.rows(); ++e) pmax = std::max(pmax, p.row(e).norm());
    const Eigen::MatrixXd kp = qb.D * pq;

    auto factorized = [&](const Eigen::VectorXd& beta) {
        double aq = 0, logb = 0, mass = 0;
        for (int r = 0; r < qg.num_internal(); ++r) {
            const int pr = qline_parent[r];
            aq += beta[pr] * qb.C(r, 0) * qb.C(r, 0);
            logb += std::log(beta[pr]);
            mass += beta[pr] * d.mass(pr) * d.mass(pr);
        }
        Eigen::VectorXd bg(gline_parent.size());
        for (size_t i = 0; i < gline_parent.size(); ++i) bg[static_cast<Eigen::Index>(i)] = beta[gline_parent[i]];
        const double rmax = 2 * pmax + 9 / std::sqrt(aq);
        Momenta pg(leg_source.size(), 4);
        Eigen::Matrix<double, Eigen::Dynamic, 4> k(qg.num_internal(), 4);
        double sum = 0;
        for (int i = 0; i < xr.size(); ++i) {
            const double rad = rmax * (xr[i] + 1) / 2;
            for (int j = 0; j < xt.size(); ++j) {
                const double th = kPi * (xt[j] + 1) / 2;
                Eigen::RowVector4d q(rad * std::cos(th), rad * std::sin(th), 0, 0);
                double energy = mass;
                for (int r = 0; r < qg.num_internal(); ++r) {
                    k.row(r) = qb.C(r, 0) * q + kp.row(r);
                    energy += beta[qline_parent[r]] * k.row(r).squaredNorm();
                }
                for (size_t e = 0; e < leg_source.size(); ++e) {
                    const auto row = static_cast<Eigen::Index>(e);
                    if (leg_source[e] >= 0)
                        pg.row(row) = p.row(leg_source[e]);
                    else
                        pg.row(row) = k.row(-1 - leg_source[e]);
                }
                const double inner = gaussian_reduce(pig, bg, pg, z).real();
                const double w = rmax / 2 * wr[i] * kPi / 2 * wt[j] * 4 * kPi * std::pow(rad, 3) *
                                 std::pow(std::sin(th), 2);
                sum += w * std::exp(-energy) * inner;
            }
        }
        return outside_ops * std::exp(z * logb) * sum;
    };

    SectorPartition part = build_partition(n, opt.delta, opt.gamma_smooth);
    Block blk = make_block(lines_of(g.all_internal(), n), A, 0);
    for (int i = 0; i < blk.size(); ++i) {
        const bool small = A & bit(blk.lines[i]);
        blk.lo[i] = small ? 0.0 : part.lower();
        blk.hi[i] = small ? part.upper() : kInf;
        blk.kinks[i] = {part.lower(), part.upper()};
    }
    blk.finalize();
    Eigen::VectorXd beta(n);
    FactorizationResult res;
    LimitsFn limits = [&](int k, const std::vector<NodePoint>& pts, double& lo, double& hi, std::vector<double>& br) {
        blk.limits(k, pts, lo, hi, br);
    };
    IntegrandFn f = [&](const std::vector<NodePoint>& pts, double w, Eigen::VectorXcd& acc) {
        blk.coordinates(pts, beta.data());
        const double eta = part.eta(A, beta.data());
        if (eta == 0) return;
        ++res.points;
        acc[0] += w * eta * gaussian_reduce(pid, beta, p, z).real();
        acc[1] += w * eta * factorized(beta);
    };
    Eigen::VectorXcd v = iterated_integral(n - 1, 2, limits, f, level, opt.quad.t_max);
    res.direct = v[0].real();
    res.factorized = v[1].real();
    res.relative_difference = std::abs(res.direct - res.factorized) / std::abs(res.direct);
    return res;
}

} // namespace alpharen
