#include "alpharen/parametric.hpp"

#include "alpharen/errors.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <numeric>

namespace alpharen {

namespace {

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

constexpr int kMaxEnumLines = 24;

void check_alpha(const Eigen::VectorXd& alpha, int n) {
    if (alpha.size() != n) throw std::invalid_argument("alpha has the wrong length");
    for (int r = 0; r < n; ++r)
        if (!(alpha[r] > 0)) throw std::invalid_argument("alpha must be strictly positive");
}

// Lines whose subset with popcount k forms a forest; calls f(mask).
void for_each_forest(const FeynmanGraph& g, int k, const std::function<void(LineSet)>& f) {
    const int n = g.num_internal();
    if (n > kMaxEnumLines) throw UnsupportedError("forest enumeration is limited to 24 internal lines");
    if (k < 0) return;
    std::vector<int> pick;
    std::function<void(int)> rec = [&](int start) {
        if (static_cast<int>(pick.size()) == k) {
            UnionFind uf(g.num_vertices());
            LineSet m = 0;
            for (int r : pick) {
                if (!uf.unite(g.internal()[r].from, g.internal()[r].to)) return;
                m |= bit(r);
            }
            f(m);
            return;
        }
        for (int r = start; r <= n - (k - static_cast<int>(pick.size())); ++r) {
            if (g.internal()[r].from == g.internal()[r].to) continue;
            pick.push_back(r);
            rec(r + 1);
            pick.pop_back();
        }
    };
    rec(0);
}

IntegerPoly poly_mul(const IntegerPoly& a, const IntegerPoly& b) {
    IntegerPoly r;
    for (const auto& [ea, ca] : a)
        for (const auto& [eb, cb] : b) {
            std::vector<int> e(ea.size());
            for (size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            r[e] += ca * cb;
        }
    for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
    return r;
}

void poly_add(IntegerPoly& a, const IntegerPoly& b, long long sign) {
    for (const auto& [e, c] : b) a[e] += sign * c;
    for (auto it = a.begin(); it != a.end();) it = it->second == 0 ? a.erase(it) : std::next(it);
}

} // namespace

Momenta zero_momenta(const FeynmanGraph& g) { return Momenta::Zero(static_cast<int>(g.external().size()), 4); }

Momenta complete_momenta(const FeynmanGraph& g, const std::map<std::string, Vec4>& given) {
    const auto& ext = g.external();
    Momenta p = zero_momenta(g);
    for (const auto& [id, v] : given)
        if (g.external_index(id) < 0) throw GraphError("momentum given for unknown external line '" + id + "'");
    if (ext.empty()) return p;
    Eigen::RowVector4d total = Eigen::RowVector4d::Zero();
    double scale = 0;
    int missing = -1;
    for (int e = 0; e < static_cast<int>(ext.size()); ++e) {
        auto it = given.find(ext[e].id);
        if (it == given.end()) {
            if (missing >= 0) throw GraphError("momentum of external line '" + ext[missing].id + "' is missing");
            missing = e;
            continue;
        }
        for (int mu = 0; mu < 4; ++mu) p(e, mu) = it->second[mu];
        total += (ext[e].dir == Direction::In ? 1.0 : -1.0) * p.row(e);
        scale = std::max(scale, p.row(e).norm());
    }
    if (missing >= 0) {
        if (missing != static_cast<int>(ext.size()) - 1)
            throw GraphError("only the external line with the largest identifier ('" + ext.back().id +
                             "') may be left to momentum conservation");
        p.row(missing) = (ext[missing].dir == Direction::In ? -1.0 : 1.0) * total;
    } else if (total.norm() > 1e-12 * std::max(1.0, scale)) {
        throw GraphError("external momenta violate conservation");
    }
    return p;
}

LoopBasis build_loop_basis(const FeynmanGraph& g) {
    if (!is_connected(g)) throw GraphError("loop basis requires a connected graph");
    const int n = g.num_internal(), nv = g.num_vertices(), ne = static_cast<int>(g.external().size());
    LoopBasis b;
    UnionFind uf(nv);
    for (int r = 0; r < n; ++r) {
        const auto& l = g.internal()[r];
        if (l.from != l.to && uf.unite(l.from, l.to)) b.tree |= bit(r);
        else b.chords.push_back(r);
    }
    const int L = b.loops();
    b.C = Eigen::MatrixXd::Zero(n, L);
    b.D = Eigen::MatrixXd::Zero(n, ne);
    // Injection into each vertex, as coefficients over (loops | externals).
    Eigen::MatrixXd inj = Eigen::MatrixXd::Zero(nv, L + ne);
    for (int i = 0; i < L; ++i) {
        const auto& l = g.internal()[b.chords[i]];
        b.C(b.chords[i], i) = 1;
        inj(l.to, i) += 1;
        inj(l.from, i) -= 1;
    }
    for (int e = 0; e < ne; ++e) inj(g.external()[e].vertex, L + e) += g.external()[e].dir == Direction::In ? 1 : -1;

    // Root the tree at vertex 0; each tree line carries the net injection of
    // the subtree it hangs from.
    std::vector<int> parent_line(nv, -1), order{0};
    std::vector<bool> seen(nv, false);
    seen[0] = true;
    for (size_t k = 0; k < order.size(); ++k) {
        int v = order[k];
        for (int r = 0; r < n; ++r) {
            if (!(b.tree & bit(r))) continue;
            const auto& l = g.internal()[r];
            int w = l.from == v ? l.to : (l.to == v ? l.from : -1);
            if (w >= 0 && !seen[w]) {
                seen[w] = true;
                parent_line[w] = r;
                order.push_back(w);
            }
        }
    }
    Eigen::MatrixXd sub = inj;
    for (int k = nv - 1; k > 0; --k) {
        int v = order[k];
        int r = parent_line[v];
        const auto& l = g.internal()[r];
        double sign = l.from == v ? 1.0 : -1.0;
        b.C.row(r) = sign * sub.row(v).head(L);
        b.D.row(r) = sign * sub.row(v).tail(ne);
        int up = l.from == v ? l.to : l.from;
        sub.row(up) += sub.row(v);
    }
    return b;
}

QuadraticForm quadratic_form(const LoopBasis& b, const Eigen::VectorXd& alpha) {
    check_alpha(alpha, static_cast<int>(b.C.rows()));
    QuadraticForm q;
    q.Q = b.C.transpose() * alpha.asDiagonal() * b.C;
    q.B = b.C.transpose() * alpha.asDiagonal() * b.D;
    q.Cext = b.D.transpose() * alpha.asDiagonal() * b.D;
    return q;
}

double MultilinearPoly::evaluate(const double* x) const {
    double s = 0;
    for (const auto& [m, c] : terms) {
        double v = c;
        for (LineSet r = m; r; r &= r - 1) v *= x[__builtin_ctzll(r)];
        s += v;
    }
    return s;
}

int MultilinearPoly::degree() const {
    int d = 0;
    for (const auto& t : terms) d = std::max(d, popcount(t.first));
    return d;
}

MultilinearPoly symanzik_u(const FeynmanGraph& g) {
    if (!is_connected(g)) throw GraphError("Symanzik U requires a connected graph");
    MultilinearPoly u;
    const LineSet all = g.all_internal();
    for_each_forest(g, g.num_vertices() - 1, [&](LineSet t) { u.terms.push_back({all & ~t, 1.0}); });
    std::sort(u.terms.begin(), u.terms.end());
    return u;
}

IntegerPoly to_integer_poly(const MultilinearPoly& p, int nlines) {
    IntegerPoly r;
    for (const auto& [m, c] : p.terms) {
        std::vector<int> e(nlines, 0);
        for (int k = 0; k < nlines; ++k) e[k] = (m >> k) & 1;
        r[e] += std::llround(c);
    }
    for (auto it = r.begin(); it != r.end();) it = it->second == 0 ? r.erase(it) : std::next(it);
    return r;
}

IntegerPoly symanzik_u_determinant(const FeynmanGraph& g, const LoopBasis& b) {
    const int n = g.num_internal(), L = b.loops();
    std::vector<std::vector<IntegerPoly>> Q(L, std::vector<IntegerPoly>(L));
    for (int i = 0; i < L; ++i)
        for (int j = 0; j < L; ++j)
            for (int r = 0; r < n; ++r) {
                long long c = std::llround(b.C(r, i)) * std::llround(b.C(r, j));
                if (c == 0) continue;
                std::vector<int> e(n, 0);
                e[r] = 1;
                Q[i][j][e] += c;
            }
    // Laplace expansion along rows, memoized on the set of used columns.
    std::map<unsigned, IntegerPoly> memo;
    std::function<IntegerPoly(int, unsigned)> det = [&](int row, unsigned used) -> IntegerPoly {
        if (row == L) return IntegerPoly{{std::vector<int>(n, 0), 1}};
        auto it = memo.find(used);
        if (it != memo.end()) return it->second;
        IntegerPoly acc;
        int sign = 1;
        for (int col = 0; col < L; ++col) {
            if (used & (1u << col)) continue;
            if (!Q[row][col].empty()) poly_add(acc, poly_mul(Q[row][col], det(row + 1, used | (1u << col))), sign);
            sign = -sign;
        }
        memo[used] = acc;
        return acc;
    };
    return det(0, 0);
}

SymanzikF symanzik_f(const FeynmanGraph& g) {
    SymanzikF f;
    const int nv = g.num_vertices(), ne = static_cast<int>(g.external().size());
    const LineSet all = g.all_internal();
    for_each_forest(g, nv - 2, [&](LineSet forest) {
        UnionFind uf(nv);
        for (int r = 0; r < g.num_internal(); ++r)
            if (forest & bit(r)) uf.unite(g.internal()[r].from, g.internal()[r].to);
        int comps = 0;
        for (int v = 0; v < nv; ++v) comps += uf.find(v) == v;
        if (comps != 2) return;
        Eigen::VectorXd s = Eigen::VectorXd::Zero(ne);
        const int root = uf.find(0);
        for (int e = 0; e < ne; ++e)
            if (uf.find(g.external()[e].vertex) == root) s[e] = g.external()[e].dir == Direction::In ? 1 : -1;
        f.forests.push_back({all & ~forest, s});
    });
    return f;
}

MultilinearPoly SymanzikF::with_momenta(const Momenta& p) const {
    Eigen::MatrixXd gram = p * p.transpose();
    std::map<LineSet, double> acc;
    for (const auto& [cut, s] : forests) acc[cut] += s.dot(gram * s);
    MultilinearPoly out;
    for (const auto& [m, c] : acc)
        if (c != 0) out.terms.push_back({m, c});
    return out;
}

ParametricIntegrand::ParametricIntegrand(const FeynmanDiagram& d)
    : d_(d), basis_(build_loop_basis(d.graph())), u_(symanzik_u(d.graph())), f_(symanzik_f(d.graph())) {
    DotPolynomial prod = DotPolynomial::constant(1.0);
    for (const auto& op : d.ops()) prod = prod * op;
    const_ops_ = prod.is_constant();
    const_value_ = const_ops_ ? prod.constant_value(d.m2_value()) : 0.0;
    std::map<std::string, int> index;
    for (const auto& s : prod.symbols()) {
        index[s] = static_cast<int>(sym_internal_.size());
        sym_internal_.push_back(d.graph().internal_index(s));
        sym_external_.push_back(d.graph().external_index(s));
    }
    for (const auto& [mono, c] : prod.terms()) {
        Mono m{c * std::pow(d.m2_value(), mono.m2_power), {}};
        for (const auto& [a, b] : mono.dots) m.dots.push_back({index[a], index[b]});
        max_pairs_ = std::max(max_pairs_, static_cast<int>(m.dots.size()));
        monos_.push_back(std::move(m));
    }
}

GaussianTerms ParametricIntegrand::terms(const Eigen::VectorXd& alpha, const Momenta& p) const {
    return terms(alpha, p, f_.with_momenta(p));
}

GaussianTerms ParametricIntegrand::terms(const Eigen::VectorXd& alpha, const Momenta& p,
                                         const MultilinearPoly& f_at_p) const {
    const int n = lines(), L = loops();
    check_alpha(alpha, n);
    GaussianTerms t;
    t.U = u_.evaluate(alpha.data());
    t.phi = f_at_p.evaluate(alpha.data()) / t.U;
    for (int r = 0; r < n; ++r) t.mass += alpha[r] * d_.mass(r) * d_.mass(r);
    if (const_ops_) {
        t.wick = {const_value_};
        return t;
    }
    // Shifted Gaussian: line momentum = mean + c_r . x with
    // <x_i,mu x_j,nu> = delta_mu,nu (Q^{-1})_ij / 2.
    Eigen::MatrixXd Qi = Eigen::MatrixXd::Zero(L, L);
    Eigen::Matrix<double, Eigen::Dynamic, 4> mean_lines = basis_.D * p;
    if (L > 0) {
        auto qf = quadratic_form(basis_, alpha);
        Eigen::LLT<Eigen::MatrixXd> llt(qf.Q);
        if (llt.info() != Eigen::Success) throw NumericalError("loop quadratic form is not positive definite");
        Qi = llt.solve(Eigen::MatrixXd::Identity(L, L));
        Eigen::Matrix<double, Eigen::Dynamic, 4> qstar = -Qi * (qf.B * p);
        mean_lines += basis_.C * qstar;
    }
    const int ns = static_cast<int>(sym_internal_.size());
    std::vector<Eigen::RowVector4d> mean(ns);
    std::vector<bool> fluct(ns, false);
    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(ns, ns);
    for (int s = 0; s < ns; ++s) {
        if (sym_internal_[s] >= 0) {
            mean[s] = mean_lines.row(sym_internal_[s]);
            fluct[s] = L > 0 && basis_.C.row(sym_internal_[s]).squaredNorm() > 0;
        } else {
            mean[s] = p.row(sym_external_[s]);
        }
    }
    for (int a = 0; a < ns; ++a)
        for (int b = 0; b < ns; ++b)
            if (fluct[a] && fluct[b])
                G(a, b) = 0.5 * basis_.C.row(sym_internal_[a]).dot(Qi * basis_.C.row(sym_internal_[b]).transpose());

    t.wick.assign(max_pairs_ + 1, 0.0);
    for (const auto& m : monos_) {
        const int M = static_cast<int>(m.dots.size());
        std::vector<int> sym(2 * M);
        for (int k = 0; k < M; ++k) sym[2 * k] = m.dots[k].first, sym[2 * k + 1] = m.dots[k].second;
        for (unsigned mask = 0; mask < (1u << (2 * M)); ++mask) {
            std::vector<int> fl;
            bool ok = true;
            for (int s = 0; s < 2 * M; ++s)
                if (mask >> s & 1) {
                    if (!fluct[sym[s]]) ok = false;
                    fl.push_back(s);
                }
            if (!ok || fl.size() % 2) continue;
            std::vector<int> match(2 * M, -1);
            std::function<void(size_t)> rec = [&](size_t i) {
                while (i < fl.size() && match[fl[i]] >= 0) ++i;
                if (i == fl.size()) {
                    std::vector<bool> seen(2 * M, false);
                    double value = m.coeff;
                    for (int s = 0; s < 2 * M && value != 0; ++s) {
                        if (seen[s] || (mask >> s & 1)) continue;
                        double factor = 1;
                        seen[s] = true;
                        int y = s ^ 1;
                        seen[y] = true;
                        while (mask >> y & 1) {
                            int mm = match[y];
                            factor *= G(sym[y], sym[mm]);
                            seen[mm] = true;
                            y = mm ^ 1;
                            seen[y] = true;
                        }
                        value *= factor * mean[sym[s]].dot(mean[sym[y]]);
                    }
                    for (int s = 0; s < 2 * M && value != 0; ++s) {
                        if (seen[s]) continue;
                        double factor = 1;
                        int x = s;
                        do {
                            seen[x] = true;
                            int y = x ^ 1;
                            seen[y] = true;
                            int mm = match[y];
                            factor *= G(sym[y], sym[mm]);
                            x = mm;
                        } while (x != s);
                        value *= 4.0 * factor;
                    }
                    t.wick[fl.size() / 2] += value;
                    return;
                }
                int a = fl[i];
                for (size_t j = i + 1; j < fl.size(); ++j) {
                    int b = fl[j];
                    if (match[b] >= 0) continue;
                    match[a] = b;
                    match[b] = a;
                    rec(i + 1);
                    match[a] = match[b] = -1;
                }
            };
            rec(0);
        }
    }
    return t;
}

cdouble gaussian_reduce(const ParametricIntegrand& pi, const Eigen::VectorXd& alpha, const Momenta& p, cdouble z) {
    GaussianTerms t = pi.terms(alpha, p);
    double logprod = alpha.array().log().sum();
    double w = 0;
    for (double x : t.wick) w += x;
    const double pref = std::pow(std::numbers::pi, 2 * pi.loops()) / (t.U * t.U) * std::exp(-t.phi - t.mass) * w;
    return pref * std::exp(z * logprod);
}

cdouble gaussian_reduce(const FeynmanDiagram& d, const Eigen::VectorXd& alpha, const Momenta& p, cdouble z) {
    return gaussian_reduce(ParametricIntegrand(d), alpha, p, z);
}

cdouble scale_lambda(const ParametricIntegrand& pi, const Eigen::VectorXd& alpha, const Momenta& p, cdouble z,
                     double lambda) {
    if (!(lambda > 0)) throw std::invalid_argument("lambda must be positive");
    return gaussian_reduce(pi, lambda * alpha, p / std::sqrt(lambda), z);
}

Eigen::Matrix<double, Eigen::Dynamic, 4> kirchhoff_solve(const FeynmanDiagram& d, const Eigen::VectorXd& alpha,
                                                          const Momenta& p) {
    const auto& g = d.graph();
    if (!is_connected(g)) throw GraphError("Kirchhoff network is disconnected");
    Eigen::RowVector4d total = Eigen::RowVector4d::Zero();
    for (int e = 0; e < static_cast<int>(g.external().size()); ++e)
        total += (g.external()[e].dir == Direction::In ? 1.0 : -1.0) * p.row(e);
    if (total.norm() > 1e-12 * std::max(1.0, p.norm())) throw GraphError("external inflow does not conserve momentum");
    LoopBasis b = build_loop_basis(g);
    Eigen::Matrix<double, Eigen::Dynamic, 4> k = b.D * p;
    if (b.loops() > 0) {
        auto qf = quadratic_form(b, alpha);
        Eigen::Matrix<double, Eigen::Dynamic, 4> qstar = -qf.Q.llt().solve(qf.B * p);
        k += b.C * qstar;
    } else {
        check_alpha(alpha, g.num_internal());
    }
    return k;
}

EigenBoundCheck min_eigenvalue_bound_check(const FeynmanDiagram& d, const Eigen::VectorXd& alpha,
                                           double c_required) {
    LoopBasis b = build_loop_basis(d.graph());
    check_alpha(alpha, d.graph().num_internal());
    EigenBoundCheck out;
    const double amin = alpha.minCoeff();
    if (b.loops() == 0) {
        out.lambda_min = std::numeric_limits<double>::infinity();
        out.c_witness = out.lambda_min;
        out.pass = true;
        return out;
    }
    auto qf = quadratic_form(b, alpha);
    Eigen::MatrixXd G = b.C.transpose() * b.C;
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(qf.Q, G, Eigen::EigenvaluesOnly);
    out.lambda_min = es.eigenvalues().minCoeff();
    out.c_witness = out.lambda_min / amin;
    out.pass = out.lambda_min >= c_required * amin * (1 - 1e-12);
    return out;
}

double gaussian_moment_bound(double coeff_l1, int n, int deg, double lambda_min) {
    const double c = coeff_l1 * std::pow(std::numbers::pi, 0.5 * n) * (1 + std::tgamma(0.5 * (n + deg)) / std::tgamma(0.5 * n));
    return c * (std::pow(lambda_min, -0.5 * (n + deg)) + 1);
}

} // namespace alpharen
