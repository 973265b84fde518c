#include "alpharen/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>
#include <set>
#include <thread>

namespace alpharen {

const std::vector<DENode>& tanh_sinh_rule(int level, double t_max) {
    static std::mutex mu;
    static std::map<std::pair<int, double>, std::vector<DENode>> cache;
    std::lock_guard lock(mu);
    auto key = std::make_pair(level, t_max);
    auto it = cache.find(key);
    if (it != cache.end()) return it->second;
    const double h = std::ldexp(1.0, -level);
    const int jmax = static_cast<int>(std::floor(t_max / h));
    std::vector<DENode> nodes;
    for (int j = -jmax; j <= jmax; ++j) {
        const double t = j * h;
        const double s = std::numbers::pi / 2 * std::sinh(t);
        const double e = std::exp(-2 * std::abs(s)); // in (0, 1]
        const double small = 2 * e / (1 + e);         // 1 - |u|
        const double large = 2 / (1 + e);             // 1 + |u|
        const double sech2 = 4 * e / ((1 + e) * (1 + e));
        const double w = h * std::numbers::pi / 2 * std::cosh(t) * sech2;
        if (w == 0 || small == 0) continue;
        nodes.push_back(s < 0 ? DENode{small, large, w} : DENode{large, small, w});
    }
    return cache.emplace(key, std::move(nodes)).first->second;
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gauss_legendre(int n) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
    for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = i / std::sqrt(4.0 * i * i - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
    Eigen::VectorXd w = 2 * es.eigenvectors().row(0).transpose().array().square();
    return {es.eigenvalues(), w};
}

namespace {

struct Walker {
    int dims;
    const LimitsFn& limits;
    const IntegrandFn& f;
    const std::vector<DENode>& rule;
    std::vector<NodePoint> pts;
    std::vector<std::vector<double>> breaks;
    long evals = 0;

    void run(int k, double weight, Eigen::VectorXcd& acc) {
        if (k == dims) {
            ++evals;
            f(pts, weight, acc);
            return;
        }
        double lo = 0, hi = 0;
        auto& br = breaks[k];
        br.clear();
        limits(k, pts, lo, hi, br);
        if (!(hi > lo)) return;
        const double tiny = 1e-14 * (hi - lo);
        std::vector<double> cuts{lo};
        std::sort(br.begin(), br.end());
        for (double b : br)
            if (b > cuts.back() + tiny && b < hi - tiny) cuts.push_back(b);
        cuts.push_back(hi);
        for (size_t piece = 0; piece + 1 < cuts.size(); ++piece) {
            const double a = cuts[piece], b = cuts[piece + 1], half = (b - a) / 2;
            for (const auto& n : rule) {
                NodePoint& p = pts[k];
                const double dlo = half * n.from_lo, dhi = half * n.to_hi;
                p.x = dlo <= dhi ? a + dlo : b - dhi;
                p.from_lo = (a - lo) + dlo;
                p.to_hi = (hi - b) + dhi;
                p.hi = hi;
                run(k + 1, weight * half * n.w, acc);
            }
        }
    }
};

} // namespace

Eigen::VectorXcd iterated_integral(int dims, int components, const LimitsFn& limits, const IntegrandFn& f, int level,
                                   double t_max, long* evaluations) {
    Eigen::VectorXcd acc = Eigen::VectorXcd::Zero(components);
    Walker w{dims, limits, f, tanh_sinh_rule(level, t_max), std::vector<NodePoint>(dims),
             std::vector<std::vector<double>>(dims)};
    w.run(0, 1.0, acc);
    if (evaluations) *evaluations += w.evals;
    return acc;
}

QuadratureResult adaptive_integral(int dims, int components, const LimitsFn& limits, const IntegrandFn& f,
                                   const QuadratureOptions& opt) {
    QuadratureResult r;
    Eigen::VectorXcd prev = iterated_integral(dims, components, limits, f, opt.min_level, opt.t_max, &r.evaluations);
    for (int level = opt.min_level + 1; level <= opt.max_level; ++level) {
        Eigen::VectorXcd cur = iterated_integral(dims, components, limits, f, level, opt.t_max, &r.evaluations);
        r.error = (cur - prev).cwiseAbs().maxCoeff();
        r.value = cur;
        r.level = level;
        const double scale = cur.cwiseAbs().maxCoeff();
        if (r.error <= std::max(opt.rel_tol * scale, opt.abs_tol)) {
            r.converged = true;
            return r;
        }
        prev = std::move(cur);
    }
    if (opt.max_level <= opt.min_level) {
        r.value = prev;
        r.level = opt.min_level;
    }
    return r;
}

std::vector<double> threshold_sums(const std::vector<double>& values, int max_terms) {
    std::set<double> sums{0.0};
    std::set<double> frontier{0.0};
    for (int t = 0; t < max_terms; ++t) {
        std::set<double> next;
        for (double s : frontier)
            for (double v : values) next.insert(s + v);
        sums.insert(next.begin(), next.end());
        frontier = std::move(next);
    }
    return {sums.begin(), sums.end()};
}

int worker_count() {
    if (const char* env = std::getenv("ALPHAREN_THREADS")) {
        int n = std::atoi(env);
        if (n > 0) return n;
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

} // namespace alpharen
