#include "doctest.h"

#include "alpharen/quadrature.hpp"

#include <cmath>
#include <numbers>

using namespace alpharen;

namespace {

LimitsFn box(double lo, double hi, std::vector<double> br = {}) {
    return [=](int, const std::vector<NodePoint>&, double& l, double& h, std::vector<double>& b) {
        l = lo;
        h = hi;
        b = br;
    };
}

} // namespace

TEST_CASE("tanh-sinh rule integrates endpoint singularities") {
    auto f = [](double a) {
        return [a](const std::vector<NodePoint>& p, double w, Eigen::VectorXcd& acc) {
            acc[0] += w * std::pow(p[0].from_lo, a);
        };
    };
    // Truncation at t_max cuts off int_0^eps x^a, so strong singularities need a wider rule.
    for (double a : {0.0, 0.5, -0.1, -0.5, -0.9, 3.0}) {
        auto r = adaptive_integral(1, 1, box(0, 1), f(a), {1e-9, 0, 3, 9, a < -0.6 ? 5.0 : 3.5});
        CHECK(r.converged);
        CHECK(std::abs(r.value[0] - 1 / (a + 1)) < 1e-10 / (a + 1));
    }
    // The complement is exact near the upper end: int_0^1 (1-x)^{-0.9} = 10.
    auto g = [](const std::vector<NodePoint>& p, double w, Eigen::VectorXcd& acc) {
        acc[0] += w * std::pow(p[0].to_hi, -0.9);
    };
    auto r = adaptive_integral(1, 1, box(0, 1), g, {1e-11, 0, 3, 10, 5.0});
    CHECK(std::abs(r.value[0] - 10.0) < 1e-8);
}

TEST_CASE("breakpoints restore fast convergence across a kink") {
    auto f = [](const std::vector<NodePoint>& p, double w, Eigen::VectorXcd& acc) {
        acc[0] += w * std::abs(p[0].x - 0.3) * std::abs(p[0].x - 0.3) * std::abs(p[0].x - 0.3);
    };
    const double exact = (std::pow(0.3, 4) + std::pow(0.7, 4)) / 4;
    auto with = adaptive_integral(1, 1, box(0, 1, {0.3}), f, {1e-13, 0, 2, 8});
    CHECK(with.converged);
    CHECK(std::abs(with.value[0] - exact) < 1e-13);
    auto without = iterated_integral(1, 1, box(0, 1), f, 5, 3.5);
    CHECK(std::abs(without[0] - exact) > 1e-12);
}

TEST_CASE("iterated integral over the triangle with accurate remainders") {
    // int over x+y<=1 of x^a y^b (1-x-y)^c = a! b! c! / (a+b+c+2)!
    LimitsFn tri = [](int k, const std::vector<NodePoint>& p, double& lo, double& hi, std::vector<double>&) {
        lo = 0;
        hi = k == 0 ? 1.0 : p[0].to_hi;
    };
    auto f = [](const std::vector<NodePoint>& p, double w, Eigen::VectorXcd& acc) {
        const double x = p[0].x, y = p[1].x, rest = p[1].to_hi;
        acc[0] += w * x * y * y * rest;
        acc[1] += w * std::pow(x * y * rest, -0.5);
    };
    auto r = adaptive_integral(2, 2, tri, f, {1e-11, 0, 3, 8});
    CHECK(r.converged);
    CHECK(std::abs(r.value[0] - 2.0 / 720.0) < 1e-13);
    // Dirichlet: Gamma(1/2)^3 / Gamma(3/2) = 2 pi.
    CHECK(std::abs(r.value[1] - 2 * std::numbers::pi) < 1e-8);
}

TEST_CASE("Gauss-Legendre exactness") {
    auto [x, w] = gauss_legendre(6);
    for (int k = 0; k <= 11; ++k) {
        double s = 0;
        for (int i = 0; i < 6; ++i) s += w[i] * std::pow(x[i], k);
        CHECK(s == doctest::Approx(k % 2 ? 0.0 : 2.0 / (k + 1)).epsilon(1e-13));
    }
}

TEST_CASE("threshold sums") {
    auto s = threshold_sums({0.1, 0.2}, 2);
    std::vector<double> expect{0.0, 0.1, 0.2, 0.1 + 0.1, 0.1 + 0.2, 0.2 + 0.2};
    std::sort(expect.begin(), expect.end());
    expect.erase(std::unique(expect.begin(), expect.end()), expect.end());
    CHECK(s == expect);
}

TEST_CASE("parallel_map keeps index order and rethrows the first failure") {
    std::function<int(size_t)> sq = [](size_t i) { return static_cast<int>(i * i); };
    auto v = parallel_map<int>(50, sq);
    for (size_t i = 0; i < v.size(); ++i) CHECK(v[i] == static_cast<int>(i * i));
    std::function<int(size_t)> bad = [](size_t i) -> int {
        if (i == 7 || i == 30) throw std::runtime_error("fail " + std::to_string(i));
        return 0;
    };
    CHECK_THROWS_WITH(parallel_map<int>(40, bad), "fail 7");
}
