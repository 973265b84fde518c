#include "doctest.h"
#include "oracles.hpp"

#include "alpharen/jet.hpp"
#include "alpharen/laurent.hpp"
#include "alpharen/special.hpp"

#include <random>

using namespace alpharen;

namespace {

LaurentC series(int lo, std::initializer_list<cdouble> c) {
    Eigen::VectorXcd v(c.size());
    int i = 0;
    for (auto x : c) v[i++] = x;
    return LaurentC(lo, v);
}

Eigen::VectorXcd sample(const std::vector<cdouble>& z, auto&& f) {
    Eigen::VectorXcd v(z.size());
    for (size_t j = 0; j < z.size(); ++j) v[j] = f(z[j]);
    return v;
}

} // namespace

TEST_CASE("Laurent arithmetic examples") {
    auto a = series(-1, {1.0});
    auto b = series(-1, {-1.0, 2.0});
    auto s = a + b;
    CHECK(s.min_exp() == 0);
    CHECK(s[0] == cdouble(2.0));
    CHECK(s[-1] == cdouble(0.0));

    auto p = series(-1, {1.0}) * series(1, {1.0});
    CHECK(p.min_exp() == 0);
    CHECK(p[0] == cdouble(1.0));

    auto q = (series(-1, {1.0, 1.0}) * series(-1, {1.0, -1.0})).truncated(0);
    CHECK(q.min_exp() == -2);
    CHECK(q[-2] == cdouble(1.0));
    CHECK(q[-1] == cdouble(0.0));
    CHECK(q[0] == cdouble(-1.0));
    CHECK(q.valid_through() == 0);

    // Inputs known through z^0 only determine the product through z^-1.
    auto tq = series(-1, {1.0, 1.0}).truncated(0) * series(-1, {1.0, -1.0}).truncated(0);
    CHECK(tq.valid_through() == -1);
    CHECK_THROWS_AS(tq[0], std::out_of_range);
}

TEST_CASE("Laurent product window") {
    auto x = series(-2, {1.0}).truncated(-2);
    auto y = series(0, {1.0, 2.0}).truncated(1);
    auto q = x * y;
    CHECK(q.valid_through() == -2);
    CHECK_THROWS_AS(series(-2, {1.0}).truncated(-2) + LaurentC::constant(5.0), std::domain_error);
}

TEST_CASE("pole part examples") {
    auto a = series(-2, {1.0, 3.0, 5.0, 2.0});
    auto t = a.pole_part(Scheme::Paper);
    CHECK(t.min_exp() == -2);
    CHECK(t.max_exp() == 0);
    CHECK(t[0] == cdouble(5.0));
    CHECK(series(1, {7.0, 1.0}).pole_part().is_zero());
    CHECK(LaurentC::constant(4.0).pole_part(Scheme::Paper)[0] == cdouble(4.0));
    CHECK(LaurentC::constant(4.0).pole_part(Scheme::Minimal).is_zero());
}

TEST_CASE("projector laws") {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-1, 1);
    for (int trial = 0; trial < 50; ++trial) {
        int lo = -3 + static_cast<int>(rng() % 4);
        Eigen::VectorXcd c(5);
        for (int i = 0; i < 5; ++i) c[i] = cdouble(u(rng), u(rng));
        LaurentC a(lo, c);
        for (auto sch : {Scheme::Paper, Scheme::Minimal}) {
            auto T = [&](const LaurentC& x) { return x.pole_part(sch); };
            auto one_minus_T = [&](const LaurentC& x) { return x - T(x); };
            CHECK((T(T(a)) - T(a)).is_zero());
            CHECK((one_minus_T(one_minus_T(a)) - one_minus_T(a)).is_zero());
        }
    }
}

TEST_CASE("fit of 1/z") {
    auto z = ZCircle{0.1, 16}.points();
    auto fit = fit_laurent(z, sample(z, [](cdouble w) { return 1.0 / w; }), -2, 5);
    for (int k = -2; k <= 2; ++k) CHECK(std::abs(fit.series[k] - (k == -1 ? 1.0 : 0.0)) < 1e-12);
    // Higher coefficients are only determined to eps * max|f| / rho^k.
    for (int k = 3; k <= 5; ++k) CHECK(std::abs(fit.series[k]) * std::pow(0.1, k) < 1e-12 * 10);
}

TEST_CASE("fit of a constant") {
    auto z = ZCircle{0.1, 32}.points();
    auto fit = fit_laurent(z, sample(z, [](cdouble) { return cdouble(2.5, -1.0); }), -4, 20);
    CHECK(std::abs(fit.series[0] - cdouble(2.5, -1.0)) < 1e-14);
    for (int k = -4; k <= 20; ++k)
        if (k != 0) CHECK(std::abs(fit.series[k]) * std::pow(0.1, k) < 1e-12 * 2.7);
}

TEST_CASE("fit of Gamma(z) against the series oracle") {
    auto z = ZCircle{0.1, 32}.points();
    auto f = sample(z, [](cdouble w) { return gamma_c(w); });
    auto fit = fit_laurent(z, f, -1, 20);
    CHECK(std::abs(fit.series[-1] - 1.0) < 1e-12);
    CHECK(std::abs(fit.series[0] + oracle::kEulerGamma) < 1e-12);
    // Coefficient of z in Gamma(z): (gamma^2 + pi^2/6) / 2.
    double c1 = 0.5 * (oracle::kEulerGamma * oracle::kEulerGamma + oracle::kPi * oracle::kPi / 6);
    CHECK(std::abs(fit.series[1] - c1) < 1e-11);
    CHECK(fit.relative_residual < 1e-13);
}

TEST_CASE("fit is exact on Laurent polynomials inside the window") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-1, 1);
    auto z = ZCircle{0.1, 32}.points();
    for (int trial = 0; trial < 20; ++trial) {
        int lo = -4 + static_cast<int>(rng() % 3);
        Eigen::VectorXcd c(6);
        for (int i = 0; i < 6; ++i) c[i] = cdouble(u(rng), u(rng));
        LaurentC p(lo, c);
        auto fit = fit_laurent(z, sample(z, [&](cdouble w) { return p.evaluate(w); }), -4, 20);
        double fmax = 0;
        for (auto w : z) fmax = std::max(fmax, std::abs(p.evaluate(w)));
        // Exact up to rounding on the circle: errors scaled by rho^k stay at
        // machine precision relative to the sampled values.
        for (int k = -4; k <= 20; ++k)
            CHECK(std::abs(fit.series[k] - p[k]) * std::pow(0.1, k) <= 1e-12 * fmax);
    }
}

TEST_CASE("fitted series reproduces the function inside the circle") {
    auto z = ZCircle{0.1, 32}.points();
    auto g = [](cdouble w) { return gamma_c(w) * gamma_c(2.0 * w) / gamma_c(1.0 + w); };
    auto fit = fit_laurent(z, sample(z, g), -2, 25);
    for (int j = 0; j < 7; ++j) {
        cdouble w = std::polar(0.05, 0.3 + j);
        cdouble diff = fit.series.evaluate(w) - g(w);
        CHECK(std::abs(diff) <= std::max(fit.residual, 1e-12 * std::abs(g(w))));
    }
}

TEST_CASE("fit rejects bad sample sets") {
    auto z = ZCircle{0.1, 8}.points();
    Eigen::VectorXcd f = Eigen::VectorXcd::Ones(8);
    CHECK_THROWS_AS(fit_laurent(z, f, -5, 5), std::invalid_argument);
    z[3] *= 1.01;
    CHECK_THROWS_AS(fit_laurent(z, f, 0, 2), std::invalid_argument);
}

TEST_CASE("complex Gamma against independent references") {
    for (double x : {0.3, 1.0, 2.5, 4.0}) CHECK(std::abs(gamma_c(x) - std::tgamma(x)) < 1e-13 * std::tgamma(x));
    for (int j = 0; j < 8; ++j) {
        cdouble w = std::polar(0.15, 0.7 * j);
        CHECK(std::abs(gamma_c(1.0 + w) - oracle::gamma1p(w)) < 1e-13);
        CHECK(std::abs(gamma_c(w - 1.0) - oracle::gamma1p(w) / (w * (w - 1.0))) < 1e-12 * std::abs(gamma_c(w - 1.0)));
    }
    CHECK_THROWS_AS(gamma_c(-2.0), std::domain_error);
}

TEST_CASE("jet arithmetic against closed forms") {
    const int n = 8;
    auto t = Jet<double>::variable(n, 0.0, 1.0);
    auto one_plus = t + 1.0;
    auto e = exp(t * 0.5);
    auto l = log(one_plus);
    auto p = pow(one_plus, -2.0);
    auto pc = pow(one_plus, cdouble(0.3, 0.2));
    double fact = 1;
    cdouble binom = 1;
    for (int k = 0; k <= n; ++k) {
        if (k) fact *= k;
        CHECK(e[k] == doctest::Approx(std::pow(0.5, k) / fact).epsilon(1e-14));
        if (k) CHECK(l[k] == doctest::Approx(((k % 2) ? 1.0 : -1.0) / k).epsilon(1e-14));
        CHECK(p[k] == doctest::Approx(((k % 2) ? -1.0 : 1.0) * (k + 1)).epsilon(1e-14));
        CHECK(std::abs(pc[k] - binom) < 1e-14);
        binom *= (cdouble(0.3, 0.2) - static_cast<double>(k)) / static_cast<double>(k + 1);
    }
    auto q = (t * t + t * 3.0 + 2.0) / (t + 1.0);
    CHECK(q[0] == doctest::Approx(2.0));
    CHECK(q[1] == doctest::Approx(1.0));
    for (int k = 2; k <= n; ++k) CHECK(std::abs(q[k]) < 1e-14);
    auto sh = (t * t * 3.0 + t * t * t).shift_down(2);
    CHECK(sh[0] == doctest::Approx(3.0));
    CHECK(sh[1] == doctest::Approx(1.0));
    CHECK(e.evaluate(0.1) == doctest::Approx(std::exp(0.05)).epsilon(1e-12));
}
