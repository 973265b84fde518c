#include "alpharen/laurent.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>
#include <stdexcept>

namespace alpharen {

std::vector<cdouble> ZCircle::points() const {
    if (!(radius > 0) || samples < 1) throw std::invalid_argument("z circle needs a positive radius and sample count");
    std::vector<cdouble> z(samples);
    for (int j = 0; j < samples; ++j) z[j] = std::polar(radius, 2 * std::numbers::pi * j / samples);
    return z;
}

LaurentFit fit_laurent(const std::vector<cdouble>& z, const Eigen::VectorXcd& f, int kmin, int kmax) {
    const int n = static_cast<int>(z.size());
    if (n == 0 || f.size() != n) throw std::invalid_argument("fit_laurent: sample count mismatch");
    if (kmax < kmin || kmax - kmin + 1 > n) throw std::invalid_argument("fit_laurent: window wider than sample count");
    const double rho = std::abs(z[0]);
    for (int j = 0; j < n; ++j) {
        cdouble expect = z[0] * std::polar(1.0, 2 * std::numbers::pi * j / n);
        if (std::abs(z[j] - expect) > 1e-12 * rho)
            throw std::invalid_argument("fit_laurent: samples are not equally spaced on a circle");
    }
    Eigen::VectorXcd a(kmax - kmin + 1);
    // z_j^{-k} = rho^{-k} w^{-jk} with w the N-th root of unity; the phase
    // index is reduced mod N so no large powers are formed.
    const cdouble phase0 = z[0] / rho;
    for (int k = kmin; k <= kmax; ++k) {
        cdouble s = 0;
        for (int j = 0; j < n; ++j) {
            long idx = (static_cast<long>(j) * k) % n;
            if (idx < 0) idx += n;
            s += f[j] * std::polar(1.0, -2 * std::numbers::pi * idx / n);
        }
        a[k - kmin] = s * std::pow(phase0, -k) * std::pow(rho, -k) / static_cast<double>(n);
    }
    LaurentFit out;
    double fmax = 0;
    for (int j = 0; j < n; ++j) {
        cdouble refit = 0;
        for (int k = kmax; k >= kmin; --k) refit = refit * z[j] + a[k - kmin];
        refit *= std::pow(z[j], kmin);
        out.residual = std::max(out.residual, std::abs(refit - f[j]));
        fmax = std::max(fmax, std::abs(f[j]));
    }
    out.relative_residual = fmax > 0 ? out.residual / fmax : out.residual;
    out.series = LaurentC(kmin, a, kmax);
    return out;
}

std::string format_laurent(const LaurentC& s, int precision) {
    if (s.is_zero()) return "0";
    std::string out;
    char buf[128];
    for (int k = s.min_exp(); k <= s.max_exp(); ++k) {
        cdouble c = s[k];
        std::snprintf(buf, sizeof buf, "%s[z^%d] (%.*e, %.*e)", out.empty() ? "" : " ", k, precision, c.real(),
                      precision, c.imag());
        out += buf;
    }
    return out;
}

} // namespace alpharen
