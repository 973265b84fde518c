#pragma once
// Reference values computed independently of the library.

#include <cmath>
#include <complex>

namespace oracle {

using cd = std::complex<double>;
constexpr double kEulerGamma = 0.57721566490153286060651209;
constexpr double kPi = 3.14159265358979323846;

/// Riemann zeta for integer k >= 2: direct sum plus Euler-Maclaurin tail.
inline double zeta(int k) {
    const int n = 50;
    double s = 0;
    for (int i = 1; i < n; ++i) s += std::pow(static_cast<double>(i), -k);
    double N = n;
    s += std::pow(N, 1 - k) / (k - 1) + 0.5 * std::pow(N, -k) + k / 12.0 * std::pow(N, -k - 1) -
         k * (k + 1.0) * (k + 2.0) / 720.0 * std::pow(N, -k - 3);
    return s;
}

/// Gamma(1 + w) for |w| < 1 from log Gamma(1+w) = -gamma w + sum (-1)^k zeta(k) w^k / k.
inline cd gamma1p(cd w) {
    cd s = -kEulerGamma * w;
    cd wk = w;
    for (int k = 2; k <= 60; ++k) {
        wk *= w;
        s += ((k % 2) ? -1.0 : 1.0) * zeta(k) * wk / static_cast<double>(k);
    }
    return std::exp(s);
}

/// Tadpole: pi^2 m^{2-2z} Gamma(z-1), with Gamma(z-1) = Gamma(1+z) / (z (z-1)).
inline cd tadpole(cd z, double m) {
    return kPi * kPi * std::pow(m, 2.0 - 2.0 * z) * gamma1p(z) / (z * (z - 1.0));
}

/// Bubble at p = 0: pi^2 m^{-4z} Gamma(1+z)^2 Gamma(2z) / Gamma(2+2z).
inline cd bubble(cd z, double m) {
    cd g1 = gamma1p(z);
    // Gamma(2z)/Gamma(2+2z) = 1 / (2z (1+2z)).
    return kPi * kPi * std::pow(m, -4.0 * z) * g1 * g1 / (2.0 * z * (1.0 + 2.0 * z));
}

} // namespace oracle
