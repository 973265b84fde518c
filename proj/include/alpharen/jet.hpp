#pragma once

#include <Eigen/Core>

#include <cmath>
#include <complex>
#include <stdexcept>

namespace alpharen {

constexpr int kMaxJetOrder = 15;

/// Truncated Taylor series c_0 + c_1 t + ... + c_order t^order, used to
/// expand sector integrands around t = 0.
template <typename S>
class Jet {
public:
    using Storage = Eigen::Array<S, Eigen::Dynamic, 1, 0, kMaxJetOrder + 1, 1>;

    Jet() = default;
    Jet(int order, S value) : c_(Storage::Zero(check(order) + 1)) { c_[0] = value; }
    static Jet variable(int order, S x0, S dx) {
        Jet j(order, x0);
        if (order >= 1) j.c_[1] = dx;
        return j;
    }
    static Jet from(const Storage& c) {
        Jet j;
        j.c_ = c;
        return j;
    }

    int order() const { return static_cast<int>(c_.size()) - 1; }
    S operator[](int k) const { return c_[k]; }
    S& operator[](int k) { return c_[k]; }
    const Storage& coeffs() const { return c_; }

    template <typename T>
    Jet<T> cast() const {
        return Jet<T>::from(c_.template cast<T>());
    }

    Jet operator+(const Jet& o) const { return from(c_ + o.c_); }
    Jet operator-(const Jet& o) const { return from(c_ - o.c_); }
    Jet operator-() const { return from(-c_); }
    Jet operator+(S s) const {
        Jet r = *this;
        r.c_[0] += s;
        return r;
    }
    Jet operator*(S s) const { return from(c_ * s); }
    Jet& operator+=(const Jet& o) {
        c_ += o.c_;
        return *this;
    }
    Jet& operator*=(S s) {
        c_ *= s;
        return *this;
    }

    Jet operator*(const Jet& o) const {
        const int n = order();
        Jet r(n, S(0));
        for (int k = 0; k <= n; ++k) {
            S s(0);
            for (int i = 0; i <= k; ++i) s += c_[i] * o.c_[k - i];
            r.c_[k] = s;
        }
        return r;
    }

    Jet operator/(const Jet& o) const {
        if (o.c_[0] == S(0)) throw std::domain_error("jet division by a series vanishing at t = 0");
        const int n = order();
        Jet r(n, S(0));
        for (int k = 0; k <= n; ++k) {
            S s = c_[k];
            for (int i = 1; i <= k; ++i) s -= o.c_[i] * r.c_[k - i];
            r.c_[k] = s / o.c_[0];
        }
        return r;
    }

    /// Divide by t^k; the k lowest coefficients must be (numerically) zero.
    /// The top k coefficients of the result are unknown and returned as 0,
    /// so callers expand to order + k beforehand.
    Jet shift_down(int k) const {
        Jet r(order(), S(0));
        for (int i = k; i <= order(); ++i) r.c_[i - k] = c_[i];
        return r;
    }

    Jet truncated(int order) const { return from(c_.head(check(order) + 1)); }

    template <typename T>
    auto evaluate(T t) const {
        decltype(S() * T()) s(0);
        for (int k = order(); k >= 0; --k) s = s * t + c_[k];
        return s;
    }

private:
    static int check(int order) {
        if (order < 0 || order > kMaxJetOrder) throw std::invalid_argument("jet order out of range");
        return order;
    }
    Storage c_;
};

template <typename S>
Jet<S> exp(const Jet<S>& a) {
    using std::exp;
    const int n = a.order();
    Jet<S> r(n, exp(a[0]));
    for (int k = 1; k <= n; ++k) {
        S s(0);
        for (int i = 1; i <= k; ++i) s += static_cast<double>(i) * a[i] * r[k - i];
        r[k] = s / static_cast<double>(k);
    }
    return r;
}

template <typename S>
Jet<S> log(const Jet<S>& a) {
    using std::log;
    const int n = a.order();
    Jet<S> r(n, log(a[0]));
    for (int k = 1; k <= n; ++k) {
        S s = static_cast<double>(k) * a[k];
        for (int i = 1; i < k; ++i) s -= static_cast<double>(i) * r[i] * a[k - i];
        r[k] = s / (static_cast<double>(k) * a[0]);
    }
    return r;
}

/// a^e for a with a nonzero constant term, via the recurrence
/// a * (a^e)' = e * a' * a^e.
template <typename S, typename E>
auto pow(const Jet<S>& a, E e) {
    using R = decltype(S() * E());
    using std::pow;
    const int n = a.order();
    Jet<R> r(n, pow(R(a[0]), e));
    for (int k = 1; k <= n; ++k) {
        R s(0);
        for (int i = 1; i <= k; ++i) s += (e * static_cast<double>(i) - static_cast<double>(k - i)) * a[i] * r[k - i];
        r[k] = s / (static_cast<double>(k) * a[0]);
    }
    return r;
}

} // namespace alpharen
