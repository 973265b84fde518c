#pragma once

#include <Eigen/Dense>

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

namespace alpharen {

using cdouble = std::complex<double>;

enum class Scheme {
    Paper,  ///< T keeps the pole part and the constant term
    Minimal ///< T keeps only negative powers
};

/// Truncated bilateral series sum_k a_k z^k for k = min_exp .. min_exp+size-1.
/// Coefficients beyond `valid_through` are unknown; exact series carry
/// kExact there.
template <typename Scalar>
class Laurent {
public:
    using Coeffs = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
    static constexpr int kExact = std::numeric_limits<int>::max() / 4;

    Laurent() : min_exp_(0), valid_through_(kExact) {}
    Laurent(int min_exp, Coeffs c, int valid_through = kExact)
        : min_exp_(min_exp), c_(std::move(c)), valid_through_(valid_through) {
        normalize();
    }
    static Laurent constant(Scalar v) { return Laurent(0, Coeffs::Constant(1, v)); }
    static Laurent monomial(int k, Scalar v) { return Laurent(k, Coeffs::Constant(1, v)); }

    int min_exp() const { return min_exp_; }
    int max_exp() const { return min_exp_ + static_cast<int>(c_.size()) - 1; }
    int valid_through() const { return valid_through_; }
    bool is_zero() const { return c_.size() == 0; }
    const Coeffs& coeffs() const { return c_; }

    Scalar operator[](int k) const {
        if (k > valid_through_) throw std::out_of_range("Laurent coefficient beyond the truncation order");
        if (k < min_exp_ || k > max_exp()) return Scalar(0);
        return c_[k - min_exp_];
    }

    Laurent truncated(int through) const {
        Laurent r = *this;
        r.valid_through_ = std::min(valid_through_, through);
        r.normalize();
        return r;
    }

    /// Throws std::domain_error if one operand has no coefficient inside the
    /// common truncation window.
    Laurent operator+(const Laurent& o) const {
        int vt = std::min(valid_through_, o.valid_through_);
        if ((!is_zero() && min_exp_ > vt) || (!o.is_zero() && o.min_exp_ > vt))
            throw std::domain_error("Laurent sum: an operand lies entirely beyond the common truncation order");
        if (is_zero()) return o.truncated(vt);
        if (o.is_zero()) return truncated(vt);
        int lo = std::min(min_exp_, o.min_exp_);
        int hi = std::min(std::max(max_exp(), o.max_exp()), vt);
        if (hi < lo) return Laurent(lo, Coeffs(), vt);
        Coeffs c = Coeffs::Zero(hi - lo + 1);
        for (int k = lo; k <= hi; ++k) c[k - lo] = coef_or_zero(k) + o.coef_or_zero(k);
        return Laurent(lo, c, vt);
    }
    Laurent operator-() const { return Laurent(min_exp_, -c_, valid_through_); }
    Laurent operator-(const Laurent& o) const { return *this + (-o); }
    Laurent operator*(Scalar s) const { return Laurent(min_exp_, c_ * s, valid_through_); }

    /// Cauchy product. The result is known through the weakest order that
    /// both operands can support.
    Laurent operator*(const Laurent& o) const {
        // For a zero series the first unknown exponent plays the role of the
        // lowest exponent.
        auto emin = [](const Laurent& x) -> long {
            if (!x.is_zero()) return x.min_exp_;
            return x.valid_through_ >= kExact ? kExact : static_cast<long>(x.valid_through_) + 1;
        };
        long vt = std::min<long>(static_cast<long>(valid_through_) + emin(o),
                                 static_cast<long>(o.valid_through_) + emin(*this));
        vt = std::min<long>(vt, kExact);
        if (is_zero() || o.is_zero()) return Laurent(0, Coeffs(), static_cast<int>(vt));
        int lo = min_exp_ + o.min_exp_;
        if (vt < lo) throw std::domain_error("Laurent product has an empty truncation window");
        int hi = static_cast<int>(std::min<long>(max_exp() + o.max_exp(), vt));
        Coeffs c = Coeffs::Zero(hi - lo + 1);
        for (int i = 0; i < c_.size(); ++i)
            for (int j = 0; j < o.c_.size(); ++j) {
                int k = min_exp_ + i + o.min_exp_ + j;
                if (k <= hi) c[k - lo] += c_[i] * o.c_[j];
            }
        return Laurent(lo, c, static_cast<int>(vt));
    }

    template <typename Z>
    auto evaluate(Z z) const {
        using R = decltype(Scalar() * Z());
        R s(0);
        for (int i = static_cast<int>(c_.size()) - 1; i >= 0; --i) s = s * z + c_[i];
        return s * std::pow(z, min_exp_);
    }

    /// The subtraction operator T.
    Laurent pole_part(Scheme scheme = Scheme::Paper) const {
        int top = scheme == Scheme::Paper ? 0 : -1;
        if (is_zero() || min_exp_ > top) return Laurent(0, Coeffs(), kExact);
        if (top > valid_through_) throw std::domain_error("pole part needs coefficients the series does not know");
        int hi = std::min(top, max_exp());
        return Laurent(min_exp_, c_.head(hi - min_exp_ + 1), kExact);
    }

    /// Projection onto exponents >= lo.
    Laurent from(int lo) const {
        if (is_zero() || max_exp() < lo) return Laurent(0, Coeffs(), valid_through_);
        int start = std::max(lo, min_exp_);
        return Laurent(start, c_.segment(start - min_exp_, max_exp() - start + 1), valid_through_);
    }

private:
    Scalar coef_or_zero(int k) const {
        return (k < min_exp_ || k > max_exp()) ? Scalar(0) : c_[k - min_exp_];
    }
    void normalize() {
        int n = static_cast<int>(c_.size());
        if (max_exp() > valid_through_) n = std::max(0, valid_through_ - min_exp_ + 1);
        int start = 0;
        while (start < n && c_[start] == Scalar(0)) ++start;
        int end = n;
        while (end > start && c_[end - 1] == Scalar(0)) --end;
        Coeffs c = c_.segment(start, end - start);
        min_exp_ = end > start ? min_exp_ + start : 0;
        c_ = std::move(c);
    }

    int min_exp_;
    Coeffs c_;
    int valid_through_;
};

using LaurentC = Laurent<cdouble>;

/// Equally spaced sample points z_j = rho * exp(2 pi i j / N) on a circle.
struct ZCircle {
    double radius = 0.1;
    int samples = 32;
    std::vector<cdouble> points() const;
};

struct LaurentFit {
    LaurentC series;
    double residual = 0;          ///< max |f_j - refit(z_j)|
    double relative_residual = 0; ///< residual / max |f_j|
};

/// Discrete contour estimate a_k = (1/N) sum_j f_j z_j^{-k} for k in
/// [kmin, kmax]. Requires equally spaced points on one circle centred at 0
/// and N >= kmax - kmin + 1; throws std::invalid_argument otherwise.
LaurentFit fit_laurent(const std::vector<cdouble>& z, const Eigen::VectorXcd& f, int kmin, int kmax);

std::string format_laurent(const LaurentC& s, int precision = 12);

} // namespace alpharen
