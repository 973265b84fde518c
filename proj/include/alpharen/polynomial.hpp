#pragma once

#include <array>
#include <functional>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace alpharen {

using Vec4 = std::array<double, 4>;

inline double dot(const Vec4& a, const Vec4& b) {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2] + a[3] * b[3];
}

/// Linear combination of momentum symbols, e.g. p_a - p_b.
using LinearMomentum = std::map<std::string, double>;

/// One monomial: m2^k times a product of dot products p_a.p_b (a <= b, sorted).
struct DotMonomial {
    int m2_power = 0;
    std::vector<std::pair<std::string, std::string>> dots;

    int momentum_degree() const { return 2 * static_cast<int>(dots.size()); }
    auto operator<=>(const DotMonomial&) const = default;
};

/// Scalar polynomial in 4-momenta, written through Lorentz invariants only.
class DotPolynomial {
public:
    DotPolynomial() = default;
    static DotPolynomial constant(double c);
    static DotPolynomial m2();
    static DotPolynomial dot_product(const LinearMomentum& a, const LinearMomentum& b);

    const std::map<DotMonomial, double>& terms() const { return terms_; }
    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const;
    /// Value of a constant polynomial; m2 is replaced by `m2_value`.
    double constant_value(double m2_value) const;
    /// Highest momentum degree among the terms (0 for the zero polynomial).
    int degree() const;
    /// True if every term has the same momentum degree.
    bool is_homogeneous() const;

    void add_term(const DotMonomial& mono, double coeff);
    DotPolynomial operator+(const DotPolynomial& o) const;
    DotPolynomial operator-(const DotPolynomial& o) const;
    DotPolynomial operator*(const DotPolynomial& o) const;
    DotPolynomial operator*(double s) const;
    bool operator==(const DotPolynomial& o) const { return terms_ == o.terms_; }

    /// Replace a symbol by a linear combination of symbols and re-expand.
    DotPolynomial substitute(const std::string& sym, const LinearMomentum& repl) const;
    /// Rename symbols (symbols absent from the map are kept).
    DotPolynomial rename(const std::map<std::string, std::string>& names) const;
    /// Symbols appearing in any dot product.
    std::vector<std::string> symbols() const;

    double evaluate(const std::function<Vec4(const std::string&)>& momentum, double m2_value) const;

    /// Canonical text, parseable by parse_polynomial.
    std::string to_string() const;

private:
    void prune();
    std::map<DotMonomial, double> terms_;
};

/// Parse an expression in the vertex-operator grammar: numbers, `m2`, `p_<id>`,
/// `a.b` dot products, `+`, `-`, `*` and parentheses. Two bare vector factors in
/// one product pair into a dot product. Throws ParseError.
DotPolynomial parse_polynomial(const std::string& text);

} // namespace alpharen
