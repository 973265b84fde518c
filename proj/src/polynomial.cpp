#include "alpharen/polynomial.hpp"

#include "alpharen/errors.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <set>
#include <variant>

namespace alpharen {

namespace {

constexpr double kPruneRel = 1e-13;

DotMonomial normalized(DotMonomial m) {
    for (auto& d : m.dots)
        if (d.second < d.first) std::swap(d.first, d.second);
    std::sort(m.dots.begin(), m.dots.end());
    return m;
}

std::string format_number(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

DotPolynomial DotPolynomial::constant(double c) {
    DotPolynomial p;
    p.add_term({}, c);
    return p;
}

DotPolynomial DotPolynomial::m2() {
    DotPolynomial p;
    DotMonomial m;
    m.m2_power = 1;
    p.add_term(m, 1.0);
    return p;
}

DotPolynomial DotPolynomial::dot_product(const LinearMomentum& a, const LinearMomentum& b) {
    DotPolynomial p;
    for (const auto& [sa, ca] : a)
        for (const auto& [sb, cb] : b) {
            DotMonomial m;
            m.dots.emplace_back(sa, sb);
            p.terms_[normalized(m)] += ca * cb;
        }
    p.prune();
    return p;
}

bool DotPolynomial::is_constant() const {
    return std::all_of(terms_.begin(), terms_.end(), [](const auto& t) { return t.first.dots.empty(); });
}

double DotPolynomial::constant_value(double m2_value) const {
    double s = 0;
    for (const auto& [m, c] : terms_) s += c * std::pow(m2_value, m.m2_power);
    return s;
}

int DotPolynomial::degree() const {
    int d = 0;
    for (const auto& t : terms_) d = std::max(d, t.first.momentum_degree());
    return d;
}

bool DotPolynomial::is_homogeneous() const {
    std::set<int> ds;
    for (const auto& t : terms_) ds.insert(t.first.momentum_degree());
    return ds.size() <= 1;
}

void DotPolynomial::add_term(const DotMonomial& mono, double coeff) {
    if (coeff == 0) return;
    terms_[normalized(mono)] += coeff;
    prune();
}

void DotPolynomial::prune() {
    double scale = 0;
    for (const auto& t : terms_) scale = std::max(scale, std::abs(t.second));
    for (auto it = terms_.begin(); it != terms_.end();) {
        if (std::abs(it->second) <= kPruneRel * scale || it->second == 0)
            it = terms_.erase(it);
        else
            ++it;
    }
}

DotPolynomial DotPolynomial::operator+(const DotPolynomial& o) const {
    DotPolynomial r = *this;
    for (const auto& [m, c] : o.terms_) r.terms_[m] += c;
    r.prune();
    return r;
}

DotPolynomial DotPolynomial::operator-(const DotPolynomial& o) const { return *this + o * -1.0; }

DotPolynomial DotPolynomial::operator*(const DotPolynomial& o) const {
    DotPolynomial r;
    for (const auto& [ma, ca] : terms_)
        for (const auto& [mb, cb] : o.terms_) {
            DotMonomial m;
            m.m2_power = ma.m2_power + mb.m2_power;
            m.dots = ma.dots;
            m.dots.insert(m.dots.end(), mb.dots.begin(), mb.dots.end());
            r.terms_[normalized(m)] += ca * cb;
        }
    r.prune();
    return r;
}

DotPolynomial DotPolynomial::operator*(double s) const {
    DotPolynomial r;
    if (s == 0) return r;
    for (const auto& [m, c] : terms_) r.terms_[m] = c * s;
    return r;
}

DotPolynomial DotPolynomial::substitute(const std::string& sym, const LinearMomentum& repl) const {
    DotPolynomial result;
    for (const auto& [mono, coeff] : terms_) {
        DotMonomial base;
        base.m2_power = mono.m2_power;
        DotPolynomial acc = DotPolynomial::constant(coeff);
        for (const auto& [a, b] : mono.dots) {
            if (a != sym && b != sym) {
                base.dots.emplace_back(a, b);
                continue;
            }
            LinearMomentum la{{a, 1.0}}, lb{{b, 1.0}};
            if (a == sym) la = repl;
            if (b == sym) lb = repl;
            acc = acc * dot_product(la, lb);
        }
        DotPolynomial basepoly;
        basepoly.terms_[normalized(base)] = 1.0;
        result = result + acc * basepoly;
    }
    result.prune();
    return result;
}

DotPolynomial DotPolynomial::rename(const std::map<std::string, std::string>& names) const {
    DotPolynomial r;
    auto nm = [&](const std::string& s) {
        auto it = names.find(s);
        return it == names.end() ? s : it->second;
    };
    for (const auto& [mono, coeff] : terms_) {
        DotMonomial m = mono;
        for (auto& d : m.dots) d = {nm(d.first), nm(d.second)};
        r.terms_[normalized(m)] += coeff;
    }
    r.prune();
    return r;
}

std::vector<std::string> DotPolynomial::symbols() const {
    std::set<std::string> s;
    for (const auto& t : terms_)
        for (const auto& d : t.first.dots) {
            s.insert(d.first);
            s.insert(d.second);
        }
    return {s.begin(), s.end()};
}

double DotPolynomial::evaluate(const std::function<Vec4(const std::string&)>& momentum, double m2_value) const {
    std::map<std::string, Vec4> cache;
    auto get = [&](const std::string& s) -> const Vec4& {
        auto it = cache.find(s);
        if (it == cache.end()) it = cache.emplace(s, momentum(s)).first;
        return it->second;
    };
    double sum = 0;
    for (const auto& [mono, coeff] : terms_) {
        double v = coeff * std::pow(m2_value, mono.m2_power);
        for (const auto& [a, b] : mono.dots) v *= dot(get(a), get(b));
        sum += v;
    }
    return sum;
}

std::string DotPolynomial::to_string() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& [mono, coeff] : terms_) {
        std::vector<std::string> factors;
        bool unit = std::abs(coeff) == 1.0;
        if (!unit || (mono.dots.empty() && mono.m2_power == 0)) factors.push_back(format_number(std::abs(coeff)));
        for (int k = 0; k < mono.m2_power; ++k) factors.push_back("m2");
        for (const auto& [a, b] : mono.dots) factors.push_back("p_" + a + ".p_" + b);
        std::string term;
        for (size_t i = 0; i < factors.size(); ++i) term += (i ? "*" : "") + factors[i];
        if (first)
            out = (coeff < 0 ? "-" : "") + term;
        else
            out += (coeff < 0 ? " - " : " + ") + term;
        first = false;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

struct Value {
    // Either a scalar polynomial, or a vector (linear combination of momenta
    // scaled by a constant scalar polynomial factor).
    bool is_vector = false;
    DotPolynomial scalar;
    LinearMomentum vec;
};

class Parser {
public:
    explicit Parser(const std::string& s) : s_(s) {}

    DotPolynomial parse() {
        skip();
        if (pos_ == s_.size()) return DotPolynomial::constant(1.0);
        Value v = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
        if (v.is_vector) fail("expression is a vector, not a scalar");
        return v.scalar;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw ParseError("polynomial '" + s_ + "' at column " + std::to_string(pos_ + 1) + ": " + msg);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool accept(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    static Value scalar(DotPolynomial p) {
        Value v;
        v.scalar = std::move(p);
        return v;
    }

    Value add(const Value& a, const Value& b, double sign) {
        if (a.is_vector != b.is_vector) fail("cannot add a vector and a scalar");
        if (!a.is_vector) return scalar(a.scalar + b.scalar * sign);
        Value r = a;
        for (const auto& [k, c] : b.vec) r.vec[k] += sign * c;
        for (auto it = r.vec.begin(); it != r.vec.end();) it = it->second == 0 ? r.vec.erase(it) : std::next(it);
        return r;
    }

    Value sum() {
        skip();
        double sign = 1;
        if (accept('-')) sign = -1;
        else accept('+');
        Value acc = product();
        if (sign < 0) acc = add(acc.is_vector ? Value{true, {}, {}} : scalar({}), acc, -1);
        while (true) {
            if (accept('+')) acc = add(acc, product(), 1);
            else if (accept('-')) acc = add(acc, product(), -1);
            else break;
        }
        return acc;
    }

    // A product may contain at most two vector factors, which pair into a dot.
    Value product() {
        DotPolynomial coeff = DotPolynomial::constant(1.0);
        std::vector<LinearMomentum> vecs;
        auto absorb = [&](const Value& v) {
            if (v.is_vector) {
                vecs.push_back(v.vec);
                if (vecs.size() == 2) {
                    coeff = coeff * DotPolynomial::dot_product(vecs[0], vecs[1]);
                    vecs.clear();
                }
            } else {
                coeff = coeff * v.scalar;
            }
        };
        absorb(dotted());
        while (accept('*')) absorb(dotted());
        if (vecs.empty()) return scalar(coeff);
        if (!coeff.is_constant() || coeff.terms().size() > 1)
            fail("a vector may only be scaled by a number");
        double c = coeff.is_zero() ? 0.0 : coeff.constant_value(0.0);
        if (!coeff.is_zero() && coeff.terms().begin()->first.m2_power != 0)
            fail("a vector may only be scaled by a number");
        Value v;
        v.is_vector = true;
        for (const auto& [k, x] : vecs[0])
            if (x * c != 0) v.vec[k] = x * c;
        return v;
    }

    Value dotted() {
        Value a = primary();
        while (accept('.')) {
            Value b = primary();
            if (!a.is_vector || !b.is_vector) fail("'.' needs vectors on both sides");
            a = scalar(DotPolynomial::dot_product(a.vec, b.vec));
        }
        return a;
    }

    Value primary() {
        skip();
        if (pos_ >= s_.size()) fail("unexpected end of expression");
        char c = s_[pos_];
        if (c == '(') {
            ++pos_;
            Value v = sum();
            if (!accept(')')) fail("missing ')'");
            return v;
        }
        if (std::isdigit(static_cast<unsigned char>(c)) || (c == '.' && pos_ + 1 < s_.size() &&
                                                            std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))) {
            size_t start = pos_;
            while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) {
                // A '.' followed by 'p' is a dot product, not a decimal point.
                if (s_[pos_] == '.' && pos_ + 1 < s_.size() && !std::isdigit(static_cast<unsigned char>(s_[pos_ + 1])))
                    break;
                ++pos_;
            }
            if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
                size_t save = pos_++;
                if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
                if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
                    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
                } else {
                    pos_ = save;
                }
            }
            std::string num = s_.substr(start, pos_ - start);
            char* end = nullptr;
            double v = std::strtod(num.c_str(), &end);
            if (end != num.c_str() + num.size()) fail("bad number '" + num + "'");
            return scalar(DotPolynomial::constant(v));
        }
        if (s_.compare(pos_, 2, "m2") == 0 && !ident_char(pos_ + 2)) {
            pos_ += 2;
            return scalar(DotPolynomial::m2());
        }
        if (s_.compare(pos_, 2, "p_") == 0) {
            pos_ += 2;
            size_t start = pos_;
            while (ident_char(pos_)) ++pos_;
            if (pos_ == start) fail("empty momentum identifier");
            Value v;
            v.is_vector = true;
            v.vec[s_.substr(start, pos_ - start)] = 1.0;
            return v;
        }
        fail("unexpected '" + std::string(1, c) + "'");
    }

    bool ident_char(size_t i) const {
        if (i >= s_.size()) return false;
        char c = s_[i];
        return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == ':';
    }

    const std::string& s_;
    size_t pos_ = 0;
};

} // namespace

DotPolynomial parse_polynomial(const std::string& text) { return Parser(text).parse(); }

} // namespace alpharen
