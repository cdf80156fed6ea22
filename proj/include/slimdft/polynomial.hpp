#pragma once

#include "slimdft/rational.hpp"

#include <algorithm>
#include <cassert>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace slimdft {

/// Parameter names; a variable's index in this list is its index in every
/// exponent vector.
using ParameterList = std::vector<std::string>;

/// Exponent vector with trailing zeros trimmed, so that monomials over
/// different parameter-list lengths compare consistently.
using Monomial = std::vector<std::uint32_t>;

namespace detail {

inline std::uint32_t exponentAt(const Monomial& m, std::size_t i) { return i < m.size() ? m[i] : 0; }

inline std::uint64_t totalDegree(const Monomial& m) {
    std::uint64_t d = 0;
    for (auto e : m) {
        d += e;
    }
    return d;
}

inline void trim(Monomial& m) {
    while (!m.empty() && m.back() == 0) {
        m.pop_back();
    }
}

/// Graded lexicographic order, variable 0 most significant.
inline bool grlexLess(const Monomial& a, const Monomial& b) {
    auto da = totalDegree(a);
    auto db = totalDegree(b);
    if (da != db) {
        return da < db;
    }
    std::size_t n = std::max(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto ea = exponentAt(a, i);
        auto eb = exponentAt(b, i);
        if (ea != eb) {
            return ea < eb;
        }
    }
    return false;
}

struct GrlexGreater {
    bool operator()(const Monomial& a, const Monomial& b) const { return grlexLess(b, a); }
};

inline Monomial multiply(const Monomial& a, const Monomial& b) {
    Monomial r(std::max(a.size(), b.size()), 0);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = exponentAt(a, i) + exponentAt(b, i);
    }
    return r;
}

inline bool divides(const Monomial& d, const Monomial& m) {
    if (d.size() > m.size()) {
        return false;
    }
    for (std::size_t i = 0; i < d.size(); ++i) {
        if (d[i] > m[i]) {
            return false;
        }
    }
    return true;
}

inline Monomial quotient(const Monomial& m, const Monomial& d) {
    Monomial r(m);
    for (std::size_t i = 0; i < d.size(); ++i) {
        r[i] -= d[i];
    }
    trim(r);
    return r;
}

} // namespace detail

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are kept in descending graded lexicographic order and zero
/// coefficients are never stored, so structural equality is polynomial
/// equality.
class Polynomial {
public:
    struct Term {
        Monomial exponents;
        Rational coefficient;

        bool operator==(const Term&) const = default;
    };

    Polynomial() = default;

    Polynomial(const Rational& constant) {
        if (constant != 0) {
            terms_.push_back({Monomial{}, constant});
        }
    }

    Polynomial(long constant) : Polynomial(Rational(constant)) {}

    static Polynomial variable(std::size_t index) {
        Monomial m(index + 1, 0);
        m[index] = 1;
        Polynomial p;
        p.terms_.push_back({std::move(m), Rational(1)});
        return p;
    }

    static Polynomial fromTerms(std::vector<Term> terms) {
        std::map<Monomial, Rational, detail::GrlexGreater> acc;
        for (auto& t : terms) {
            detail::trim(t.exponents);
            acc[t.exponents] += t.coefficient;
        }
        return fromMap(acc);
    }

    const std::vector<Term>& terms() const { return terms_; }

    bool isZero() const { return terms_.empty(); }

    bool isConstant() const { return terms_.empty() || (terms_.size() == 1 && terms_[0].exponents.empty()); }

    bool isOne() const { return isConstant() && !terms_.empty() && terms_[0].coefficient == 1; }

    Rational constantTerm() const {
        if (!terms_.empty() && terms_.back().exponents.empty()) {
            return terms_.back().coefficient;
        }
        return Rational(0);
    }

    /// Value of a constant polynomial.
    Rational constant() const {
        assert(isConstant());
        return terms_.empty() ? Rational(0) : terms_[0].coefficient;
    }

    const Term& leadingTerm() const {
        assert(!isZero());
        return terms_.front();
    }

    std::uint64_t totalDegree() const {
        std::uint64_t d = 0;
        for (const auto& t : terms_) {
            d = std::max(d, detail::totalDegree(t.exponents));
        }
        return d;
    }

    std::uint32_t degreeIn(std::size_t var) const {
        std::uint32_t d = 0;
        for (const auto& t : terms_) {
            d = std::max(d, detail::exponentAt(t.exponents, var));
        }
        return d;
    }

    /// Indices of variables with a nonzero exponent in some term.
    std::set<std::size_t> variables() const {
        std::set<std::size_t> vars;
        for (const auto& t : terms_) {
            for (std::size_t i = 0; i < t.exponents.size(); ++i) {
                if (t.exponents[i] != 0) {
                    vars.insert(i);
                }
            }
        }
        return vars;
    }

    std::size_t variableCount() const {
        std::size_t n = 0;
        for (const auto& t : terms_) {
            n = std::max(n, t.exponents.size());
        }
        return n;
    }

    Polynomial operator-() const {
        Polynomial r(*this);
        for (auto& t : r.terms_) {
            t.coefficient = -t.coefficient;
        }
        return r;
    }

    friend Polynomial operator+(const Polynomial& a, const Polynomial& b) { return combine(a, b, false); }
    friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return combine(a, b, true); }

    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.isZero() || b.isZero()) {
            return Polynomial();
        }
        if (b.isConstant()) {
            return a.scaled(b.constant());
        }
        if (a.isConstant()) {
            return b.scaled(a.constant());
        }
        std::map<Monomial, Rational, detail::GrlexGreater> acc;
        for (const auto& ta : a.terms_) {
            for (const auto& tb : b.terms_) {
                acc[detail::multiply(ta.exponents, tb.exponents)] += ta.coefficient * tb.coefficient;
            }
        }
        return fromMap(acc);
    }

    Polynomial& operator+=(const Polynomial& o) { return *this = *this + o; }
    Polynomial& operator-=(const Polynomial& o) { return *this = *this - o; }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }

    Polynomial scaled(const Rational& factor) const {
        if (factor == 0) {
            return Polynomial();
        }
        Polynomial r(*this);
        for (auto& t : r.terms_) {
            t.coefficient *= factor;
        }
        return r;
    }

    Polynomial pow(unsigned exponent) const {
        Polynomial result(1);
        Polynomial base(*this);
        while (exponent > 0) {
            if (exponent & 1u) {
                result *= base;
            }
            exponent >>= 1u;
            if (exponent > 0) {
                base *= base;
            }
        }
        return result;
    }

    bool operator==(const Polynomial& o) const { return terms_ == o.terms_; }

    /// Formal partial derivative with respect to variable `var`.
    Polynomial derivative(std::size_t var) const {
        std::vector<Term> out;
        for (const auto& t : terms_) {
            auto e = detail::exponentAt(t.exponents, var);
            if (e == 0) {
                continue;
            }
            Term d{t.exponents, t.coefficient * e};
            d.exponents[var] -= 1;
            out.push_back(std::move(d));
        }
        return fromTerms(std::move(out));
    }

    /// Evaluates at a point given per variable index. Works for any field-like
    /// scalar constructible from a Rational via `convert`.
    template<class T, class Convert>
    T evaluate(std::span<const T> point, Convert convert) const {
        T sum = convert(Rational(0));
        for (const auto& t : terms_) {
            T term = convert(t.coefficient);
            for (std::size_t i = 0; i < t.exponents.size(); ++i) {
                assert(i < point.size());
                for (std::uint32_t k = 0; k < t.exponents[i]; ++k) {
                    term = term * point[i];
                }
            }
            sum = sum + term;
        }
        return sum;
    }

    Rational evaluate(std::span<const Rational> point) const {
        return evaluate<Rational>(point, [](const Rational& r) { return r; });
    }

    double evaluate(std::span<const double> point) const {
        double sum = 0.0;
        for (const auto& t : terms_) {
            double term = t.coefficient.get_d();
            for (std::size_t i = 0; i < t.exponents.size(); ++i) {
                assert(i < point.size());
                term *= std::pow(point[i], static_cast<double>(t.exponents[i]));
            }
            sum += term;
        }
        return sum;
    }

    /// Substitutes the variable `var` by the constant `value`.
    Polynomial substitute(std::size_t var, const Rational& value) const {
        std::vector<Term> out;
        for (const auto& t : terms_) {
            auto e = detail::exponentAt(t.exponents, var);
            Term n{t.exponents, t.coefficient};
            if (e != 0) {
                Rational f(1);
                for (std::uint32_t k = 0; k < e; ++k) {
                    f *= value;
                }
                n.coefficient *= f;
                n.exponents[var] = 0;
            }
            out.push_back(std::move(n));
        }
        return fromTerms(std::move(out));
    }

    /// Positive rational c such that this / c has coprime integer coefficients.
    Rational content() const {
        if (isZero()) {
            return Rational(1);
        }
        mpz_class num = 0;
        mpz_class den = 1;
        for (const auto& t : terms_) {
            mpz_gcd(num.get_mpz_t(), num.get_mpz_t(), t.coefficient.get_num_mpz_t());
            mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), t.coefficient.get_den_mpz_t());
        }
        Rational c(num, den);
        c.canonicalize();
        return c;
    }

    /// Greatest monomial dividing every term.
    Monomial monomialContent() const {
        if (isZero()) {
            return {};
        }
        Monomial g = terms_[0].exponents;
        for (const auto& t : terms_) {
            g.resize(std::min(g.size(), t.exponents.size()));
            for (std::size_t i = 0; i < g.size(); ++i) {
                g[i] = std::min(g[i], t.exponents[i]);
            }
        }
        detail::trim(g);
        return g;
    }

    Polynomial divideByMonomial(const Monomial& m) const {
        Polynomial r;
        r.terms_.reserve(terms_.size());
        for (const auto& t : terms_) {
            r.terms_.push_back({detail::quotient(t.exponents, m), t.coefficient});
        }
        return r;
    }

    /// Exact quotient if `divisor` divides this polynomial, nullopt otherwise.
    std::optional<Polynomial> divideExact(const Polynomial& divisor) const {
        assert(!divisor.isZero());
        if (divisor.isConstant()) {
            return scaled(1 / divisor.constant());
        }
        std::map<Monomial, Rational, detail::GrlexGreater> rest;
        for (const auto& t : terms_) {
            rest.emplace(t.exponents, t.coefficient);
        }
        std::vector<Term> q;
        const auto& lead = divisor.leadingTerm();
        while (!rest.empty()) {
            auto it = rest.begin();
            if (!detail::divides(lead.exponents, it->first)) {
                return std::nullopt;
            }
            Term t{detail::quotient(it->first, lead.exponents), it->second / lead.coefficient};
            for (const auto& d : divisor.terms_) {
                auto m = detail::multiply(t.exponents, d.exponents);
                detail::trim(m);
                auto& c = rest[m];
                c -= t.coefficient * d.coefficient;
                if (c == 0) {
                    rest.erase(m);
                }
            }
            q.push_back(std::move(t));
        }
        return fromTerms(std::move(q));
    }

    /// Univariate division with remainder in variable `var`. Both operands
    /// must not contain any other variable.
    std::pair<Polynomial, Polynomial> divideUnivariate(const Polynomial& divisor, std::size_t var) const {
        assert(!divisor.isZero());
        Polynomial q;
        Polynomial r(*this);
        auto dd = divisor.degreeIn(var);
        const auto& lead = divisor.leadingTerm();
        while (!r.isZero() && r.degreeIn(var) >= dd) {
            const auto& lt = r.leadingTerm();
            Term t{detail::quotient(lt.exponents, lead.exponents), lt.coefficient / lead.coefficient};
            Polynomial tp;
            tp.terms_.push_back(t);
            q += tp;
            r -= tp * divisor;
        }
        return {q, r};
    }

    /// Monic greatest common divisor of two polynomials in the single
    /// variable `var`.
    static Polynomial gcdUnivariate(Polynomial a, Polynomial b, std::size_t var) {
        while (!b.isZero()) {
            auto r = a.divideUnivariate(b, var).second;
            a = std::move(b);
            b = std::move(r);
        }
        if (a.isZero()) {
            return a;
        }
        return a.scaled(1 / a.leadingTerm().coefficient);
    }

    std::string toString(const ParameterList& names = {}) const {
        if (terms_.empty()) {
            return "0";
        }
        std::ostringstream os;
        bool first = true;
        for (const auto& t : terms_) {
            Rational c = t.coefficient;
            bool negative = c < 0;
            if (negative) {
                c = -c;
            }
            if (first) {
                if (negative) {
                    os << "-";
                }
            } else {
                os << (negative ? " - " : " + ");
            }
            first = false;
            std::string mono = monomialString(t.exponents, names);
            if (mono.empty()) {
                os << c.get_str();
            } else if (c == 1) {
                os << mono;
            } else {
                os << c.get_str() << "*" << mono;
            }
        }
        return os.str();
    }

private:
    std::vector<Term> terms_;

    static Polynomial fromMap(const std::map<Monomial, Rational, detail::GrlexGreater>& acc) {
        Polynomial p;
        p.terms_.reserve(acc.size());
        for (const auto& [m, c] : acc) {
            if (c != 0) {
                p.terms_.push_back({m, c});
            }
        }
        return p;
    }

    static Polynomial combine(const Polynomial& a, const Polynomial& b, bool subtract) {
        Polynomial r;
        r.terms_.reserve(a.terms_.size() + b.terms_.size());
        std::size_t i = 0;
        std::size_t j = 0;
        while (i < a.terms_.size() || j < b.terms_.size()) {
            if (j == b.terms_.size() ||
                (i < a.terms_.size() && detail::grlexLess(b.terms_[j].exponents, a.terms_[i].exponents))) {
                r.terms_.push_back(a.terms_[i++]);
            } else if (i == a.terms_.size() || detail::grlexLess(a.terms_[i].exponents, b.terms_[j].exponents)) {
                Term t = b.terms_[j++];
                if (subtract) {
                    t.coefficient = -t.coefficient;
                }
                r.terms_.push_back(std::move(t));
            } else {
                Rational c = a.terms_[i].coefficient;
                if (subtract) {
                    c -= b.terms_[j].coefficient;
                } else {
                    c += b.terms_[j].coefficient;
                }
                if (c != 0) {
                    r.terms_.push_back({a.terms_[i].exponents, c});
                }
                ++i;
                ++j;
            }
        }
        return r;
    }

    static std::string monomialString(const Monomial& m, const ParameterList& names) {
        std::string out;
        for (std::size_t i = 0; i < m.size(); ++i) {
            if (m[i] == 0) {
                continue;
            }
            if (!out.empty()) {
                out += "*";
            }
            out += i < names.size() ? names[i] : "p" + std::to_string(i);
            if (m[i] > 1) {
                out += "^" + std::to_string(m[i]);
            }
        }
        return out;
    }
};

} // namespace slimdft
