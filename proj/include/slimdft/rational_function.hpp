#pragma once

#include "slimdft/error.hpp"
#include "slimdft/polynomial.hpp"

#include <cmath>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace slimdft {

/// Quotient of two polynomials over the same parameter list.
///
/// The denominator is kept as a product of primitive factors, so sums use
/// the exact least common multiple of the factor lists. Numerators are
/// cancelled against known factors by exact division; in a single variable
/// factors are also split by their gcd with the numerator.
///
/// numerator()/denominator() give the canonical expanded form: integer
/// coefficients with joint content one and a positive leading denominator
/// coefficient.
class RationalFunction {
public:
    struct Factor {
        Polynomial base;
        unsigned exponent;
    };

    RationalFunction() : num_(0) {}

    RationalFunction(const Polynomial& p) : num_(p) {}

    RationalFunction(const Rational& c) : num_(c) {}

    RationalFunction(long c) : RationalFunction(Rational(c)) {}

    RationalFunction(Polynomial numerator, const Polynomial& denominator) : num_(std::move(numerator)) {
        if (denominator.isZero()) {
            throw DegenerateDenominator("rational function with zero denominator");
        }
        insertFactor(denominator, 1);
        reduce();
    }

    const Polynomial& numerator() const { return canonical().num; }
    const Polynomial& denominator() const { return canonical().den; }
    /// Numerator over the product of denominatorFactors().
    const Polynomial& factoredNumerator() const { return num_; }
    const std::vector<Factor>& denominatorFactors() const { return factors_; }

    /// Total degree of the denominator, without expanding it.
    std::uint64_t denominatorDegree() const {
        std::uint64_t d = 0;
        for (const auto& f : factors_) {
            d += f.exponent * f.base.totalDegree();
        }
        return d;
    }

    bool isZero() const { return num_.isZero(); }
    bool isOne() const { return factors_.empty() && num_.isOne(); }
    bool isConstant() const { return factors_.empty() && num_.isConstant(); }

    Rational constant() const { return num_.constant(); }

    friend RationalFunction operator+(const RationalFunction& a, const RationalFunction& b) {
        if (a.isZero()) {
            return b;
        }
        if (b.isZero()) {
            return a;
        }
        RationalFunction r;
        Polynomial ma(1), mb(1);
        r.factors_ = a.factors_;
        for (const auto& f : b.factors_) {
            auto* g = r.find(f.base);
            if (!g) {
                r.factors_.push_back(f);
                ma = ma * f.base.pow(f.exponent);
            } else if (g->exponent < f.exponent) {
                ma = ma * f.base.pow(f.exponent - g->exponent);
                g->exponent = f.exponent;
            }
        }
        for (const auto& g : r.factors_) {
            unsigned have = 0;
            for (const auto& f : b.factors_) {
                if (f.base == g.base) {
                    have = f.exponent;
                }
            }
            if (have < g.exponent) {
                mb = mb * g.base.pow(g.exponent - have);
            }
        }
        r.num_ = a.num_ * ma + b.num_ * mb;
        r.reduce();
        return r;
    }

    friend RationalFunction operator-(const RationalFunction& a, const RationalFunction& b) { return a + (-b); }

    RationalFunction operator-() const {
        RationalFunction r;
        r.num_ = -num_;
        r.factors_ = factors_;
        return r;
    }

    friend RationalFunction operator*(const RationalFunction& a, const RationalFunction& b) {
        if (a.isZero() || b.isZero()) {
            return RationalFunction();
        }
        RationalFunction r;
        r.num_ = a.num_ * b.num_;
        r.factors_ = a.factors_;
        for (const auto& f : b.factors_) {
            r.insertFactor(f.base, f.exponent);
        }
        r.reduce();
        return r;
    }

    friend RationalFunction operator/(const RationalFunction& a, const RationalFunction& b) {
        if (b.isZero()) {
            throw DegenerateDenominator("division by a rational function that is identically zero");
        }
        RationalFunction r;
        r.num_ = a.num_;
        for (const auto& f : b.factors_) {
            r.num_ = r.num_ * f.base.pow(f.exponent);
        }
        r.factors_ = a.factors_;
        r.insertFactor(b.num_, 1);
        r.reduce();
        return r;
    }

    RationalFunction& operator+=(const RationalFunction& o) { return *this = *this + o; }
    RationalFunction& operator-=(const RationalFunction& o) { return *this = *this - o; }
    RationalFunction& operator*=(const RationalFunction& o) { return *this = *this * o; }
    RationalFunction& operator/=(const RationalFunction& o) { return *this = *this / o; }

    bool operator==(const RationalFunction& o) const {
        return numerator() == o.numerator() && denominator() == o.denominator();
    }

    /// Partial derivative by the quotient rule.
    RationalFunction derivative(std::size_t var) const {
        RationalFunction base;
        base.factors_ = factors_;
        RationalFunction r = base;
        r.num_ = num_.derivative(var);
        r.reduce();
        RationalFunction logDer;
        for (const auto& f : factors_) {
            Polynomial d = f.base.derivative(var);
            if (!d.isZero()) {
                logDer += RationalFunction(d.scaled(Rational(f.exponent)), f.base);
            }
        }
        if (!logDer.isZero()) {
            RationalFunction self = *this;
            r -= self * logDer;
        }
        return r;
    }

    Rational evaluate(std::span<const Rational> point) const {
        Rational den = denominator().evaluate(point);
        if (den == 0) {
            throw DegenerateDenominator("denominator vanishes at the evaluation point");
        }
        return numerator().evaluate(point) / den;
    }

    double evaluate(std::span<const double> point) const {
        double den = 1.0;
        for (const auto& f : factors_) {
            den *= std::pow(f.base.evaluate(point), static_cast<double>(f.exponent));
        }
        return num_.evaluate(point) / den;
    }

    std::string toString(const ParameterList& names = {}) const {
        if (denominator().isOne()) {
            return numerator().toString(names);
        }
        return "(" + numerator().toString(names) + ")/(" + denominator().toString(names) + ")";
    }

private:
    struct Canonical {
        std::once_flag once;
        Polynomial num;
        Polynomial den;
    };

    // value = num_ / prod(base^exponent); every base is primitive with
    // integer coefficients, a positive leading coefficient and positive degree
    Polynomial num_;
    std::vector<Factor> factors_;
    std::shared_ptr<Canonical> canonical_ = std::make_shared<Canonical>();

    Factor* find(const Polynomial& p) {
        for (auto& f : factors_) {
            if (f.base == p) {
                return &f;
            }
        }
        return nullptr;
    }

    /// Multiplies the denominator by p^e, splitting p along known factors.
    void insertFactor(Polynomial p, unsigned e) {
        if (p.isConstant()) {
            num_ = num_.scaled(pow(1 / p.constant(), e));
            return;
        }
        Rational c = p.content();
        if (p.leadingTerm().coefficient < 0) {
            c = -c;
        }
        p = p.scaled(1 / c);
        num_ = num_.scaled(pow(1 / c, e));
        for (bool split = true; split && !p.isConstant();) {
            split = false;
            for (std::size_t i = 0; i < factors_.size(); ++i) {
                if (factors_[i].base == p) {
                    factors_[i].exponent += e;
                    return;
                }
                if (auto q = p.divideExact(factors_[i].base)) {
                    factors_[i].exponent += e;
                    p = *q;
                    split = true;
                    break;
                }
            }
        }
        if (p.isConstant()) {
            num_ = num_.scaled(pow(1 / p.constant(), e));
            return;
        }
        factors_.push_back({std::move(p), e});
    }

    static Rational pow(const Rational& r, unsigned e) {
        Rational out(1);
        for (unsigned i = 0; i < e; ++i) {
            out *= r;
        }
        return out;
    }

    void reduce() {
        canonical_ = std::make_shared<Canonical>();
        if (num_.isZero()) {
            factors_.clear();
            return;
        }
        auto vars = num_.variables();
        for (std::size_t i = 0; i < factors_.size(); ++i) {
            Factor& f = factors_[i];
            while (f.exponent > 0) {
                auto q = num_.divideExact(f.base);
                if (!q) {
                    break;
                }
                num_ = std::move(*q);
                --f.exponent;
            }
            if (f.exponent == 0 || num_.isConstant()) {
                continue;
            }
            auto fv = f.base.variables();
            if (fv.size() == 1 && vars.size() == 1 && *fv.begin() == *vars.begin()) {
                std::size_t v = *fv.begin();
                Polynomial g = Polynomial::gcdUnivariate(num_, f.base, v);
                if (!g.isConstant()) {
                    // b^e = g^e * (b/g)^e; the next pass cancels g
                    Factor old = f;
                    factors_.erase(factors_.begin() + static_cast<std::ptrdiff_t>(i));
                    Polynomial rest = old.base.divideUnivariate(g, v).first;
                    insertFactor(g, old.exponent);
                    insertFactor(rest, old.exponent);
                    i = static_cast<std::size_t>(-1);
                }
            }
        }
        std::erase_if(factors_, [](const Factor& f) { return f.exponent == 0; });
    }

    const Canonical& canonical() const {
        Canonical* c = canonical_.get();
        std::call_once(c->once, [&] {
            Polynomial num = num_;
            Polynomial den(1);
            for (const auto& f : factors_) {
                den = den * f.base.pow(f.exponent);
            }
            if (num.isZero()) {
                den = Polynomial(1);
            }
            Rational cn = num.content();
            Rational cd = den.content();
            mpz_class g;
            mpz_gcd(g.get_mpz_t(), cn.get_num_mpz_t(), cd.get_num_mpz_t());
            mpz_class l;
            mpz_lcm(l.get_mpz_t(), cn.get_den_mpz_t(), cd.get_den_mpz_t());
            Rational scale(l, g);
            scale.canonicalize();
            if (den.leadingTerm().coefficient < 0) {
                scale = -scale;
            }
            c->num = scale == 1 ? num : num.scaled(scale);
            c->den = scale == 1 ? den : den.scaled(scale);
        });
        return *c;
    }
};

} // namespace slimdft
