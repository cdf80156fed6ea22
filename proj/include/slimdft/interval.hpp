#pragma once

#include "slimdft/error.hpp"
#include "slimdft/polynomial.hpp"
#include "slimdft/rational_function.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <span>
#include <vector>

namespace slimdft {

/// Closed interval of doubles with outward rounding: every operation widens
/// its result by one ulp on each side, so the exact real result of the
/// operation on any members of the operands is always contained.
struct Interval {
    double lo = 0.0;
    double hi = 0.0;

    Interval() = default;
    Interval(double l, double h) : lo(l), hi(h) {}
    explicit Interval(double v) : lo(v), hi(v) {}

    static Interval enclosing(const Rational& r) { return {roundDown(r), roundUp(r)}; }

    bool contains(double v) const { return lo <= v && v <= hi; }
    bool containsZero() const { return lo <= 0.0 && 0.0 <= hi; }
    double width() const { return hi - lo; }
    double mid() const { return lo + 0.5 * (hi - lo); }

    friend Interval operator+(const Interval& a, const Interval& b) {
        return {down(a.lo + b.lo), up(a.hi + b.hi)};
    }

    friend Interval operator-(const Interval& a, const Interval& b) {
        return {down(a.lo - b.hi), up(a.hi - b.lo)};
    }

    friend Interval operator*(const Interval& a, const Interval& b) {
        double p[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
        return {down(*std::min_element(p, p + 4)), up(*std::max_element(p, p + 4))};
    }

    friend Interval operator/(const Interval& a, const Interval& b) {
        if (b.containsZero()) {
            throw DenominatorMayVanish("interval division by an interval containing zero");
        }
        double p[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
        return {down(*std::min_element(p, p + 4)), up(*std::max_element(p, p + 4))};
    }

    /// Integer power; exact treatment of even powers of intervals straddling zero.
    Interval pow(std::uint32_t n) const {
        if (n == 0) {
            return Interval(1.0);
        }
        Interval r = *this;
        for (std::uint32_t k = 1; k < n; ++k) {
            r = r * *this;
        }
        if (n % 2 == 0 && containsZero()) {
            r.lo = 0.0;
        }
        return r;
    }

private:
    static double down(double v) { return std::nextafter(v, -std::numeric_limits<double>::infinity()); }
    static double up(double v) { return std::nextafter(v, std::numeric_limits<double>::infinity()); }
};

using Box = std::vector<Interval>;

namespace detail {

/// Recursive Horner evaluation: the polynomial is viewed as a univariate
/// polynomial in variable `var` whose coefficients are polynomials in the
/// later variables.
inline Interval hornerEnclosure(const std::vector<Polynomial::Term>& terms, std::size_t var, const Box& box) {
    if (terms.empty()) {
        return Interval(0.0);
    }
    if (var >= box.size()) {
        Interval sum(0.0);
        for (const auto& t : terms) {
            sum = sum + Interval::enclosing(t.coefficient);
        }
        return sum;
    }
    std::map<std::uint32_t, std::vector<Polynomial::Term>, std::greater<>> byPower;
    for (const auto& t : terms) {
        auto e = exponentAt(t.exponents, var);
        Polynomial::Term rest = t;
        if (var < rest.exponents.size()) {
            rest.exponents[var] = 0;
        }
        byPower[e].push_back(std::move(rest));
    }
    Interval acc(0.0);
    std::uint32_t previous = byPower.begin()->first;
    bool first = true;
    for (const auto& [power, coeffTerms] : byPower) {
        if (!first) {
            acc = acc * box[var].pow(previous - power);
        }
        acc = acc + hornerEnclosure(coeffTerms, var + 1, box);
        previous = power;
        first = false;
    }
    return acc * box[var].pow(previous);
}

} // namespace detail

/// Sound enclosure of the range of `p` over `box`.
inline Interval enclose(const Polynomial& p, const Box& box) {
    return detail::hornerEnclosure(p.terms(), 0, box);
}

/// Sound enclosure of the range of `f` over `box`. Throws
/// DenominatorMayVanish when the denominator enclosure contains zero.
inline Interval enclose(const RationalFunction& f, const Box& box) {
    Interval den(1.0);
    for (const auto& factor : f.denominatorFactors()) {
        den = den * enclose(factor.base, box).pow(factor.exponent);
    }
    if (den.containsZero()) {
        throw DenominatorMayVanish("denominator enclosure contains zero");
    }
    return enclose(f.factoredNumerator(), box) / den;
}

} // namespace slimdft
