#pragma once

#include <gmpxx.h>

#include <cctype>
#include <cmath>
#include <optional>
#include <string>
#include <string_view>

namespace slimdft {

using Rational = mpq_class;

/// Parses an exact decimal literal ("12", "0.25", "1.5e-3") or a fraction
/// ("3/4"). Returns nullopt on malformed input.
inline std::optional<Rational> parseRational(std::string_view text) {
    if (text.empty()) {
        return std::nullopt;
    }
    auto slash = text.find('/');
    if (slash != std::string_view::npos) {
        auto num = parseRational(text.substr(0, slash));
        auto den = parseRational(text.substr(slash + 1));
        if (!num || !den || *den == 0) {
            return std::nullopt;
        }
        Rational r = *num / *den;
        r.canonicalize();
        return r;
    }
    std::size_t pos = 0;
    bool negative = false;
    if (text[pos] == '+' || text[pos] == '-') {
        negative = text[pos] == '-';
        ++pos;
    }
    std::string digits;
    long fractionDigits = 0;
    bool seenDigit = false;
    bool seenPoint = false;
    for (; pos < text.size(); ++pos) {
        char c = text[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            seenDigit = true;
            if (seenPoint) {
                ++fractionDigits;
            }
        } else if (c == '.' && !seenPoint) {
            seenPoint = true;
        } else {
            break;
        }
    }
    if (!seenDigit) {
        return std::nullopt;
    }
    long exponent = 0;
    if (pos < text.size()) {
        if (text[pos] != 'e' && text[pos] != 'E') {
            return std::nullopt;
        }
        ++pos;
        bool negExp = false;
        if (pos < text.size() && (text[pos] == '+' || text[pos] == '-')) {
            negExp = text[pos] == '-';
            ++pos;
        }
        if (pos >= text.size()) {
            return std::nullopt;
        }
        for (; pos < text.size(); ++pos) {
            if (!std::isdigit(static_cast<unsigned char>(text[pos])) || exponent > 100000) {
                return std::nullopt;
            }
            exponent = exponent * 10 + (text[pos] - '0');
        }
        if (negExp) {
            exponent = -exponent;
        }
    }
    mpz_class numerator(digits, 10);
    long scale = exponent - fractionDigits;
    mpz_class power;
    mpz_ui_pow_ui(power.get_mpz_t(), 10, static_cast<unsigned long>(scale < 0 ? -scale : scale));
    Rational r = scale < 0 ? Rational(numerator, power) : Rational(numerator * power);
    r.canonicalize();
    if (negative) {
        r = -r;
    }
    return r;
}

/// Exact conversion of a finite double.
inline Rational rationalFromDouble(double value) {
    Rational r(value);
    r.canonicalize();
    return r;
}

inline double toDouble(const Rational& r) { return r.get_d(); }

inline std::string toString(const Rational& r) { return r.get_str(); }

/// Smallest double >= r and largest double <= r.
inline double roundUp(const Rational& r) {
    double d = r.get_d();
    if (Rational(d) < r) {
        d = std::nextafter(d, INFINITY);
    }
    return d;
}

inline double roundDown(const Rational& r) {
    double d = r.get_d();
    if (Rational(d) > r) {
        d = std::nextafter(d, -INFINITY);
    }
    return d;
}

} // namespace slimdft
