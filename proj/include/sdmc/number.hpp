#pragma once

#include <gmpxx.h>

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace sdmc {

// exact arithmetic backend; canonicalized GMP rational
using Rational = mpq_class;

// parses "0.27", "27/100", "3", "1e-4", "-0.5e2" without going through double.
// returns nullopt on malformed input.
inline std::optional<Rational> parse_rational(const std::string &text) {
    if (text.empty()) return std::nullopt;
    auto slash = text.find('/');
    if (slash != std::string::npos) {
        std::string num = text.substr(0, slash), den = text.substr(slash + 1);
        if (num.empty() || den.empty()) return std::nullopt;
        try {
            mpz_class n(num, 10), d(den, 10);
            if (d == 0) return std::nullopt;
            Rational q{n, d};
            q.canonicalize();
            return q;
        } catch (const std::invalid_argument &) {
            return std::nullopt;
        }
    }
    std::size_t i = 0;
    bool negative = false;
    if (text[i] == '+' || text[i] == '-') {
        negative = text[i] == '-';
        ++i;
    }
    std::string digits;
    long frac_digits = 0;
    bool seen_digit = false, seen_dot = false;
    for (; i < text.size() && (std::isdigit(static_cast<unsigned char>(text[i])) || text[i] == '.'); ++i) {
        if (text[i] == '.') {
            if (seen_dot) return std::nullopt;
            seen_dot = true;
        } else {
            digits.push_back(text[i]);
            if (seen_dot) ++frac_digits;
            seen_digit = true;
        }
    }
    if (!seen_digit) return std::nullopt;
    long exponent = 0;
    if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
        ++i;
        bool exp_neg = false;
        if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
            exp_neg = text[i] == '-';
            ++i;
        }
        if (i == text.size()) return std::nullopt;
        long val = 0;
        for (; i < text.size(); ++i) {
            if (!std::isdigit(static_cast<unsigned char>(text[i]))) return std::nullopt;
            val = val * 10 + (text[i] - '0');
            if (val > 1000000) return std::nullopt;
        }
        exponent = exp_neg ? -val : val;
    }
    if (i != text.size()) return std::nullopt;
    mpz_class mantissa(digits.empty() ? "0" : digits, 10);
    Rational q(mantissa);
    long shift = exponent - frac_digits;
    if (shift != 0) {
        mpz_class pow10;
        mpz_ui_pow_ui(pow10.get_mpz_t(), 10, static_cast<unsigned long>(shift > 0 ? shift : -shift));
        if (shift > 0)
            q *= Rational(pow10);
        else
            q /= Rational(pow10);
    }
    if (negative) q = -q;
    q.canonicalize();
    return q;
}

// numeric traits shared by the float and rational engines
template <typename value_t>
struct number_traits;

template <>
struct number_traits<double> {
    static constexpr bool exact = false;
    static constexpr const char *name = "float";
    // residual target for linear solves and containment tests
    static double solve_tolerance() { return 1e-10; }
    static double geometry_tolerance() { return 1e-9; }
    static double from_string(const std::string &s) {
        auto q = parse_rational(s);
        if (!q) throw std::invalid_argument("malformed probability: " + s);
        return q->get_d();
    }
    static double to_double(double v) { return v; }
    static bool approx_equal(double a, double b, double tol) { return std::abs(a - b) <= tol; }
};

template <>
struct number_traits<Rational> {
    static constexpr bool exact = true;
    static constexpr const char *name = "rational";
    static Rational solve_tolerance() { return Rational(0); }
    static Rational geometry_tolerance() { return Rational(0); }
    static Rational from_string(const std::string &s) {
        auto q = parse_rational(s);
        if (!q) throw std::invalid_argument("malformed probability: " + s);
        return *q;
    }
    // mpq_get_d truncates; nudge to the nearest representable double
    static double to_double(const Rational &v) {
        double d = v.get_d();
        if (!std::isfinite(d)) return d;
        double best = d;
        Rational best_err = abs(v - Rational(d));
        for (double cand : {std::nextafter(d, 1e308), std::nextafter(d, -1e308)}) {
            Rational err = abs(v - Rational(cand));
            if (err < best_err) {
                best_err = err;
                best = cand;
            }
        }
        return best;
    }
    static bool approx_equal(const Rational &a, const Rational &b, const Rational &tol) {
        return abs(a - b) <= tol;
    }
};

template <typename value_t>
value_t value_from_double(double d);

template <>
inline double value_from_double<double>(double d) { return d; }

// exact binary expansion of the double; used for tolerances like 1e-4, not model data
template <>
inline Rational value_from_double<Rational>(double d) { return Rational(d); }

inline double sqrt_to_double(double v) { return std::sqrt(v); }
inline double sqrt_to_double(const Rational &v) { return std::sqrt(v.get_d()); }

}  // namespace sdmc
