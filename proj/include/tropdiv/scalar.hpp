#pragma once

/**
 * @file scalar.hpp
 * @brief Scalar backends: exact rationals (GMP) and 64-bit floats.
 *
 * Every algorithm in the library is written against ScalarTraits<T>, so the
 * same code runs exactly over Rational and approximately over double.  The
 * traits carry the comparison tolerances; for Rational they are all zero.
 */

#include <gmpxx.h>

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>
#include <string_view>
#include <system_error>
#include <vector>

namespace tropdiv {

using Rational = mpq_class;

template <class T>
using Vec = std::vector<T>;

template <class T>
struct ScalarTraits;

template <>
struct ScalarTraits<double> {
    static constexpr bool exact = false;
    /// Pivot threshold for the simplex method.
    static double pivot_tol() { return 1e-10; }
    /// Feasibility tolerance for LP outcomes and containment tests.
    static double feas_tol() { return 1e-7; }
    /// Two terms closer than this are the same term.
    static double dedup_tol()
    {
        static const double tol = [] {
            if (const char* env = std::getenv("TROPDIV_TOL")) {
                char* end = nullptr;
                double v = std::strtod(env, &end);
                if (end != env && v > 0.0) return v;
            }
            return 1e-9;
        }();
        return tol;
    }
    static double to_double(double v) { return v; }
    static double from_double(double v) { return v; }
    static double abs(double v) { return std::fabs(v); }
};

template <>
struct ScalarTraits<Rational> {
    static constexpr bool exact = true;
    static Rational pivot_tol() { return 0; }
    static Rational feas_tol() { return 0; }
    static Rational dedup_tol() { return 0; }
    static double to_double(const Rational& v) { return v.get_d(); }
    /// Exact conversion through the shortest round-trip decimal, so that
    /// 0.1 becomes 1/10 rather than the binary expansion of the double.
    static Rational from_double(double v);
    static Rational abs(const Rational& v) { return ::abs(v); }
};

/// Parses "3", "-7/2", "0.125" or "1e-3" as an exact rational.
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    auto trim = [](std::string& t) {
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.front()))) t.erase(t.begin());
        while (!t.empty() && std::isspace(static_cast<unsigned char>(t.back()))) t.pop_back();
    };
    trim(s);
    if (s.empty()) throw std::invalid_argument("empty rational literal");
    if (auto slash = s.find('/'); slash != std::string::npos) {
        Rational r;
        if (r.set_str(s, 10) != 0) throw std::invalid_argument("bad rational literal: " + s);
        if (r.get_den() == 0) throw std::invalid_argument("zero denominator: " + s);
        r.canonicalize();
        return r;
    }
    // Decimal with optional exponent.
    bool negative = false;
    std::size_t pos = 0;
    if (s[pos] == '+' || s[pos] == '-') {
        negative = s[pos] == '-';
        ++pos;
    }
    std::string digits;
    long exponent = 0;
    bool seen_point = false;
    bool any_digit = false;
    for (; pos < s.size(); ++pos) {
        char c = s[pos];
        if (std::isdigit(static_cast<unsigned char>(c))) {
            digits.push_back(c);
            any_digit = true;
            if (seen_point) --exponent;
        } else if (c == '.' && !seen_point) {
            seen_point = true;
        } else if (c == 'e' || c == 'E') {
            long e = 0;
            auto [ptr, ec] = std::from_chars(s.data() + pos + 1 + (s[pos + 1] == '+' ? 1 : 0),
                                             s.data() + s.size(), e);
            if (ec != std::errc() || ptr != s.data() + s.size())
                throw std::invalid_argument("bad exponent in: " + s);
            exponent += e;
            pos = s.size();
            break;
        } else {
            throw std::invalid_argument("bad rational literal: " + s);
        }
    }
    if (!any_digit) throw std::invalid_argument("bad rational literal: " + s);
    mpz_class mantissa(digits, 10);
    mpz_class scale;
    mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
    Rational r = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale, 1);
    r.canonicalize();
    return negative ? Rational(-r) : r;
}

inline Rational ScalarTraits<Rational>::from_double(double v)
{
    if (!std::isfinite(v)) throw std::invalid_argument("non-finite value cannot become a rational");
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    if (ec != std::errc()) throw std::runtime_error("to_chars failed");
    return parse_rational(std::string_view(buf, static_cast<std::size_t>(ptr - buf)));
}

/// num/den in lowest terms (the two-argument mpq constructor does not reduce).
inline Rational ratio(long num, long den)
{
    if (den == 0) throw std::invalid_argument("zero denominator");
    Rational r(num, den);
    r.canonicalize();
    return r;
}

/// "p/q" for non-integers, plain digits for integers.
inline std::string to_string(const Rational& r) { return r.get_str(10); }
inline std::string to_string(double v)
{
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, ptr);
}

template <class T>
double to_double(const T& v) { return ScalarTraits<T>::to_double(v); }

template <class To, class From>
To scalar_cast(const From& v)
{
    if constexpr (std::is_same_v<To, From>) {
        return v;
    } else if constexpr (std::is_same_v<To, double>) {
        return ScalarTraits<From>::to_double(v);
    } else {
        return ScalarTraits<To>::from_double(ScalarTraits<From>::to_double(v));
    }
}

/// Sign of v with a dead zone of width tol (exact for Rational).
template <class T>
int sign_tol(const T& v, const T& tol)
{
    if (v > tol) return 1;
    if (v < -tol) return -1;
    return 0;
}

template <class T>
bool near(const T& a, const T& b, const T& tol)
{
    return ScalarTraits<T>::abs(T(a - b)) <= tol;
}

template <class T>
T dot(const Vec<T>& a, const Vec<T>& b)
{
    if (a.size() != b.size()) throw std::invalid_argument("dot: dimension mismatch");
    T s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

template <class To, class From>
Vec<To> vec_cast(const Vec<From>& v)
{
    Vec<To> out;
    out.reserve(v.size());
    for (const auto& x : v) out.push_back(scalar_cast<To>(x));
    return out;
}

}  // namespace tropdiv
