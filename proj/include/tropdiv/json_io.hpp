#pragma once

/**
 * @file json_io.hpp
 * @brief JSON forms of polynomials, composites and division results.
 *
 * Polynomial: {"dim": n, "terms": [{"a": [...], "b": ...}]}; the NEG_INF
 * polynomial has an empty term list and a NEG_INF bias is written as null.
 * Rationals are written as integers when integral and as "p/q" strings
 * otherwise; readers accept numbers and strings for either scalar type.
 */

#include "tropdiv/composite.hpp"
#include "tropdiv/division.hpp"
#include "tropdiv/network.hpp"

#include <string>
#include <vector>

namespace tropdiv {

inline json scalar_to_json(double v) { return v == 0.0 ? 0.0 : v; }  // no "-0.0"

inline json scalar_to_json(const Rational& v)
{
    if (v.get_den() == 1 && v.get_num().fits_slong_p()) return v.get_num().get_si();
    return to_string(v);
}

template <class T>
T scalar_from_json(const json& j);

template <>
inline double scalar_from_json<double>(const json& j)
{
    if (j.is_number()) return j.get<double>();
    if (j.is_string()) return to_double(parse_rational(j.get<std::string>()));
    throw std::invalid_argument("expected a number, got " + j.dump());
}

template <>
inline Rational scalar_from_json<Rational>(const json& j)
{
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_number_float()) return ScalarTraits<Rational>::from_double(j.get<double>());  // shortest decimal form
    if (j.is_string()) return parse_rational(j.get<std::string>());
    throw std::invalid_argument("expected a number, got " + j.dump());
}

template <class T>
json vec_to_json(const Vec<T>& v)
{
    json out = json::array();
    for (const auto& x : v) out.push_back(scalar_to_json(x));
    return out;
}

template <class T>
Vec<T> vec_from_json(const json& j)
{
    if (!j.is_array()) throw std::invalid_argument("expected an array, got " + j.dump());
    Vec<T> v;
    for (const auto& x : j) v.push_back(scalar_from_json<T>(x));
    return v;
}

template <class T>
json term_to_json(const TropicalTerm<T>& t)
{
    return {{"a", vec_to_json(t.a)}, {"b", t.b.is_neg_inf() ? json(nullptr) : scalar_to_json(t.b.value())}};
}

template <class T>
TropicalTerm<T> term_from_json(const json& j)
{
    TropicalTerm<T> t;
    t.a = vec_from_json<T>(j.at("a"));
    const auto& b = j.at("b");
    if (!b.is_null()) t.b = MaxPlus<T>(scalar_from_json<T>(b));
    return t;
}

template <class T>
json to_json(const TropicalPolynomial<T>& p)
{
    json terms = json::array();
    for (const auto& t : p.terms()) terms.push_back(term_to_json(t));
    return {{"dim", p.dim()}, {"terms", terms}};
}

template <class T>
TropicalPolynomial<T> polynomial_from_json(const json& j)
{
    const auto dim = j.at("dim").get<std::size_t>();
    std::vector<TropicalTerm<T>> terms;
    for (const auto& t : j.at("terms")) terms.push_back(term_from_json<T>(t));
    return TropicalPolynomial<T>(dim, std::move(terms));
}

template <class T>
json to_json(const CompositePolynomial<T>& p)
{
    json units = json::array();
    for (const auto& u : p.units) units.push_back(term_to_json(u));
    return {{"dim", p.dim}, {"units", units}};
}

template <class T>
CompositePolynomial<T> composite_from_json(const json& j)
{
    const auto dim = j.at("dim").get<std::size_t>();
    std::vector<TropicalTerm<T>> units;
    for (const auto& u : j.at("units")) units.push_back(term_from_json<T>(u));
    return CompositePolynomial<T>(dim, std::move(units));
}

template <class T>
json to_json(const DivisionResult<T>& r)
{
    json j{{"quotient", to_json(r.quotient)},
           {"remainder", to_json(r.remainder)},
           {"nontrivial", r.nontrivial},
           {"effective", r.effective}};
    if (r.approximate) {
        j["approximate"] = true;
        j["error_trace"] = r.error_trace;
    }
    return j;
}

/// Problem file: {"dividend": <poly>, "divisor": <poly>}.
template <class T>
DivisionProblem<T> problem_from_json(const json& j)
{
    return {polynomial_from_json<T>(j.at("dividend")), polynomial_from_json<T>(j.at("divisor"))};
}

template <class T>
json to_json(const DivisionProblem<T>& p)
{
    return {{"dividend", to_json(p.p)}, {"divisor", to_json(p.d)}};
}

}  // namespace tropdiv
