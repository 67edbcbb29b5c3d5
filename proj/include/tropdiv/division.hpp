#pragma once

/**
 * @file division.hpp
 * @brief Dividend/divisor pairs and the quotient/remainder result record.
 */

#include "tropdiv/tropical.hpp"

#include <stdexcept>
#include <vector>

namespace tropdiv {

template <class T>
struct DivisionProblem {
    TropicalPolynomial<T> p;  ///< dividend
    TropicalPolynomial<T> d;  ///< divisor

    DivisionProblem(TropicalPolynomial<T> dividend, TropicalPolynomial<T> divisor)
        : p(std::move(dividend)), d(std::move(divisor))
    {
        require_same_dim(p, d, "division problem");
    }

    std::size_t dim() const { return p.dim(); }

    /// f(x) = p(x) - d(x); NEG_INF when p(x) is.
    MaxPlus<T> f(const Vec<T>& x) const
    {
        auto pv = p.eval(x), dv = d.eval(x);
        if (dv.is_neg_inf()) throw std::domain_error("divisor evaluates to NEG_INF");
        return pv - dv.value();
    }
};

template <class To, class From>
DivisionProblem<To> convert_problem(const DivisionProblem<From>& prob)
{
    return {convert<To>(prob.p), convert<To>(prob.d)};
}

template <class T>
struct DivisionResult {
    TropicalPolynomial<T> quotient;
    TropicalPolynomial<T> remainder;
    bool nontrivial = false;
    bool effective = false;
    std::vector<double> error_trace;  ///< e(t) per iteration, approximate mode only
    bool approximate = false;
};

/// A quotient is nontrivial exactly when it is not the NEG_INF polynomial.
template <class T>
bool is_nontrivial(const DivisionResult<T>& r)
{
    return !r.quotient.is_neg_inf();
}

/// Effective when r and p differ at some probe point.
template <class T>
bool is_effective(const DivisionResult<T>& r, const DivisionProblem<T>& prob, const std::vector<Vec<T>>& probes)
{
    for (const auto& x : probes)
        if (!(r.remainder.eval(x) == prob.p.eval(x))) return true;
    return false;
}

}  // namespace tropdiv
