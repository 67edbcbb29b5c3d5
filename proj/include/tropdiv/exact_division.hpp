#pragma once

/**
 * @file exact_division.hpp
 * @brief Exact quotient and remainder through polyhedral computations.
 *
 * Steps: split R^n into cells P_ij where term i of p and term j of d attain
 * their maxima, resolve the epigraph of f = p - d on each cell into vertices
 * and rays, take the hull of the union and read the quotient terms off the
 * H-representation of that hull.  The remainder keeps the dividend terms
 * that still win at some cell interior point.
 */

#include "tropdiv/division.hpp"
#include "tropdiv/parallel.hpp"
#include "tropdiv/polyhedral.hpp"

#include <stdexcept>
#include <vector>

namespace tropdiv {

template <class T>
struct Cell {
    std::size_t i = 0, j = 0;
    HRep<T> region;     ///< P_ij in R^n
    HRep<T> epigraph;   ///< E_ij in R^{n+1}, last coordinate is z
    VRep<T> resolved;   ///< generators of E_ij
    Vec<T> interior;    ///< mean of projected vertices plus sum of projected rays
};

template <class T>
struct ExactDivision {
    DivisionResult<T> result;
    std::vector<Cell<T>> cells;
    VRep<T> hull;        ///< generators of the epigraph of q
    HRep<T> hull_rows;   ///< its H-representation
};

namespace detail {

template <class T>
HRep<T> cell_region(const TropicalPolynomial<T>& p, const TropicalPolynomial<T>& d, std::size_t i, std::size_t j)
{
    const std::size_t n = p.dim();
    HRep<T> h;
    h.dim = n;
    auto dominance = [&](const TropicalTerm<T>& win, const TropicalTerm<T>& other) {
        Vec<T> a(n);
        for (std::size_t k = 0; k < n; ++k) a[k] = win.a[k] - other.a[k];
        h.add(std::move(a), T(other.b.value() - win.b.value()));
    };
    for (std::size_t k = 0; k < p.size(); ++k)
        if (k != i) dominance(p.term(i), p.term(k));
    for (std::size_t k = 0; k < d.size(); ++k)
        if (k != j) dominance(d.term(j), d.term(k));
    return h;
}

template <class T>
bool has_empty_row(const HRep<T>& h)
{
    for (const auto& r : h.rows) {
        bool zero = std::all_of(r.a.begin(), r.a.end(), [](const T& x) { return x == 0; });
        if (zero && r.b > 0) return true;
    }
    return false;
}

}  // namespace detail

/// Cells with a full-dimensional region.  Empty and lower-dimensional cells
/// are dropped: f is affine on each kept cell and their union is R^n.
template <class T>
std::vector<Cell<T>> partition_cells(const DivisionProblem<T>& prob, unsigned jobs = 1)
{
    const auto p = prob.p.canonical(), d = prob.d.canonical();
    if (p.is_neg_inf() || d.is_neg_inf()) throw std::invalid_argument("partition_cells: NEG_INF operand");
    const std::size_t n = p.dim(), mp = p.size(), md = d.size();
    std::vector<std::optional<Cell<T>>> slots(mp * md);
    parallel_for(mp * md, jobs, [&](std::size_t idx) {
        const std::size_t i = idx / md, j = idx % md;
        Cell<T> c;
        c.i = i;
        c.j = j;
        c.region = detail::cell_region(p, d, i, j);
        if (detail::has_empty_row(c.region)) return;
        c.epigraph.dim = n + 1;
        for (const auto& r : c.region.rows) {
            Vec<T> a = r.a;
            a.push_back(T(0));
            c.epigraph.add(std::move(a), r.b);
        }
        // z - (a_i - ad_j)^T x >= b_i - bd_j
        Vec<T> a(n + 1);
        for (std::size_t k = 0; k < n; ++k) a[k] = d.term(j).a[k] - p.term(i).a[k];
        a[n] = 1;
        c.epigraph.add(std::move(a), T(p.term(i).b.value() - d.term(j).b.value()));
        c.resolved = vrep_of(c.epigraph);
        if (c.resolved.empty()) return;

        std::vector<Vec<T>> span;
        const auto& V = c.resolved.vertices;
        for (std::size_t k = 1; k < V.size(); ++k) {
            Vec<T> dv(n);
            for (std::size_t t = 0; t < n; ++t) dv[t] = V[k][t] - V[0][t];
            span.push_back(std::move(dv));
        }
        c.interior.assign(n, T(0));
        for (const auto& v : V)
            for (std::size_t t = 0; t < n; ++t) c.interior[t] += v[t];
        for (auto& x : c.interior) x /= T(static_cast<long>(V.size()));
        for (const auto& r : c.resolved.rays) {
            span.emplace_back(r.begin(), r.begin() + static_cast<long>(n));
            for (std::size_t t = 0; t < n; ++t) c.interior[t] += r[t];
        }
        if (detail::rank_of(std::move(span)) < n) return;
        slots[idx] = std::move(c);
    });
    std::vector<Cell<T>> cells;
    for (auto& s : slots)
        if (s) cells.push_back(std::move(*s));
    return cells;
}

/// Quotient terms from hull rows [A^x a^z] (x, z) >= b: z >= -A^x x / a^z + b / a^z.
template <class T>
TropicalPolynomial<T> quotient_from_rows(const HRep<T>& rows)
{
    const std::size_t n = rows.dim - 1;
    std::vector<TropicalTerm<T>> terms;
    for (const auto& r : rows.rows) {
        const T az = r.a[n];
        if (!(az > ScalarTraits<T>::pivot_tol()))
            throw std::logic_error("hull row without positive z coefficient: not an epigraph");
        Vec<T> a(n);
        for (std::size_t k = 0; k < n; ++k) a[k] = -r.a[k] / az;
        terms.push_back({std::move(a), MaxPlus<T>(T(r.b / az))});
    }
    return TropicalPolynomial<T>(n, std::move(terms)).canonical();
}

template <class T>
ExactDivision<T> exact_divide_detailed(const DivisionProblem<T>& prob, unsigned jobs = 1)
{
    ExactDivision<T> out;
    const std::size_t n = prob.dim();
    const auto p = prob.p.canonical();
    if (p.is_neg_inf()) {
        out.result.quotient = TropicalPolynomial<T>::neg_inf(n);
        out.result.remainder = TropicalPolynomial<T>::neg_inf(n);
        return out;
    }
    out.cells = partition_cells(prob, jobs);
    std::vector<VRep<T>> parts;
    for (const auto& c : out.cells) parts.push_back(c.resolved);
    out.hull = hull_of_union(parts);
    out.hull_rows = hrep_of(out.hull);

    auto& res = out.result;
    if (out.hull_rows.rows.empty()) {
        res.quotient = TropicalPolynomial<T>::neg_inf(n);
        res.remainder = p;
    } else {
        res.quotient = quotient_from_rows(out.hull_rows);
        auto pt = tropical_sum(prob.d, res.quotient);
        std::vector<TropicalTerm<T>> kept;
        std::vector<bool> in_i(p.size(), false);
        for (const auto& c : out.cells)
            if (pt.eval(c.interior) < p.eval(c.interior)) in_i[c.i] = true;
        for (std::size_t i = 0; i < p.size(); ++i)
            if (in_i[i]) kept.push_back(p.term(i));
        res.remainder = TropicalPolynomial<T>(n, std::move(kept));
    }
    res.nontrivial = is_nontrivial(res);
    std::vector<Vec<T>> probes;
    for (const auto& c : out.cells) probes.push_back(c.interior);
    res.effective = is_effective(res, prob, probes);
    return out;
}

template <class T>
DivisionResult<T> exact_divide(const DivisionProblem<T>& prob, unsigned jobs = 1)
{
    return exact_divide_detailed(prob, jobs).result;
}

}  // namespace tropdiv
