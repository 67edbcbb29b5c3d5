#pragma once

/**
 * @file newton.hpp
 * @brief Newton polytopes in extended form and the coefficient set C.
 *
 * A Newton polytope is described as {sum_v F_v alpha_v : A_v alpha_v <= beta_v}
 * (Minkowski sum of components) or, for a max of components, with the right
 * hand sides scaled by convex weights lambda_v.  The convex hull of a point
 * list and the zonotope of a sum of ReLU units are both special cases.
 *
 * C = {c : c + Newt(d) is contained in Newt(p)} is written as linear
 * constraints on c with auxiliary variables, one block per divisor term.
 */

#include "tropdiv/division.hpp"
#include "tropdiv/linprog.hpp"

#include <optional>
#include <stdexcept>
#include <vector>

namespace tropdiv {

template <class T>
struct NewtonComponent {
    std::vector<Vec<T>> F;   ///< generator columns, each of length n
    std::vector<Vec<T>> A;   ///< rows over alpha (length F.size())
    Vec<T> beta;

    std::size_t width() const { return F.size(); }
};

enum class Combination { sum, max };

template <class T>
struct ExtendedNewtonRep {
    std::size_t dim = 0;
    Combination combination = Combination::sum;
    std::vector<NewtonComponent<T>> components;

    std::size_t aux_count() const
    {
        std::size_t k = 0;
        for (const auto& c : components) k += c.width();
        if (combination == Combination::max) k += components.size();
        return k;
    }

    /// Adds "target = point of this polytope" where target_k = sum_t coef_t * v[col_t] + shift_k.
    /// `first_aux` is the first free LP column reserved for this block.
    void constrain(LinearProgram<T>& lp, std::size_t target_col, const Vec<T>& shift, std::size_t first_aux) const
    {
        const std::size_t nv = lp.num_vars;
        std::size_t col = first_aux;
        std::vector<std::size_t> start;
        for (const auto& c : components) {
            start.push_back(col);
            col += c.width();
        }
        const std::size_t lambda0 = col;
        for (std::size_t k = 0; k < dim; ++k) {
            // a_k + shift_k = sum F alpha  ->  a_k - sum F alpha = -shift_k
            Vec<T> row(nv, T(0));
            row[target_col + k] = 1;
            for (std::size_t v = 0; v < components.size(); ++v)
                for (std::size_t t = 0; t < components[v].width(); ++t) row[start[v] + t] = -components[v].F[t][k];
            lp.add_eq(std::move(row), T(-shift[k]));
        }
        for (std::size_t v = 0; v < components.size(); ++v) {
            const auto& c = components[v];
            for (std::size_t r = 0; r < c.A.size(); ++r) {
                const auto& arow = c.A[r];
                std::size_t nz = 0, at = 0;
                for (std::size_t t = 0; t < arow.size(); ++t)
                    if (arow[t] != 0) {
                        ++nz;
                        at = t;
                    }
                if (combination == Combination::sum && nz == 1) {
                    // single-variable row becomes a bound
                    const T bound = c.beta[r] / arow[at];
                    auto& lo = lp.lower[start[v] + at];
                    auto& hi = lp.upper[start[v] + at];
                    if (arow[at] > 0) {
                        if (!hi || bound < *hi) hi = bound;
                    } else {
                        if (!lo || bound > *lo) lo = bound;
                    }
                    continue;
                }
                Vec<T> row(nv, T(0));
                for (std::size_t t = 0; t < arow.size(); ++t) row[start[v] + t] = arow[t];
                if (combination == Combination::max) {
                    row[lambda0 + v] = -c.beta[r];
                    lp.add_le(std::move(row), T(0));
                } else {
                    lp.add_le(std::move(row), c.beta[r]);
                }
            }
        }
        if (combination == Combination::max) {
            Vec<T> row(nv, T(0));
            for (std::size_t v = 0; v < components.size(); ++v) {
                row[lambda0 + v] = 1;
                lp.lower[lambda0 + v] = T(0);
            }
            lp.add_eq(std::move(row), T(1));
        }
    }
};

/// conv(points) as a single component with convex weights.
template <class T>
ExtendedNewtonRep<T> hull_rep(const std::vector<Vec<T>>& points)
{
    if (points.empty()) throw std::invalid_argument("hull_rep: no points");
    ExtendedNewtonRep<T> rep;
    rep.dim = points[0].size();
    NewtonComponent<T> c;
    c.F = points;
    const std::size_t k = points.size();
    for (std::size_t t = 0; t < k; ++t) {
        Vec<T> row(k, T(0));
        row[t] = -1;
        c.A.push_back(std::move(row));
        c.beta.push_back(T(0));
    }
    c.A.push_back(Vec<T>(k, T(1)));
    c.beta.push_back(T(1));
    c.A.push_back(Vec<T>(k, T(-1)));
    c.beta.push_back(T(-1));
    rep.components.push_back(std::move(c));
    return rep;
}

/// Segment [0, a] as {alpha a : 0 <= alpha <= 1}.
template <class T>
NewtonComponent<T> segment_component(Vec<T> a)
{
    NewtonComponent<T> c;
    c.F = {std::move(a)};
    c.A = {{T(1)}, {T(-1)}};
    c.beta = {T(1), T(0)};
    return c;
}

/// Zonotope sum_v [0, a_v]: the Newton polytope of sum_v max(a_v^T x + b_v, 0).
template <class T>
ExtendedNewtonRep<T> zonotope_rep(const std::vector<Vec<T>>& generators, std::size_t dim)
{
    ExtendedNewtonRep<T> rep;
    rep.dim = dim;
    for (const auto& g : generators) {
        if (g.size() != dim) throw std::invalid_argument("zonotope_rep: generator dimension mismatch");
        rep.components.push_back(segment_component(g));
    }
    return rep;
}

/// Minkowski sum (combination = sum) or hull of union (combination = max) of reps.
template <class T>
ExtendedNewtonRep<T> combine_reps(const std::vector<ExtendedNewtonRep<T>>& parts, Combination how)
{
    if (parts.empty()) throw std::invalid_argument("combine_reps: no parts");
    ExtendedNewtonRep<T> rep;
    rep.dim = parts[0].dim;
    rep.combination = how;
    for (const auto& p : parts) {
        if (p.dim != rep.dim) throw std::invalid_argument("combine_reps: dimension mismatch");
        if (p.combination == Combination::max && p.components.size() > 1 && how == Combination::sum)
            throw std::invalid_argument("combine_reps: nested max inside sum is not supported");
        if (how == Combination::max && p.components.size() > 1)
            throw std::invalid_argument("combine_reps: each part of a max must be a single component");
        rep.components.insert(rep.components.end(), p.components.begin(), p.components.end());
    }
    return rep;
}

/// Indices of the vertices of conv(points) (first occurrence of duplicates).
template <class T>
std::vector<std::size_t> extreme_point_indices(const std::vector<Vec<T>>& points)
{
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < points.size(); ++i) {
        bool dup = false;
        for (std::size_t k = 0; k < i && !dup; ++k) dup = points[k] == points[i];
        if (dup) continue;
        std::vector<Vec<T>> others;
        for (std::size_t k = 0; k < points.size(); ++k)
            if (k != i && points[k] != points[i]) others.push_back(points[k]);
        if (others.empty() || !in_convex_hull(others, points[i])) out.push_back(i);
    }
    return out;
}

template <class T>
std::vector<Vec<T>> extreme_points(const std::vector<Vec<T>>& points)
{
    std::vector<Vec<T>> out;
    for (auto i : extreme_point_indices(points)) out.push_back(points[i]);
    return out;
}

/// The set C of admissible quotient coefficients.
template <class T>
struct ConstraintSetC {
    ExtendedNewtonRep<T> newton;           ///< Newt(p)
    std::vector<Vec<T>> divisor_coeffs;    ///< the a~_j of d

    std::size_t dim() const { return newton.dim; }
    std::size_t aux_count() const { return newton.aux_count() * divisor_coeffs.size(); }

    /// Constrains LP columns [a_col, a_col + n) to C using columns from first_aux on.
    void add_to_lp(LinearProgram<T>& lp, std::size_t a_col, std::size_t first_aux) const
    {
        const std::size_t w = newton.aux_count();
        for (std::size_t j = 0; j < divisor_coeffs.size(); ++j)
            newton.constrain(lp, a_col, divisor_coeffs[j], first_aux + j * w);
    }

    bool contains(const Vec<T>& a) const
    {
        if (a.size() != dim()) throw std::invalid_argument("ConstraintSetC::contains: dimension mismatch");
        const std::size_t n = dim();
        LinearProgram<T> lp(n + aux_count());
        for (std::size_t k = 0; k < n; ++k) lp.set_bounds(k, a[k], a[k]);
        add_to_lp(lp, 0, n);
        return solve_lp(lp).optimal();
    }

    bool empty() const
    {
        const std::size_t n = dim();
        LinearProgram<T> lp(n + aux_count());
        add_to_lp(lp, 0, n);
        return !solve_lp(lp).optimal();
    }
};

/// C for simple p and d: extreme points of Newt(p) with convex weights per divisor term.
template <class T>
ConstraintSetC<T> build_constraints_C(const TropicalPolynomial<T>& p, const TropicalPolynomial<T>& d)
{
    require_same_dim(p, d, "build_constraints_C");
    ConstraintSetC<T> c;
    c.newton = hull_rep(extreme_points(newton_points(p)));
    c.divisor_coeffs = newton_points(d);
    return c;
}

/// C for a composite dividend given by its extended Newton representation.
template <class T>
ConstraintSetC<T> build_constraints_C(ExtendedNewtonRep<T> newt, std::vector<Vec<T>> divisor_coeffs)
{
    if (divisor_coeffs.empty()) divisor_coeffs.push_back(Vec<T>(newt.dim, T(0)));
    return {std::move(newt), std::move(divisor_coeffs)};
}

/// Numeric estimate of l(a) = inf_x f(x) - a^T x over the probe grid;
/// NEG_INF exactly when a lies outside C.
template <class T>
MaxPlus<T> lower_bound_l(const DivisionProblem<T>& prob, const Vec<T>& a, const std::vector<Vec<T>>& probes)
{
    if (a.size() != prob.dim()) throw std::invalid_argument("lower_bound_l: dimension mismatch");
    if (!build_constraints_C(prob.p, prob.d).contains(a)) return {};
    MaxPlus<T> best;
    bool first = true;
    for (const auto& x : probes) {
        auto v = prob.f(x);
        if (v.is_neg_inf()) return {};
        T val = v.value() - dot(a, x);
        if (first || val < best.value()) best = MaxPlus<T>(val);
        first = false;
    }
    return best;
}

}  // namespace tropdiv
