#pragma once

/**
 * @file composite.hpp
 * @brief Division with sums of ReLU units as dividend or quotient.
 *
 * A composite polynomial is sum_v max(a_v^T x + b_v, 0).  Its Newton polytope
 * is the zonotope sum_v [0, a_v].  Three procedures live here: the maxout
 * quotient of a composite dividend (clustering with zonotope constraints), the
 * ReLU-sum quotient by conditional gradient, and the box threshold rule used
 * for vectors of composites.
 */

#include "tropdiv/approx_division.hpp"
#include "tropdiv/exact_division.hpp"
#include "tropdiv/newton.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace tropdiv {

template <class T>
struct CompositePolynomial {
    std::size_t dim = 0;
    std::vector<TropicalTerm<T>> units;  ///< (a_v, b_v) with finite b_v

    CompositePolynomial() = default;
    CompositePolynomial(std::size_t n, std::vector<TropicalTerm<T>> us) : dim(n), units(std::move(us))
    {
        if (dim == 0) throw std::invalid_argument("CompositePolynomial: dim must be >= 1");
        for (const auto& u : units) {
            if (u.a.size() != dim) throw std::invalid_argument("CompositePolynomial: unit dimension mismatch");
            if (u.b.is_neg_inf()) throw std::invalid_argument("CompositePolynomial: unit bias must be finite");
        }
    }

    std::size_t size() const { return units.size(); }

    T eval(const Vec<T>& x) const
    {
        if (x.size() != dim) throw std::invalid_argument("CompositePolynomial::eval: dimension mismatch");
        T s(0);
        for (const auto& u : units) {
            T v = dot(u.a, x) + u.b.value();
            if (v > 0) s += v;
        }
        return s;
    }

    /// Expanded simple form: one term per subset of units (2^N terms, small N only).
    TropicalPolynomial<T> expand() const
    {
        if (units.size() > 16) throw std::invalid_argument("CompositePolynomial::expand: too many units");
        auto acc = TropicalPolynomial<T>::constant(dim, T(0));
        for (const auto& u : units) {
            auto unit = TropicalPolynomial<T>(dim, {u, {Vec<T>(dim, T(0)), MaxPlus<T>(T(0))}});
            acc = tropical_sum(acc, unit);
        }
        return acc;
    }
};

/// Extended representation of the Minkowski sum of the unit segments.
template <class T>
ExtendedNewtonRep<T> minkowski_newton(const CompositePolynomial<T>& p)
{
    if (p.units.empty()) throw std::invalid_argument("minkowski_newton: no units");
    std::vector<Vec<T>> gens;
    for (const auto& u : p.units) gens.push_back(u.a);
    return zonotope_rep(gens, p.dim);
}

/// Maxout quotient of a composite dividend by a simple divisor (d = 0 when empty).
inline ClusterRun approx_divide_composite(const CompositePolynomial<double>& p, const TropicalPolynomial<double>& d,
                                       const ApproxConfig& cfg, std::vector<Vec<double>> xs)
{
    if (d.dim() != p.dim) throw std::invalid_argument("approx_divide_composite: dimension mismatch");
    Vec<double> fs;
    for (const auto& x : xs) {
        auto dv = d.eval(x);
        if (dv.is_neg_inf()) throw std::domain_error("divisor evaluates to NEG_INF");
        fs.push_back(p.eval(x) - dv.value());
    }
    cfg.validate(xs.size());
    auto C = build_constraints_C(minkowski_newton(p), newton_points(d));
    SampleSet s(std::move(xs), std::move(fs));
    return run_clustering_multistart(s, C, cfg);
}

// ---------------------------------------------------------------------------
// ReLU-sum quotient.  With A = [a_1 .. a_n] invertible and alpha_i = A^{-1} a^_i,
// q <= p everywhere iff alpha_i >= 0, sum_i alpha_i <= 1 and b^_i <= B^T alpha_i.

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct UnitBasis {
    Matrix A;  ///< columns a_i
    Vector B;  ///< biases b_i
    Eigen::FullPivLU<Matrix> lu;

    explicit UnitBasis(const CompositePolynomial<double>& p, double rank_tol = 1e-8)
    {
        const auto n = static_cast<Eigen::Index>(p.dim);
        if (p.units.size() != p.dim)
            throw std::invalid_argument("UnitBasis: need exactly as many units as dimensions (reduce first)");
        A.resize(n, n);
        B.resize(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            for (Eigen::Index k = 0; k < n; ++k) A(k, i) = p.units[static_cast<std::size_t>(i)].a[static_cast<std::size_t>(k)];
            B(i) = p.units[static_cast<std::size_t>(i)].b.value();
        }
        lu.compute(A);
        lu.setThreshold(rank_tol);
        if (lu.rank() < n) throw std::invalid_argument("UnitBasis: unit coefficient vectors are linearly dependent");
    }

    Vector coords(const Vec<double>& a) const { return lu.solve(Eigen::Map<const Vector>(a.data(), static_cast<Eigen::Index>(a.size()))); }
};

inline Vector to_eigen(const Vec<double>& v) { return Eigen::Map<const Vector>(v.data(), static_cast<Eigen::Index>(v.size())); }
inline Vec<double> from_eigen(const Vector& v) { return Vec<double>(v.data(), v.data() + v.size()); }

/// Sufficient and necessary condition for sum_i max(a^_i x + b^_i, 0) <= p(x).
inline bool unit_basis_feasible(const UnitBasis& basis, const std::vector<TropicalTerm<double>>& cand, double tol = 1e-9)
{
    const auto n = basis.A.rows();
    Vector total = Vector::Zero(n);
    for (const auto& t : cand) {
        if (t.a.size() != static_cast<std::size_t>(n)) throw std::invalid_argument("unit_basis_feasible: dimension mismatch");
        Vector alpha = basis.coords(t.a);
        if ((alpha.array() < -tol).any()) return false;
        if (t.b.value() > basis.B.dot(alpha) + tol) return false;
        total += alpha;
    }
    return !(total.array() > 1 + tol).any();
}

inline bool unit_basis_feasible(const CompositePolynomial<double>& p, const std::vector<TropicalTerm<double>>& cand, double tol = 1e-9)
{
    return unit_basis_feasible(UnitBasis(p), cand, tol);
}

/// Exact optimum of the Phase 2 LP.  c1[i] is the sample sum for unit i and
/// c2[i] >= 0 its active count.  b^_i sits at its bound B^T alpha_i; then each
/// coordinate k is an independent LP over {alpha_.k >= 0, sum_i alpha_ik <= 1}
/// whose optimum is the best of its m+1 vertices.  Ties go to the lowest index.
inline std::vector<TropicalTerm<double>> analytic_phase2(const std::vector<Vec<double>>& c1, const Vec<double>& c2,
                                                          const UnitBasis& basis)
{
    const std::size_t m = c1.size();
    if (c2.size() != m) throw std::invalid_argument("analytic_phase2: c1/c2 size mismatch");
    const auto n = basis.A.rows();
    std::vector<Vector> g(m);
    for (std::size_t i = 0; i < m; ++i) {
        if (c2[i] < 0) throw std::invalid_argument("analytic_phase2: negative count coefficient");
        g[i] = basis.A.transpose() * to_eigen(c1[i]) + c2[i] * basis.B;
    }
    std::vector<Vector> alpha(m, Vector::Zero(n));
    for (Eigen::Index k = 0; k < n; ++k) {
        std::optional<std::size_t> best;
        for (std::size_t i = 0; i < m; ++i)
            if (g[i](k) > 0 && (!best || g[i](k) > g[*best](k))) best = i;
        if (best) alpha[*best](k) = 1;
    }
    std::vector<TropicalTerm<double>> out;
    for (std::size_t i = 0; i < m; ++i)
        out.push_back({from_eigen(basis.A * alpha[i]), MaxPlus<double>(basis.B.dot(alpha[i]))});
    return out;
}

struct FwConfig {
    std::size_t terms = 1;
    double rho = 0.2;
    std::size_t iterations = 50;
    std::uint64_t seed = 0;
    std::optional<std::vector<TropicalTerm<double>>> initial;

    void validate() const
    {
        if (!(rho > 0 && rho < 1)) throw std::invalid_argument("FwConfig: rho must lie in (0, 1)");
        if (terms < 1) throw std::invalid_argument("FwConfig: terms must be >= 1");
    }
};

struct FwResult {
    CompositePolynomial<double> quotient;
    std::vector<double> objective;  ///< sum_j q(x_j) after each update
    bool feasible_throughout = true;
};

inline double composite_objective(const CompositePolynomial<double>& q, const std::vector<Vec<double>>& xs)
{
    double s = 0;
    for (const auto& x : xs) s += q.eval(x);
    return s;
}

/// Random feasible start: alpha_ik = u_ik / m with u uniform in [0, 1].
inline std::vector<TropicalTerm<double>> fw_initial_terms(const UnitBasis& basis, std::size_t m, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    const auto n = basis.A.rows();
    std::vector<TropicalTerm<double>> out;
    for (std::size_t i = 0; i < m; ++i) {
        Vector alpha(n);
        for (Eigen::Index k = 0; k < n; ++k) alpha(k) = u(rng) / static_cast<double>(m);
        out.push_back({from_eigen(basis.A * alpha), MaxPlus<double>(basis.B.dot(alpha))});
    }
    return out;
}

inline FwResult composite_quotient_fw(const CompositePolynomial<double>& p, const std::vector<Vec<double>>& xs,
                                      const FwConfig& cfg)
{
    cfg.validate();
    if (xs.empty()) throw std::invalid_argument("composite_quotient_fw: no samples");
    UnitBasis basis(p);
    auto terms = cfg.initial ? *cfg.initial : fw_initial_terms(basis, cfg.terms, cfg.seed);
    if (terms.size() != cfg.terms) throw std::invalid_argument("composite_quotient_fw: initial term count differs from terms");
    FwResult res;
    res.feasible_throughout = unit_basis_feasible(basis, terms, 1e-7);
    const std::size_t n = p.dim, m = terms.size();
    for (std::size_t it = 0; it < cfg.iterations; ++it) {
        // Phase 1: active sets
        std::vector<Vec<double>> c1(m, Vec<double>(n, 0.0));
        Vec<double> c2(m, 0.0);
        for (const auto& x : xs)
            for (std::size_t i = 0; i < m; ++i)
                if (dot(terms[i].a, x) + terms[i].b.value() >= 0) {
                    for (std::size_t k = 0; k < n; ++k) c1[i][k] += x[k];
                    c2[i] += 1;
                }
        // Phase 2 and the convex-combination step
        auto next = analytic_phase2(c1, c2, basis);
        for (std::size_t i = 0; i < m; ++i) {
            for (std::size_t k = 0; k < n; ++k) terms[i].a[k] = (1 - cfg.rho) * terms[i].a[k] + cfg.rho * next[i].a[k];
            terms[i].b = MaxPlus<double>((1 - cfg.rho) * terms[i].b.value() + cfg.rho * next[i].b.value());
        }
        res.feasible_throughout = res.feasible_throughout && unit_basis_feasible(basis, terms, 1e-7);
        res.objective.push_back(composite_objective(CompositePolynomial<double>(n, terms), xs));
    }
    res.quotient = CompositePolynomial<double>(n, terms);
    return res;
}

// ---------------------------------------------------------------------------
// Vector of composites sum_i wbar_i max(z_i, 0): C is the box [0, wbar] and b^ = 0.

/// argmax of s^T a over 0 <= a <= wbar.
inline Vec<double> threshold_rule(const Vec<double>& wbar, const Vec<double>& s)
{
    if (wbar.size() != s.size()) throw std::invalid_argument("threshold_rule: size mismatch");
    Vec<double> a(wbar.size(), 0.0);
    for (std::size_t i = 0; i < wbar.size(); ++i) {
        if (wbar[i] < 0) throw std::invalid_argument("threshold_rule: negative weight");
        if (s[i] > 0) a[i] = wbar[i];
    }
    return a;
}

struct VectorDivision {
    std::vector<Vec<double>> terms;  ///< a^_l, bias fixed at 0
    std::vector<double> error_trace;
};

/// Alternating clustering for one class: terms from the threshold rule on
/// cluster sums, clusters by argmax (lowest index on ties).
inline VectorDivision vector_divide_simplified(const Vec<double>& wbar, const std::vector<Vec<double>>& zs,
                                               std::size_t terms, std::size_t iterations, std::uint64_t seed)
{
    if (terms < 1) throw std::invalid_argument("vector_divide_simplified: terms must be >= 1");
    if (zs.size() < terms) throw std::invalid_argument("vector_divide_simplified: fewer samples than terms");
    const std::size_t M = wbar.size(), N = zs.size();
    for (const auto& z : zs)
        if (z.size() != M) throw std::invalid_argument("vector_divide_simplified: sample dimension mismatch");
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<std::size_t> pick(0, terms - 1);
    std::vector<std::size_t> assign(N);
    for (auto& a : assign) a = pick(rng);
    repair_empty_clusters(assign, terms, rng);

    auto target = [&](const Vec<double>& z) {
        double v = 0;
        for (std::size_t i = 0; i < M; ++i) v += wbar[i] * std::max(z[i], 0.0);
        return v;
    };
    VectorDivision out;
    for (std::size_t it = 0; it < std::max<std::size_t>(iterations, 1); ++it) {
        std::vector<Vec<double>> sums(terms, Vec<double>(M, 0.0));
        for (std::size_t j = 0; j < N; ++j)
            for (std::size_t i = 0; i < M; ++i) sums[assign[j]][i] += zs[j][i];
        out.terms.assign(terms, Vec<double>{});
        for (std::size_t l = 0; l < terms; ++l) out.terms[l] = threshold_rule(wbar, sums[l]);
        double e = 0;
        std::vector<std::size_t> next(N);
        for (std::size_t j = 0; j < N; ++j) {
            double best = -std::numeric_limits<double>::infinity();
            for (std::size_t l = 0; l < terms; ++l)
                if (double v = dot(out.terms[l], zs[j]); v > best) {
                    best = v;
                    next[j] = l;
                }
            e += target(zs[j]) - best;
        }
        out.error_trace.push_back(e);
        repair_empty_clusters(next, terms, rng);
        if (next == assign) break;
        assign = std::move(next);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Pointwise checks of the quotient inequalities on a grid, via exact division.

struct InequalityCheck {
    std::string name;
    bool holds = true;               ///< lhs >= rhs at every grid point
    bool equality_expected = false;
    bool equal = true;               ///< lhs == rhs at every grid point
    std::optional<Vec<Rational>> witness;  ///< first violating point
};

using QFn = std::function<MaxPlus<Rational>(const Vec<Rational>&)>;

inline InequalityCheck compare_on_grid(std::string name, const QFn& lhs, const QFn& rhs, const std::vector<Vec<Rational>>& grid,
                                       bool equality_expected)
{
    InequalityCheck c;
    c.name = std::move(name);
    c.equality_expected = equality_expected;
    for (const auto& x : grid) {
        auto l = lhs(x), r = rhs(x);
        if (l < r) {
            c.holds = false;
            if (!c.witness) c.witness = x;
        }
        if (!(l == r)) c.equal = false;
    }
    return c;
}

inline bool remainder_neg_inf(const TropicalPolynomial<Rational>& p, const TropicalPolynomial<Rational>& d)
{
    return exact_divide(DivisionProblem<Rational>(p, d)).remainder.is_neg_inf();
}

/// Q(p1+p2, d) >= Q(p1, d) + Q(p2, d) + d and Q(p1 v p2, d) >= Q(p1, d) v Q(p2, d).
inline std::vector<InequalityCheck> check_dividend_inequalities(const TropicalPolynomial<Rational>& p1,
                                                                const TropicalPolynomial<Rational>& p2,
                                                                const TropicalPolynomial<Rational>& d,
                                                                const std::vector<Vec<Rational>>& grid)
{
    using P = DivisionProblem<Rational>;
    auto q1 = exact_divide(P(p1, d)).quotient, q2 = exact_divide(P(p2, d)).quotient;
    auto qs = exact_divide(P(tropical_sum(p1, p2), d)).quotient;
    auto qm = exact_divide(P(tropical_max(p1, p2), d)).quotient;
    const bool eq = remainder_neg_inf(p1, d) && remainder_neg_inf(p2, d);
    return {
        compare_on_grid("sum of dividends", [&](const Vec<Rational>& x) { return qs.eval(x); },
                        [&](const Vec<Rational>& x) { return q1.eval(x) + q2.eval(x) + d.eval(x); }, grid, eq),
        compare_on_grid("max of dividends", [&](const Vec<Rational>& x) { return qm.eval(x); },
                        [&](const Vec<Rational>& x) { return max(q1.eval(x), q2.eval(x)); }, grid, eq),
    };
}

/// Q(p, d1+d2) >= Q(p, d1) + Q(p, d2) - p and Q(p, d1 v d2) >= Q(p, d1) ^ Q(p, d2).
inline std::vector<InequalityCheck> check_divisor_inequalities(const TropicalPolynomial<Rational>& p,
                                                               const TropicalPolynomial<Rational>& d1,
                                                               const TropicalPolynomial<Rational>& d2,
                                                               const std::vector<Vec<Rational>>& grid)
{
    using P = DivisionProblem<Rational>;
    auto q1 = exact_divide(P(p, d1)).quotient, q2 = exact_divide(P(p, d2)).quotient;
    auto qs = exact_divide(P(p, tropical_sum(d1, d2))).quotient;
    auto qm = exact_divide(P(p, tropical_max(d1, d2))).quotient;
    const bool eq = remainder_neg_inf(p, d1) && remainder_neg_inf(p, d2);
    return {
        compare_on_grid("sum of divisors", [&](const Vec<Rational>& x) { return qs.eval(x); },
                        [&](const Vec<Rational>& x) {
                            auto pv = p.eval(x);
                            return pv.is_neg_inf() ? MaxPlus<Rational>() : (q1.eval(x) + q2.eval(x)) - pv.value();
                        },
                        grid, eq),
        compare_on_grid("max of divisors", [&](const Vec<Rational>& x) { return qm.eval(x); },
                        [&](const Vec<Rational>& x) { return min(q1.eval(x), q2.eval(x)); }, grid, false),
    };
}

/// Q(p+s, d) = Q(p, d) + s = Q(p, d-s) for a monomial s.
inline std::vector<InequalityCheck> check_monomial_shift(const TropicalPolynomial<Rational>& p,
                                                         const TropicalPolynomial<Rational>& d,
                                                         const TropicalTerm<Rational>& s,
                                                         const std::vector<Vec<Rational>>& grid)
{
    using P = DivisionProblem<Rational>;
    const auto sp = TropicalPolynomial<Rational>(p.dim(), {s});
    TropicalTerm<Rational> neg{s.a, s.b};
    for (auto& v : neg.a) v = -v;
    neg.b = MaxPlus<Rational>(Rational(-s.b.value()));
    const auto sn = TropicalPolynomial<Rational>(p.dim(), {neg});
    auto q = exact_divide(P(p, d)).quotient;
    auto q_shift_p = exact_divide(P(tropical_sum(p, sp), d)).quotient;
    auto q_shift_d = exact_divide(P(p, tropical_sum(d, sn))).quotient;
    auto shifted = [&](const Vec<Rational>& x) { return q.eval(x) + sp.eval(x); };
    auto c1 = compare_on_grid("monomial times dividend", [&](const Vec<Rational>& x) { return q_shift_p.eval(x); }, shifted, grid, true);
    auto c2 = compare_on_grid("monomial over divisor", [&](const Vec<Rational>& x) { return q_shift_d.eval(x); }, shifted, grid, true);
    return {c1, c2};
}

}  // namespace tropdiv
