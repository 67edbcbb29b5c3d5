#pragma once

/**
 * @file polyhedral.hpp
 * @brief H/V conversion by the double description method.
 *
 * Polyhedra live in R^n.  An HRep holds rows a^T z >= b; a VRep holds
 * vertices and rays (a line is stored as a pair of opposite rays).  Both
 * conversions homogenize to a cone in R^{n+1} with coordinates (y0, z) and
 * run the same incremental DD routine on it.
 */

#include "tropdiv/linprog.hpp"
#include "tropdiv/scalar.hpp"

#include <boost/dynamic_bitset.hpp>

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

namespace tropdiv {

template <class T>
struct HRow {
    Vec<T> a;
    T b;

    friend bool operator==(const HRow&, const HRow&) = default;
};

template <class T>
struct HRep {
    std::size_t dim = 0;
    std::vector<HRow<T>> rows;

    void add(Vec<T> a, T b)
    {
        if (a.size() != dim) throw std::invalid_argument("HRep row has wrong dimension");
        rows.push_back({std::move(a), std::move(b)});
    }
};

template <class T>
struct VRep {
    std::size_t dim = 0;
    std::vector<Vec<T>> vertices;
    std::vector<Vec<T>> rays;

    bool empty() const { return vertices.empty(); }
};

namespace detail {

template <class T>
bool lex_less(const Vec<T>& u, const Vec<T>& v)
{
    return std::lexicographical_compare(u.begin(), u.end(), v.begin(), v.end());
}

/// Positive rescaling so that the largest |entry| (double) or the first
/// nonzero |entry| (Rational) is 1.
template <class T>
void normalize_direction(Vec<T>& v)
{
    T s = 0;
    if constexpr (ScalarTraits<T>::exact) {
        for (const auto& x : v)
            if (x != 0) {
                s = ScalarTraits<T>::abs(x);
                break;
            }
    } else {
        for (const auto& x : v) s = std::max(s, ScalarTraits<T>::abs(x));
    }
    if (s == 0) return;
    for (auto& x : v) x /= s;
}

template <class T>
T dot_tol_zero(const Vec<T>& a, const Vec<T>& b)
{
    T s = dot(a, b);
    if constexpr (!ScalarTraits<T>::exact)
        if (ScalarTraits<T>::abs(s) <= ScalarTraits<T>::feas_tol()) s = 0;
    return s;
}

/// Rank of the given rows by Gaussian elimination.
template <class T>
std::size_t rank_of(std::vector<Vec<T>> m)
{
    if (m.empty()) return 0;
    const std::size_t cols = m[0].size();
    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < m.size(); ++c) {
        std::size_t piv = m.size();
        T best = 0;
        for (std::size_t i = r; i < m.size(); ++i) {
            T v = ScalarTraits<T>::abs(m[i][c]);
            if (v > best) {
                best = v;
                piv = i;
                if constexpr (ScalarTraits<T>::exact) break;
            }
        }
        if (piv == m.size() || best <= ScalarTraits<T>::pivot_tol()) continue;
        std::swap(m[r], m[piv]);
        for (std::size_t i = r + 1; i < m.size(); ++i) {
            if (m[i][c] == 0) continue;
            T f = m[i][c] / m[r][c];
            for (std::size_t k = c; k < cols; ++k) m[i][k] -= f * m[r][k];
        }
        ++r;
    }
    return r;
}

template <class T>
struct Cone {
    std::vector<Vec<T>> lines;
    std::vector<Vec<T>> rays;
};

/// Generators of {y in R^d : h_i^T y >= 0 for all i}.
template <class T>
Cone<T> double_description(std::size_t d, const std::vector<Vec<T>>& cons)
{
    Cone<T> cone;
    for (std::size_t k = 0; k < d; ++k) {
        Vec<T> e(d, T(0));
        e[k] = 1;
        cone.lines.push_back(std::move(e));
    }
    std::vector<boost::dynamic_bitset<>> zeros;  // per ray, over processed constraints
    std::vector<Vec<T>> done;

    for (const auto& h : cons) {
        if (h.size() != d) throw std::invalid_argument("constraint has wrong dimension");
        const std::size_t idx = done.size();

        std::size_t pick = cone.lines.size();
        for (std::size_t l = 0; l < cone.lines.size(); ++l)
            if (dot_tol_zero(h, cone.lines[l]) != 0) {
                pick = l;
                break;
            }

        if (pick < cone.lines.size()) {
            Vec<T> lstar = cone.lines[pick];
            T hl = dot(h, lstar);
            if (hl < 0) {
                for (auto& x : lstar) x = -x;
                hl = -hl;
            }
            auto eliminate = [&](Vec<T>& v) {
                T hv = dot(h, v);
                if (hv == 0) return;
                T f = hv / hl;
                for (std::size_t k = 0; k < d; ++k) v[k] -= f * lstar[k];
            };
            std::vector<Vec<T>> lines;
            for (std::size_t l = 0; l < cone.lines.size(); ++l)
                if (l != pick) {
                    eliminate(cone.lines[l]);
                    lines.push_back(std::move(cone.lines[l]));
                }
            cone.lines = std::move(lines);
            for (std::size_t r = 0; r < cone.rays.size(); ++r) {
                eliminate(cone.rays[r]);
                normalize_direction(cone.rays[r]);
                zeros[r].push_back(true);
            }
            // lstar is tight on every earlier constraint.
            normalize_direction(lstar);
            boost::dynamic_bitset<> z(idx + 1);
            z.set();
            z[idx] = false;
            cone.rays.push_back(std::move(lstar));
            zeros.push_back(std::move(z));
            done.push_back(h);
            continue;
        }

        std::vector<std::size_t> pos, neg, zer;
        std::vector<T> val(cone.rays.size());
        for (std::size_t r = 0; r < cone.rays.size(); ++r) {
            val[r] = dot_tol_zero(h, cone.rays[r]);
            if (val[r] > 0)
                pos.push_back(r);
            else if (val[r] < 0)
                neg.push_back(r);
            else
                zer.push_back(r);
        }
        if (neg.empty()) {
            for (std::size_t r = 0; r < cone.rays.size(); ++r) zeros[r].push_back(val[r] == 0);
            done.push_back(h);
            continue;
        }

        const std::size_t need = d - cone.lines.size() >= 2 ? d - cone.lines.size() - 2 : 0;
        std::vector<Vec<T>> rays;
        std::vector<boost::dynamic_bitset<>> rz;
        for (std::size_t r : pos) {
            rays.push_back(cone.rays[r]);
            rz.push_back(zeros[r]);
            rz.back().push_back(false);
        }
        for (std::size_t r : zer) {
            rays.push_back(cone.rays[r]);
            rz.push_back(zeros[r]);
            rz.back().push_back(true);
        }
        for (std::size_t rp : pos)
            for (std::size_t rn : neg) {
                auto common = zeros[rp] & zeros[rn];
                if (common.count() < need) continue;
                std::vector<Vec<T>> active;
                for (auto k = common.find_first(); k != boost::dynamic_bitset<>::npos; k = common.find_next(k))
                    active.push_back(done[k]);
                // Processed rows vanish on the lineality space, so adjacency
                // means the common tight rows cut out a 2-face modulo it.
                if (rank_of(std::move(active)) != need) continue;
                Vec<T> v(d);
                const T a = val[rp], b = -val[rn];
                for (std::size_t k = 0; k < d; ++k) v[k] = a * cone.rays[rn][k] + b * cone.rays[rp][k];
                normalize_direction(v);
                rays.push_back(std::move(v));
                rz.push_back(common);
                rz.back().push_back(true);
            }
        cone.rays = std::move(rays);
        zeros = std::move(rz);
        done.push_back(h);
    }
    return cone;
}

template <class T>
void sort_unique(std::vector<Vec<T>>& vs)
{
    std::sort(vs.begin(), vs.end(), lex_less<T>);
    vs.erase(std::unique(vs.begin(), vs.end()), vs.end());
}

}  // namespace detail

/// Scales each row so the first nonzero entry of a is +-1, then sorts and removes duplicates.
template <class T>
HRep<T> canonical(HRep<T> h)
{
    for (auto& row : h.rows) {
        T s = 0;
        for (const auto& x : row.a)
            if (sign_tol(x, ScalarTraits<T>::pivot_tol()) != 0) {
                s = ScalarTraits<T>::abs(x);
                break;
            }
        if (s == 0) continue;
        for (auto& x : row.a) x /= s;
        row.b /= s;
    }
    std::sort(h.rows.begin(), h.rows.end(), [](const HRow<T>& r, const HRow<T>& s) {
        if (r.a != s.a) return detail::lex_less(r.a, s.a);
        return r.b < s.b;
    });
    h.rows.erase(std::unique(h.rows.begin(), h.rows.end()), h.rows.end());
    return h;
}

/// Vertices and rays of {z : rows}.  Returns an empty VRep for an empty set.
template <class T>
VRep<T> vrep_of(const HRep<T>& h)
{
    const std::size_t n = h.dim, d = n + 1;
    if (n == 0) throw std::invalid_argument("vrep_of: zero dimension");
    std::vector<Vec<T>> cons;
    Vec<T> y0(d, T(0));
    y0[0] = 1;
    cons.push_back(y0);
    for (const auto& row : h.rows) {
        if (row.a.size() != n) throw std::invalid_argument("vrep_of: row dimension mismatch");
        Vec<T> c(d);
        c[0] = -row.b;
        for (std::size_t k = 0; k < n; ++k) c[k + 1] = row.a[k];
        cons.push_back(std::move(c));
    }
    auto cone = detail::double_description(d, cons);
    VRep<T> v;
    v.dim = n;
    const T tol = ScalarTraits<T>::feas_tol();
    bool has_point = false;
    for (const auto& r : cone.rays)
        if (r[0] > tol) has_point = true;
    if (!has_point) return v;
    for (const auto& r : cone.rays) {
        Vec<T> z(r.begin() + 1, r.end());
        if (r[0] > tol) {
            for (auto& x : z) x /= r[0];
            v.vertices.push_back(std::move(z));
        } else {
            detail::normalize_direction(z);
            v.rays.push_back(std::move(z));
        }
    }
    for (const auto& l : cone.lines) {
        // y0 >= 0 was processed first, so every line has y0 == 0.
        Vec<T> z(l.begin() + 1, l.end());
        detail::normalize_direction(z);
        Vec<T> mz = z;
        for (auto& x : mz) x = -x;
        v.rays.push_back(std::move(z));
        v.rays.push_back(std::move(mz));
    }
    detail::sort_unique(v.vertices);
    detail::sort_unique(v.rays);
    return v;
}

/// Facets (and equality pairs) of conv(vertices) + cone(rays).
template <class T>
HRep<T> hrep_of(const VRep<T>& v)
{
    const std::size_t n = v.dim, d = n + 1;
    if (v.vertices.empty()) throw std::invalid_argument("hrep_of: no vertices");
    std::vector<Vec<T>> gens;
    for (const auto& p : v.vertices) {
        if (p.size() != n) throw std::invalid_argument("hrep_of: vertex dimension mismatch");
        Vec<T> g(d);
        g[0] = 1;
        std::copy(p.begin(), p.end(), g.begin() + 1);
        gens.push_back(std::move(g));
    }
    for (const auto& r : v.rays) {
        if (r.size() != n) throw std::invalid_argument("hrep_of: ray dimension mismatch");
        Vec<T> g(d);
        g[0] = 0;
        std::copy(r.begin(), r.end(), g.begin() + 1);
        gens.push_back(std::move(g));
    }
    // Valid inequalities (h0, a) with h0*y0 + a^T z >= 0 on every generator.
    auto polar = detail::double_description(d, gens);
    HRep<T> h;
    h.dim = n;
    auto emit = [&](const Vec<T>& c) {
        Vec<T> a(c.begin() + 1, c.end());
        bool zero = std::all_of(a.begin(), a.end(), [](const T& x) { return sign_tol(x, ScalarTraits<T>::pivot_tol()) == 0; });
        if (zero) return;
        h.rows.push_back({std::move(a), T(-c[0])});
    };
    for (const auto& r : polar.rays) emit(r);
    for (const auto& l : polar.lines) {
        emit(l);
        Vec<T> m = l;
        for (auto& x : m) x = -x;
        emit(m);
    }
    return canonical(std::move(h));
}

template <class T>
bool contains_point(const HRep<T>& h, const Vec<T>& z)
{
    const T tol = ScalarTraits<T>::feas_tol();
    return std::all_of(h.rows.begin(), h.rows.end(), [&](const HRow<T>& r) { return dot(r.a, z) >= r.b - tol; });
}

template <class T>
bool contains_direction(const HRep<T>& h, const Vec<T>& r)
{
    const T tol = ScalarTraits<T>::feas_tol();
    return std::all_of(h.rows.begin(), h.rows.end(), [&](const HRow<T>& row) { return dot(row.a, r) >= -tol; });
}

/// Whether the set generated by v lies inside the set described by h.
template <class T>
bool contains(const HRep<T>& h, const VRep<T>& v)
{
    return std::all_of(v.vertices.begin(), v.vertices.end(), [&](const Vec<T>& p) { return contains_point(h, p); }) &&
           std::all_of(v.rays.begin(), v.rays.end(), [&](const Vec<T>& r) { return contains_direction(h, r); });
}

/// Set equality of two H-described polyhedra by mutual containment of generators.
template <class T>
bool same_set(const HRep<T>& h1, const HRep<T>& h2)
{
    auto v1 = vrep_of(h1), v2 = vrep_of(h2);
    if (v1.empty() || v2.empty()) return v1.empty() == v2.empty();
    return contains(h2, v1) && contains(h1, v2);
}

/// Closed convex hull of the union of the generated sets.
template <class T>
VRep<T> hull_of_union(const std::vector<VRep<T>>& parts)
{
    if (parts.empty()) throw std::invalid_argument("hull_of_union: no parts");
    VRep<T> all;
    all.dim = parts.front().dim;
    for (const auto& p : parts) {
        if (p.dim != all.dim) throw std::invalid_argument("hull_of_union: dimension mismatch");
        all.vertices.insert(all.vertices.end(), p.vertices.begin(), p.vertices.end());
        all.rays.insert(all.rays.end(), p.rays.begin(), p.rays.end());
    }
    if (all.vertices.empty()) return all;
    return vrep_of(hrep_of(all));
}

/// Whether z = sum lambda_i v_i + sum mu_k r_k with lambda in the simplex and mu >= 0.
template <class T>
bool in_resolution_form(const VRep<T>& v, const Vec<T>& z)
{
    const std::size_t nv = v.vertices.size(), nr = v.rays.size();
    if (nv == 0) return false;
    LinearProgram<T> lp(nv + nr);
    lp.set_nonnegative(0, nv + nr);
    for (std::size_t k = 0; k < v.dim; ++k) {
        Vec<T> row(nv + nr);
        for (std::size_t i = 0; i < nv; ++i) row[i] = v.vertices[i][k];
        for (std::size_t i = 0; i < nr; ++i) row[nv + i] = v.rays[i][k];
        lp.add_eq(std::move(row), z[k]);
    }
    Vec<T> ones(nv + nr, T(0));
    std::fill(ones.begin(), ones.begin() + static_cast<long>(nv), T(1));
    lp.add_eq(std::move(ones), T(1));
    return solve_lp(lp).optimal();
}

/// Indices of sample points on the lower convex hull of {(x_j, f_j)}.
/// Point j is dropped only when a convex combination of the other points at
/// x_j has a strictly smaller f-value; ties are kept.
template <class T>
std::vector<std::size_t> lower_hull_indices(const std::vector<Vec<T>>& xs, const Vec<T>& fs)
{
    if (xs.empty()) throw std::invalid_argument("lower_hull_indices: no points");
    if (xs.size() != fs.size()) throw std::invalid_argument("lower_hull_indices: size mismatch");
    const std::size_t N = xs.size(), n = xs[0].size();
    const T tol = ScalarTraits<T>::feas_tol();
    std::vector<std::size_t> J;
    for (std::size_t j = 0; j < N; ++j) {
        if (N == 1) {
            J.push_back(j);
            break;
        }
        LinearProgram<T> lp(N - 1);
        lp.set_nonnegative(0, N - 1);
        for (std::size_t k = 0, c = 0; k < N; ++k)
            if (k != j) lp.objective[c++] = -fs[k];
        for (std::size_t i = 0; i < n; ++i) {
            Vec<T> row(N - 1);
            for (std::size_t k = 0, c = 0; k < N; ++k)
                if (k != j) row[c++] = xs[k][i];
            lp.add_eq(std::move(row), xs[j][i]);
        }
        lp.add_eq(Vec<T>(N - 1, T(1)), T(1));
        auto out = solve_lp(lp);
        if (!out.optimal() || -out.value >= fs[j] - tol) J.push_back(j);
    }
    return J;
}

}  // namespace tropdiv
