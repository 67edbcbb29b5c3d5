#pragma once

/**
 * @file linprog.hpp
 * @brief Dense two-phase primal simplex.
 *
 * Problems are stated as
 *
 *     maximize   c^T v
 *     subject to G v <= h,  A v = b,  lower <= v <= upper
 *
 * where every bound is optional (a variable with neither bound is free).
 * Entering columns follow the largest-coefficient rule until a run of
 * degenerate pivots is seen, after which Bland's rule takes over for the rest
 * of the phase; this rules out cycling.  Over Rational the solver is exact.
 */

#include "tropdiv/scalar.hpp"

#include <algorithm>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace tropdiv {

enum class LpStatus { optimal, infeasible, unbounded };

inline const char* to_string(LpStatus s)
{
    switch (s) {
    case LpStatus::optimal: return "optimal";
    case LpStatus::infeasible: return "infeasible";
    case LpStatus::unbounded: return "unbounded";
    }
    return "?";
}

template <class T>
struct LinearProgram {
    std::size_t num_vars = 0;
    Vec<T> objective;
    std::vector<Vec<T>> ineq_lhs;
    Vec<T> ineq_rhs;
    std::vector<Vec<T>> eq_lhs;
    Vec<T> eq_rhs;
    std::vector<std::optional<T>> lower;
    std::vector<std::optional<T>> upper;

    LinearProgram() = default;
    explicit LinearProgram(std::size_t n)
        : num_vars(n), objective(n, T(0)), lower(n), upper(n) {}

    void add_le(Vec<T> row, T rhs)
    {
        check_row(row);
        ineq_lhs.push_back(std::move(row));
        ineq_rhs.push_back(std::move(rhs));
    }
    void add_ge(Vec<T> row, T rhs)
    {
        for (auto& v : row) v = -v;
        add_le(std::move(row), T(-rhs));
    }
    void add_eq(Vec<T> row, T rhs)
    {
        check_row(row);
        eq_lhs.push_back(std::move(row));
        eq_rhs.push_back(std::move(rhs));
    }
    void set_bounds(std::size_t j, std::optional<T> lo, std::optional<T> hi)
    {
        lower.at(j) = std::move(lo);
        upper.at(j) = std::move(hi);
    }
    void set_nonnegative(std::size_t first, std::size_t count)
    {
        for (std::size_t j = first; j < first + count; ++j) lower.at(j) = T(0);
    }

    /// Throws std::invalid_argument when dimensions disagree.
    void validate() const
    {
        if (objective.size() != num_vars) throw std::invalid_argument("LP objective size mismatch");
        if (ineq_lhs.size() != ineq_rhs.size() || eq_lhs.size() != eq_rhs.size())
            throw std::invalid_argument("LP row/rhs count mismatch");
        if (lower.size() != num_vars || upper.size() != num_vars)
            throw std::invalid_argument("LP bound vector size mismatch");
        for (const auto& r : ineq_lhs) check_row(r);
        for (const auto& r : eq_lhs) check_row(r);
        for (std::size_t j = 0; j < num_vars; ++j)
            if (lower[j] && upper[j] && *upper[j] < *lower[j])
                throw std::invalid_argument("LP bound interval is empty for variable " + std::to_string(j));
    }

private:
    void check_row(const Vec<T>& row) const
    {
        if (row.size() != num_vars)
            throw std::invalid_argument("LP row has " + std::to_string(row.size()) + " entries, expected " +
                                        std::to_string(num_vars));
    }
};

template <class T>
struct LpOutcome {
    LpStatus status = LpStatus::infeasible;
    Vec<T> x;
    T value = T(0);

    bool optimal() const { return status == LpStatus::optimal; }
};

namespace detail {

template <class T>
class Tableau {
public:
    Tableau(std::size_t rows, std::size_t cols) : m_(rows), n_(cols), stride_(cols + 1), data_(rows * (cols + 1), T(0)) {}

    T& at(std::size_t i, std::size_t j) { return data_[i * stride_ + j]; }
    const T& at(std::size_t i, std::size_t j) const { return data_[i * stride_ + j]; }
    T& rhs(std::size_t i) { return data_[i * stride_ + n_]; }
    const T& rhs(std::size_t i) const { return data_[i * stride_ + n_]; }
    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }

    void remove_row(std::size_t i)
    {
        data_.erase(data_.begin() + static_cast<std::ptrdiff_t>(i * stride_),
                    data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * stride_));
        --m_;
    }

private:
    std::size_t m_, n_, stride_;
    std::vector<T> data_;
};

template <class T>
class Simplex {
public:
    Simplex(Tableau<T> tab, std::vector<std::size_t> basis, std::size_t first_artificial)
        : tab_(std::move(tab)), basis_(std::move(basis)), first_art_(first_artificial), cost_(tab_.cols() + 1, T(0)) {}

    /// Loads a new objective (maximize c^T x over all columns) and prices out the basis.
    void set_objective(const Vec<T>& c)
    {
        for (std::size_t j = 0; j < tab_.cols(); ++j) cost_[j] = c[j];
        cost_[tab_.cols()] = 0;
        for (std::size_t i = 0; i < tab_.rows(); ++i) {
            T cb = c[basis_[i]];
            if (cb == 0) continue;
            for (std::size_t j = 0; j <= tab_.cols(); ++j) cost_[j] -= cb * entry(i, j);
        }
    }

    /// Runs pivots until optimal (true) or unbounded (false).
    bool optimize(std::size_t allowed_cols)
    {
        const T tol = ScalarTraits<T>::pivot_tol();
        bool bland = false;
        std::size_t degenerate_run = 0;
        constexpr std::size_t kDegenerateLimit = 64;
        for (;;) {
            std::size_t enter = allowed_cols;
            if (bland) {
                for (std::size_t j = 0; j < allowed_cols; ++j)
                    if (cost_[j] > tol) {
                        enter = j;
                        break;
                    }
            } else {
                T best = tol;
                for (std::size_t j = 0; j < allowed_cols; ++j)
                    if (cost_[j] > best) {
                        best = cost_[j];
                        enter = j;
                    }
            }
            if (enter == allowed_cols) return true;

            std::size_t leave = tab_.rows();
            T best_ratio = 0;
            for (std::size_t i = 0; i < tab_.rows(); ++i) {
                const T& a = tab_.at(i, enter);
                if (!(a > tol)) continue;
                T ratio = tab_.rhs(i) / a;
                if (leave == tab_.rows() || ratio < best_ratio ||
                    (ratio == best_ratio && basis_[i] < basis_[leave])) {
                    leave = i;
                    best_ratio = ratio;
                }
            }
            if (leave == tab_.rows()) return false;
            if (best_ratio <= tol) {
                if (++degenerate_run >= kDegenerateLimit) bland = true;
            } else {
                degenerate_run = 0;
            }
            pivot(leave, enter);
        }
    }

    void pivot(std::size_t r, std::size_t c)
    {
        const std::size_t ncols = tab_.cols();
        T inv = T(1) / tab_.at(r, c);
        std::vector<std::size_t> nz;
        nz.reserve(ncols + 1);
        for (std::size_t j = 0; j <= ncols; ++j) {
            T& v = entry(r, j);
            if (v != 0) {
                v *= inv;
                nz.push_back(j);
            }
        }
        entry(r, c) = 1;
        for (std::size_t i = 0; i < tab_.rows(); ++i) {
            if (i == r) continue;
            T f = tab_.at(i, c);
            if (f == 0) continue;
            for (std::size_t j : nz) entry(i, j) -= f * entry(r, j);
            tab_.at(i, c) = 0;
        }
        T f = cost_[c];
        if (f != 0) {
            for (std::size_t j : nz) cost_[j] -= f * entry(r, j);
            cost_[c] = 0;
        }
        basis_[r] = c;
    }

    /// Pivots basic artificials out; rows where that is impossible are redundant and dropped.
    void expel_artificials()
    {
        const T tol = ScalarTraits<T>::pivot_tol();
        for (std::size_t i = 0; i < tab_.rows();) {
            if (basis_[i] < first_art_) {
                ++i;
                continue;
            }
            std::size_t col = first_art_;
            T best = tol;
            for (std::size_t j = 0; j < first_art_; ++j) {
                T a = ScalarTraits<T>::abs(tab_.at(i, j));
                if (a > best) {
                    best = a;
                    col = j;
                }
            }
            if (col < first_art_) {
                pivot(i, col);
                ++i;
            } else {
                tab_.remove_row(i);
                basis_.erase(basis_.begin() + static_cast<std::ptrdiff_t>(i));
            }
        }
    }

    /// Current objective value (the tableau stores its negation).
    T objective_value() const { return -cost_[tab_.cols()]; }

    Vec<T> primal() const
    {
        Vec<T> x(tab_.cols(), T(0));
        for (std::size_t i = 0; i < tab_.rows(); ++i) x[basis_[i]] = tab_.rhs(i);
        return x;
    }

private:
    T& entry(std::size_t i, std::size_t j) { return j == tab_.cols() ? tab_.rhs(i) : tab_.at(i, j); }

    Tableau<T> tab_;
    std::vector<std::size_t> basis_;
    std::size_t first_art_;
    Vec<T> cost_;
};

}  // namespace detail

/// Solves the LP.  Throws std::invalid_argument on malformed dimensions.
template <class T>
LpOutcome<T> solve_lp(const LinearProgram<T>& lp)
{
    lp.validate();
    const std::size_t n = lp.num_vars;

    // Map every original variable onto nonnegative structural columns.
    enum class Kind { shifted, flipped, split };
    struct Map {
        Kind kind;
        std::size_t col;
        T offset;
    };
    std::vector<Map> map;
    map.reserve(n);
    std::size_t ns = 0;
    for (std::size_t j = 0; j < n; ++j) {
        if (lp.lower[j]) {
            map.push_back({Kind::shifted, ns++, *lp.lower[j]});
        } else if (lp.upper[j]) {
            map.push_back({Kind::flipped, ns++, *lp.upper[j]});
        } else {
            map.push_back({Kind::split, ns, T(0)});
            ns += 2;
        }
    }

    struct Row {
        Vec<T> coef;
        T rhs;
        bool equality;
    };
    std::vector<Row> rows;
    auto substitute = [&](const Vec<T>& orig, T rhs, bool eq) {
        Row r{Vec<T>(ns, T(0)), std::move(rhs), eq};
        for (std::size_t j = 0; j < n; ++j) {
            const T& a = orig[j];
            if (a == 0) continue;
            const Map& m = map[j];
            switch (m.kind) {
            case Kind::shifted:
                r.coef[m.col] += a;
                r.rhs -= a * m.offset;
                break;
            case Kind::flipped:
                r.coef[m.col] -= a;
                r.rhs -= a * m.offset;
                break;
            case Kind::split:
                r.coef[m.col] += a;
                r.coef[m.col + 1] -= a;
                break;
            }
        }
        rows.push_back(std::move(r));
    };
    for (std::size_t i = 0; i < lp.ineq_lhs.size(); ++i) substitute(lp.ineq_lhs[i], lp.ineq_rhs[i], false);
    for (std::size_t i = 0; i < lp.eq_lhs.size(); ++i) substitute(lp.eq_lhs[i], lp.eq_rhs[i], true);
    for (std::size_t j = 0; j < n; ++j)
        if (lp.lower[j] && lp.upper[j]) {
            Row r{Vec<T>(ns, T(0)), T(*lp.upper[j] - *lp.lower[j]), false};
            r.coef[map[j].col] = 1;
            rows.push_back(std::move(r));
        }

    const std::size_t m = rows.size();
    std::size_t n_slack = 0;
    for (const auto& r : rows)
        if (!r.equality) ++n_slack;
    std::vector<bool> needs_art(m, false);
    std::size_t n_art = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (rows[i].rhs < 0) {
            for (auto& v : rows[i].coef) v = -v;
            rows[i].rhs = -rows[i].rhs;
            needs_art[i] = true;
        } else if (rows[i].equality) {
            needs_art[i] = true;
        }
        if (needs_art[i]) ++n_art;
    }

    const std::size_t first_slack = ns;
    const std::size_t first_art = ns + n_slack;
    const std::size_t ncols = first_art + n_art;
    detail::Tableau<T> tab(m, ncols);
    std::vector<std::size_t> basis(m);
    std::size_t slack = first_slack, art = first_art;
    for (std::size_t i = 0; i < m; ++i) {
        const bool flipped = needs_art[i] && !rows[i].equality;
        for (std::size_t j = 0; j < ns; ++j) tab.at(i, j) = rows[i].coef[j];
        tab.rhs(i) = rows[i].rhs;
        if (!rows[i].equality) {
            tab.at(i, slack) = flipped ? T(-1) : T(1);
            if (!needs_art[i]) basis[i] = slack;
            ++slack;
        }
        if (needs_art[i]) {
            tab.at(i, art) = 1;
            basis[i] = art++;
        }
    }

    detail::Simplex<T> sx(std::move(tab), std::move(basis), first_art);
    LpOutcome<T> out;
    if (n_art > 0) {
        Vec<T> phase1(ncols, T(0));
        for (std::size_t j = first_art; j < ncols; ++j) phase1[j] = -1;
        sx.set_objective(phase1);
        sx.optimize(ncols);
        T scale = 1;
        for (const auto& r : rows) scale = std::max(scale, ScalarTraits<T>::abs(r.rhs));
        if (sx.objective_value() < -ScalarTraits<T>::feas_tol() * scale) {
            out.status = LpStatus::infeasible;
            return out;
        }
        sx.expel_artificials();
    }

    Vec<T> phase2(ncols, T(0));
    T constant = 0;
    for (std::size_t j = 0; j < n; ++j) {
        const T& c = lp.objective[j];
        if (c == 0) continue;
        const Map& mp = map[j];
        switch (mp.kind) {
        case Kind::shifted:
            phase2[mp.col] += c;
            constant += c * mp.offset;
            break;
        case Kind::flipped:
            phase2[mp.col] -= c;
            constant += c * mp.offset;
            break;
        case Kind::split:
            phase2[mp.col] += c;
            phase2[mp.col + 1] -= c;
            break;
        }
    }
    sx.set_objective(phase2);
    if (!sx.optimize(first_art)) {
        out.status = LpStatus::unbounded;
        return out;
    }

    Vec<T> cols = sx.primal();
    out.x.assign(n, T(0));
    for (std::size_t j = 0; j < n; ++j) {
        const Map& mp = map[j];
        switch (mp.kind) {
        case Kind::shifted: out.x[j] = mp.offset + cols[mp.col]; break;
        case Kind::flipped: out.x[j] = mp.offset - cols[mp.col]; break;
        case Kind::split: out.x[j] = cols[mp.col] - cols[mp.col + 1]; break;
        }
    }
    out.value = dot(lp.objective, out.x);
    out.status = LpStatus::optimal;
    return out;
}

/// Largest violation of any row or bound by x (0 when feasible).
template <class T>
T max_violation(const LinearProgram<T>& lp, const Vec<T>& x)
{
    T worst = 0;
    for (std::size_t i = 0; i < lp.ineq_lhs.size(); ++i) worst = std::max(worst, T(dot(lp.ineq_lhs[i], x) - lp.ineq_rhs[i]));
    for (std::size_t i = 0; i < lp.eq_lhs.size(); ++i)
        worst = std::max(worst, ScalarTraits<T>::abs(T(dot(lp.eq_lhs[i], x) - lp.eq_rhs[i])));
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
        if (lp.lower[j]) worst = std::max(worst, T(*lp.lower[j] - x[j]));
        if (lp.upper[j]) worst = std::max(worst, T(x[j] - *lp.upper[j]));
    }
    return worst;
}

}  // namespace tropdiv
