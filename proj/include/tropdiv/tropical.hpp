#pragma once

/**
 * @file tropical.hpp
 * @brief Max-plus polynomials: p(x) = max_i (a_i^T x + b_i).
 *
 * A polynomial is an immutable list of affine terms sharing one dimension.
 * The empty term list is the NEG_INF polynomial (the max-plus zero).  Term
 * biases live in R u {NEG_INF}; a NEG_INF-biased term never attains the max
 * and canonical() drops it.
 */

#include "tropdiv/linprog.hpp"
#include "tropdiv/scalar.hpp"

#include <algorithm>
#include <compare>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace tropdiv {

/// A value of R_max.  NEG_INF is a state, not a stored infinity.
template <class T>
class MaxPlus {
public:
    MaxPlus() = default;  // NEG_INF
    MaxPlus(T v) : v_(std::move(v)) {}
    template <class U>
        requires(!std::is_same_v<std::decay_t<U>, T> && std::is_arithmetic_v<U>)
    MaxPlus(U v) : v_(T(v)) {}

    static MaxPlus neg_inf() { return MaxPlus(); }

    bool is_neg_inf() const { return !v_.has_value(); }
    bool finite() const { return v_.has_value(); }
    const T& value() const
    {
        if (!v_) throw std::logic_error("value() of NEG_INF");
        return *v_;
    }

    friend MaxPlus operator+(const MaxPlus& a, const MaxPlus& b)
    {
        if (a.is_neg_inf() || b.is_neg_inf()) return {};
        return MaxPlus(T(*a.v_ + *b.v_));
    }
    /// Subtracting a finite value; NEG_INF stays NEG_INF.
    friend MaxPlus operator-(const MaxPlus& a, const T& b)
    {
        if (a.is_neg_inf()) return {};
        return MaxPlus(T(*a.v_ - b));
    }
    friend bool operator==(const MaxPlus& a, const MaxPlus& b)
    {
        if (a.is_neg_inf() || b.is_neg_inf()) return a.is_neg_inf() == b.is_neg_inf();
        return *a.v_ == *b.v_;
    }
    friend bool operator<(const MaxPlus& a, const MaxPlus& b)
    {
        if (b.is_neg_inf()) return false;
        if (a.is_neg_inf()) return true;
        return *a.v_ < *b.v_;
    }
    friend bool operator<=(const MaxPlus& a, const MaxPlus& b) { return !(b < a); }
    friend bool operator>(const MaxPlus& a, const MaxPlus& b) { return b < a; }
    friend bool operator>=(const MaxPlus& a, const MaxPlus& b) { return !(a < b); }

    friend MaxPlus max(const MaxPlus& a, const MaxPlus& b) { return a < b ? b : a; }
    friend MaxPlus min(const MaxPlus& a, const MaxPlus& b) { return a < b ? a : b; }

    std::string str() const { return is_neg_inf() ? std::string("-inf") : to_string(*v_); }
    friend std::ostream& operator<<(std::ostream& os, const MaxPlus& v) { return os << v.str(); }

private:
    std::optional<T> v_;
};

template <class T>
struct TropicalTerm {
    Vec<T> a;
    MaxPlus<T> b;

    MaxPlus<T> eval(const Vec<T>& x) const
    {
        if (b.is_neg_inf()) return {};
        return MaxPlus<T>(T(dot(a, x) + b.value()));
    }
};

template <class T>
bool terms_equal(const TropicalTerm<T>& s, const TropicalTerm<T>& t, const T& tol)
{
    if (s.a.size() != t.a.size()) return false;
    for (std::size_t k = 0; k < s.a.size(); ++k)
        if (!near(s.a[k], t.a[k], tol)) return false;
    if (s.b.is_neg_inf() || t.b.is_neg_inf()) return s.b.is_neg_inf() && t.b.is_neg_inf();
    return near(s.b.value(), t.b.value(), tol);
}

/// Lexicographic on (a, b) with NEG_INF biases first.
template <class T>
bool term_less(const TropicalTerm<T>& s, const TropicalTerm<T>& t)
{
    for (std::size_t k = 0; k < s.a.size(); ++k) {
        if (s.a[k] < t.a[k]) return true;
        if (t.a[k] < s.a[k]) return false;
    }
    return s.b < t.b;
}

template <class T>
class TropicalPolynomial {
public:
    using scalar_type = T;
    using term_type = TropicalTerm<T>;

    TropicalPolynomial() = default;

    TropicalPolynomial(std::size_t dim, std::vector<term_type> terms) : dim_(dim), terms_(std::move(terms))
    {
        if (dim_ == 0) throw std::invalid_argument("tropical polynomial dimension must be >= 1");
        for (const auto& t : terms_)
            if (t.a.size() != dim_)
                throw std::invalid_argument("term has " + std::to_string(t.a.size()) + " coefficients, expected " +
                                            std::to_string(dim_));
    }

    static TropicalPolynomial neg_inf(std::size_t dim) { return TropicalPolynomial(dim, {}); }
    static TropicalPolynomial constant(std::size_t dim, T b) { return TropicalPolynomial(dim, {{Vec<T>(dim, T(0)), MaxPlus<T>(b)}}); }
    static TropicalPolynomial monomial(Vec<T> a, T b)
    {
        std::size_t n = a.size();
        return TropicalPolynomial(n, {{std::move(a), MaxPlus<T>(std::move(b))}});
    }

    std::size_t dim() const { return dim_; }
    std::size_t size() const { return terms_.size(); }
    const std::vector<term_type>& terms() const { return terms_; }
    const term_type& term(std::size_t i) const { return terms_.at(i); }

    /// True when no term has a finite bias, i.e. p(x) = NEG_INF everywhere.
    bool is_neg_inf() const
    {
        return std::none_of(terms_.begin(), terms_.end(), [](const term_type& t) { return t.b.finite(); });
    }

    MaxPlus<T> operator()(const Vec<T>& x) const { return eval(x); }

    MaxPlus<T> eval(const Vec<T>& x) const
    {
        if (x.size() != dim_)
            throw std::invalid_argument("eval: point has dimension " + std::to_string(x.size()) + ", polynomial " +
                                        std::to_string(dim_));
        MaxPlus<T> best;
        for (const auto& t : terms_) best = max(best, t.eval(x));
        return best;
    }

    /// Index of the first term attaining the max at x (size() if NEG_INF).
    std::size_t argmax(const Vec<T>& x) const
    {
        std::size_t arg = terms_.size();
        MaxPlus<T> best;
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            auto v = terms_[i].eval(x);
            if (v.finite() && (arg == terms_.size() || best < v)) {
                best = v;
                arg = i;
            }
        }
        return arg;
    }

    /// Drops NEG_INF-biased and duplicate terms, then sorts lexicographically.
    TropicalPolynomial canonical() const
    {
        std::vector<term_type> kept;
        for (const auto& t : terms_)
            if (t.b.finite()) kept.push_back(t);
        std::sort(kept.begin(), kept.end(), term_less<T>);
        std::vector<term_type> out;
        const T tol = ScalarTraits<T>::dedup_tol();
        for (auto& t : kept) {
            bool dup = std::any_of(out.begin(), out.end(), [&](const term_type& s) { return terms_equal(s, t, tol); });
            if (!dup) out.push_back(std::move(t));
        }
        return TropicalPolynomial(dim_, std::move(out));
    }

    /// Duplicate removal only, preserving first-occurrence order.
    TropicalPolynomial deduplicated() const
    {
        std::vector<term_type> out;
        const T tol = ScalarTraits<T>::dedup_tol();
        for (const auto& t : terms_) {
            bool dup = std::any_of(out.begin(), out.end(), [&](const term_type& s) { return terms_equal(s, t, tol); });
            if (!dup) out.push_back(t);
        }
        return TropicalPolynomial(dim_, std::move(out));
    }

    friend bool operator==(const TropicalPolynomial& p, const TropicalPolynomial& q)
    {
        if (p.dim_ != q.dim_ || p.terms_.size() != q.terms_.size()) return false;
        for (std::size_t i = 0; i < p.terms_.size(); ++i)
            if (!terms_equal(p.terms_[i], q.terms_[i], T(0))) return false;
        return true;
    }

    std::string str() const
    {
        if (terms_.empty()) return "-inf";
        std::string s = "max(";
        for (std::size_t i = 0; i < terms_.size(); ++i) {
            if (i) s += ", ";
            s += "[";
            for (std::size_t k = 0; k < dim_; ++k) {
                if (k) s += " ";
                s += to_string(terms_[i].a[k]);
            }
            s += "; " + terms_[i].b.str() + "]";
        }
        return s + ")";
    }
    friend std::ostream& operator<<(std::ostream& os, const TropicalPolynomial& p) { return os << p.str(); }

private:
    std::size_t dim_ = 1;
    std::vector<term_type> terms_;
};

template <class T>
void require_same_dim(const TropicalPolynomial<T>& p, const TropicalPolynomial<T>& q, const char* what)
{
    if (p.dim() != q.dim())
        throw std::invalid_argument(std::string(what) + ": dimension mismatch (" + std::to_string(p.dim()) + " vs " +
                                    std::to_string(q.dim()) + ")");
}

/// Pointwise p1 + p2: all pairwise term sums, duplicates removed.
template <class T>
TropicalPolynomial<T> tropical_sum(const TropicalPolynomial<T>& p1, const TropicalPolynomial<T>& p2)
{
    require_same_dim(p1, p2, "tropical_sum");
    std::vector<TropicalTerm<T>> terms;
    terms.reserve(p1.size() * p2.size());
    for (const auto& s : p1.terms())
        for (const auto& t : p2.terms()) {
            Vec<T> a(p1.dim());
            for (std::size_t k = 0; k < a.size(); ++k) a[k] = s.a[k] + t.a[k];
            terms.push_back({std::move(a), s.b + t.b});
        }
    return TropicalPolynomial<T>(p1.dim(), std::move(terms)).deduplicated();
}

/// Pointwise max(p1, p2): concatenated term lists, duplicates removed.
template <class T>
TropicalPolynomial<T> tropical_max(const TropicalPolynomial<T>& p1, const TropicalPolynomial<T>& p2)
{
    require_same_dim(p1, p2, "tropical_max");
    std::vector<TropicalTerm<T>> terms = p1.terms();
    terms.insert(terms.end(), p2.terms().begin(), p2.terms().end());
    return TropicalPolynomial<T>(p1.dim(), std::move(terms)).deduplicated();
}

/// Coefficient vectors a_i in term order (vertices of Newt(p) are among them).
template <class T>
std::vector<Vec<T>> newton_points(const TropicalPolynomial<T>& p)
{
    if (p.is_neg_inf()) throw std::invalid_argument("newton_points of NEG_INF polynomial");
    std::vector<Vec<T>> pts;
    for (const auto& t : p.terms())
        if (t.b.finite()) pts.push_back(t.a);
    return pts;
}

/// Lifted points [a_i; b_i] in term order.
template <class T>
std::vector<Vec<T>> enewt_points(const TropicalPolynomial<T>& p)
{
    if (p.is_neg_inf()) throw std::invalid_argument("enewt_points of NEG_INF polynomial");
    std::vector<Vec<T>> pts;
    for (const auto& t : p.terms())
        if (t.b.finite()) {
            Vec<T> v = t.a;
            v.push_back(t.b.value());
            pts.push_back(std::move(v));
        }
    return pts;
}

/// max sum_k w_k lambda_k s.t. sum_k lambda_k pts_k = target, sum lambda = 1, lambda >= 0.
/// NEG_INF when target lies outside conv(pts).
template <class T>
MaxPlus<T> convex_combination_max(const std::vector<Vec<T>>& pts, const Vec<T>& weights, const Vec<T>& target)
{
    if (pts.empty()) return {};
    const std::size_t m = pts.size(), n = target.size();
    LinearProgram<T> lp(m);
    lp.objective = weights;
    lp.set_nonnegative(0, m);
    for (std::size_t k = 0; k < n; ++k) {
        Vec<T> row(m);
        for (std::size_t i = 0; i < m; ++i) row[i] = pts[i][k];
        lp.add_eq(std::move(row), target[k]);
    }
    lp.add_eq(Vec<T>(m, T(1)), T(1));
    auto out = solve_lp(lp);
    if (!out.optimal()) return {};
    return MaxPlus<T>(out.value);
}

/// Extended Newton function: sup{b : [a; b] in ENewt(p)}.
template <class T>
MaxPlus<T> enf_value(const TropicalPolynomial<T>& p, const Vec<T>& a)
{
    if (p.is_neg_inf()) throw std::invalid_argument("enf_value of NEG_INF polynomial");
    if (a.size() != p.dim()) throw std::invalid_argument("enf_value: dimension mismatch");
    std::vector<Vec<T>> pts;
    Vec<T> w;
    for (const auto& t : p.terms())
        if (t.b.finite()) {
            pts.push_back(t.a);
            w.push_back(t.b.value());
        }
    return convex_combination_max(pts, w, a);
}

/// Whether a lies in conv(points) (LP feasibility).
template <class T>
bool in_convex_hull(const std::vector<Vec<T>>& pts, const Vec<T>& a)
{
    return convex_combination_max(pts, Vec<T>(pts.size(), T(0)), a).finite();
}

/// Removes every term that never strictly attains the max on an open set:
/// term i survives iff b_i exceeds the ENF of the remaining terms at a_i.
template <class T>
TropicalPolynomial<T> prune_dominated(const TropicalPolynomial<T>& p)
{
    auto c = p.canonical();
    const auto& terms = c.terms();
    std::vector<TropicalTerm<T>> kept;
    for (std::size_t i = 0; i < terms.size(); ++i) {
        std::vector<Vec<T>> pts;
        Vec<T> w;
        for (std::size_t k = 0; k < terms.size(); ++k)
            if (k != i) {
                pts.push_back(terms[k].a);
                w.push_back(terms[k].b.value());
            }
        auto rest = convex_combination_max(pts, w, terms[i].a);
        const T tol = ScalarTraits<T>::dedup_tol();
        if (rest.is_neg_inf() || rest.value() < terms[i].b.value() - tol) kept.push_back(terms[i]);
    }
    return TropicalPolynomial<T>(c.dim(), std::move(kept));
}

template <class To, class From>
TropicalPolynomial<To> convert(const TropicalPolynomial<From>& p)
{
    std::vector<TropicalTerm<To>> terms;
    for (const auto& t : p.terms())
        terms.push_back({vec_cast<To>(t.a), t.b.is_neg_inf() ? MaxPlus<To>() : MaxPlus<To>(scalar_cast<To>(t.b.value()))});
    return TropicalPolynomial<To>(p.dim(), std::move(terms));
}

/// Builds a polynomial from (a, b) pairs given as initializer lists; handy in tests.
template <class T>
TropicalPolynomial<T> make_polynomial(std::size_t dim, std::initializer_list<std::pair<Vec<T>, T>> terms)
{
    std::vector<TropicalTerm<T>> out;
    for (const auto& [a, b] : terms) out.push_back({a, MaxPlus<T>(b)});
    return TropicalPolynomial<T>(dim, std::move(out));
}

}  // namespace tropdiv
