#pragma once

/**
 * @file approx_division.hpp
 * @brief Approximate quotient with a fixed term budget.
 *
 * Alternates between assigning samples to the term that attains the max and
 * solving one LP per cluster for the best affine minorant of f on the lower
 * hull samples with coefficients in C.  Runs in double precision.
 */

#include "tropdiv/newton.hpp"
#include "tropdiv/parallel.hpp"
#include "tropdiv/polyhedral.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <vector>

namespace tropdiv {

struct ApproxConfig {
    std::size_t terms = 3;            ///< quotient term budget
    std::size_t samples = 200;        ///< drawn from N(0, sample_scale^2 I) when no samples are given
    std::size_t max_iterations = 20;
    std::size_t restarts = 1;
    std::uint64_t seed = 0;
    double sample_scale = 1.0;
    unsigned jobs = 1;

    void validate(std::size_t n_samples) const
    {
        if (terms < 1) throw std::invalid_argument("term budget must be >= 1");
        if (n_samples < terms) throw std::invalid_argument("need at least as many samples as terms");
        if (restarts < 1) throw std::invalid_argument("restarts must be >= 1");
        if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    }
};

struct SampleSet {
    std::vector<Vec<double>> xs;
    Vec<double> fs;
    std::vector<std::size_t> hull;  ///< lower hull index set J

    SampleSet() = default;
    SampleSet(std::vector<Vec<double>> points, Vec<double> values) : xs(std::move(points)), fs(std::move(values))
    {
        if (xs.size() != fs.size()) throw std::invalid_argument("SampleSet: size mismatch");
        if (xs.empty()) throw std::invalid_argument("SampleSet: no samples");
        hull = lower_hull_indices(xs, fs);
    }

    std::size_t size() const { return xs.size(); }
    std::size_t dim() const { return xs.front().size(); }
};

using Term = TropicalTerm<double>;

struct ClusterRun {
    std::vector<Term> terms;
    std::vector<double> error_trace;
    std::vector<std::size_t> assignment;
    std::size_t iterations = 0;
    bool converged = false;

    double final_error() const { return error_trace.empty() ? std::numeric_limits<double>::infinity() : error_trace.back(); }
};

/// Raised when C is empty: no affine minorant with admissible slope exists.
struct TrivialDivision : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Index of the first term attaining the max at x.
inline std::size_t best_term(const std::vector<Term>& terms, const Vec<double>& x)
{
    std::size_t arg = 0;
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < terms.size(); ++i) {
        double v = dot(terms[i].a, x) + terms[i].b.value();
        if (v > best) {
            best = v;
            arg = i;
        }
    }
    return arg;
}

inline double eval_terms(const std::vector<Term>& terms, const Vec<double>& x)
{
    double best = -std::numeric_limits<double>::infinity();
    for (const auto& t : terms) best = std::max(best, dot(t.a, x) + t.b.value());
    return best;
}

/// Phase 1: j goes to the lowest-index term attaining the max at x_j.
inline std::vector<std::size_t> assign_clusters(const std::vector<Vec<double>>& xs, const std::vector<Term>& terms)
{
    if (terms.empty()) throw std::invalid_argument("assign_clusters: no terms");
    std::vector<std::size_t> out(xs.size());
    for (std::size_t j = 0; j < xs.size(); ++j) out[j] = best_term(terms, xs[j]);
    return out;
}

/// Moves a random part of the largest cluster into each empty cluster.
template <class Rng>
void repair_empty_clusters(std::vector<std::size_t>& assignment, std::size_t k, Rng& rng)
{
    for (;;) {
        std::vector<std::size_t> count(k, 0);
        for (auto c : assignment) ++count[c];
        auto empty = std::find(count.begin(), count.end(), 0u);
        if (empty == count.end()) return;
        const std::size_t target = static_cast<std::size_t>(empty - count.begin());
        const std::size_t largest = static_cast<std::size_t>(std::max_element(count.begin(), count.end()) - count.begin());
        if (count[largest] < 2) return;
        std::vector<std::size_t> members;
        for (std::size_t j = 0; j < assignment.size(); ++j)
            if (assignment[j] == largest) members.push_back(j);
        std::shuffle(members.begin(), members.end(), rng);
        for (std::size_t t = 0; t < members.size() / 2; ++t) assignment[members[t]] = target;
    }
}

/// Best admissible affine minorant for one cluster:
/// maximize s^T a + N b  s.t.  x_j^T a + b <= f_j (j in J),  a in C.
inline std::optional<Term> fit_cluster(const SampleSet& s, const std::vector<std::size_t>& members,
                                       const ConstraintSetC<double>& C)
{
    if (members.empty()) throw std::invalid_argument("fit_cluster: empty cluster");
    const std::size_t n = s.dim();
    LinearProgram<double> lp(n + 1 + C.aux_count());
    Vec<double> sum(n, 0.0);
    for (auto j : members)
        for (std::size_t k = 0; k < n; ++k) sum[k] += s.xs[j][k];
    for (std::size_t k = 0; k < n; ++k) lp.objective[k] = sum[k];
    lp.objective[n] = static_cast<double>(members.size());
    for (auto j : s.hull) {
        Vec<double> row(lp.num_vars, 0.0);
        for (std::size_t k = 0; k < n; ++k) row[k] = s.xs[j][k];
        row[n] = 1.0;
        lp.add_le(std::move(row), s.fs[j]);
    }
    C.add_to_lp(lp, 0, n + 1);
    auto out = solve_lp(lp);
    if (out.status == LpStatus::infeasible) return std::nullopt;
    if (out.status == LpStatus::unbounded) throw std::logic_error("fit_cluster: unbounded LP (C is not bounded)");
    Term t;
    t.a.assign(out.x.begin(), out.x.begin() + static_cast<long>(n));
    t.b = MaxPlus<double>(out.x[n]);
    return t;
}

/// One run of the alternating scheme from a random initial partition.
inline ClusterRun run_clustering(const SampleSet& s, const ConstraintSetC<double>& C, const ApproxConfig& cfg, std::uint64_t stream)
{
    cfg.validate(s.size());
    std::seed_seq seq{static_cast<std::uint32_t>(cfg.seed), static_cast<std::uint32_t>(cfg.seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    std::mt19937_64 rng(seq);
    const std::size_t k = cfg.terms, N = s.size();

    ClusterRun run;
    run.assignment.resize(N);
    std::uniform_int_distribution<std::size_t> pick(0, k - 1);
    for (auto& a : run.assignment) a = pick(rng);
    repair_empty_clusters(run.assignment, k, rng);

    for (std::size_t it = 0; it < cfg.max_iterations; ++it) {
        std::vector<std::vector<std::size_t>> members(k);
        for (std::size_t j = 0; j < N; ++j) members[run.assignment[j]].push_back(j);
        std::vector<Term> next(k);
        for (std::size_t i = 0; i < k; ++i) {
            if (members[i].empty()) {
                next[i] = run.terms.empty() ? Term{} : run.terms[i];
                continue;
            }
            auto fit = fit_cluster(s, members[i], C);
            if (!fit) throw TrivialDivision("constraint set C is empty: the division is trivial");
            // Keep an earlier term when it scores at least as well on this cluster.
            auto score = [&](const Term& t) {
                double v = 0;
                for (auto j : members[i]) v += dot(t.a, s.xs[j]) + t.b.value();
                return v;
            };
            double best = score(*fit);
            next[i] = *fit;
            for (const auto& old : run.terms)
                if (double v = score(old); v > best) {
                    best = v;
                    next[i] = old;
                }
        }
        // Terms for clusters that were empty from the start copy a fitted one.
        for (std::size_t i = 0; i < k; ++i)
            if (next[i].a.empty()) {
                for (std::size_t t = 0; t < k; ++t)
                    if (!next[t].a.empty()) {
                        next[i] = next[t];
                        break;
                    }
            }
        run.terms = std::move(next);
        double e = 0;
        for (std::size_t j = 0; j < N; ++j) e += s.fs[j] - eval_terms(run.terms, s.xs[j]);
        run.error_trace.push_back(e);
        run.iterations = it + 1;

        auto assignment = assign_clusters(s.xs, run.terms);
        repair_empty_clusters(assignment, k, rng);
        if (assignment == run.assignment) {
            run.converged = true;
            break;
        }
        run.assignment = std::move(assignment);
    }
    return run;
}

/// Best of cfg.restarts independent runs (lowest final e).
inline ClusterRun run_clustering_multistart(const SampleSet& s, const ConstraintSetC<double>& C, const ApproxConfig& cfg,
                                   std::vector<ClusterRun>* all_runs = nullptr)
{
    std::vector<ClusterRun> runs(cfg.restarts);
    parallel_for(cfg.restarts, cfg.jobs, [&](std::size_t r) { runs[r] = run_clustering(s, C, cfg, r); });
    std::size_t best = 0;
    for (std::size_t r = 1; r < runs.size(); ++r)
        if (runs[r].final_error() < runs[best].final_error()) best = r;
    ClusterRun out = runs[best];
    if (all_runs) *all_runs = std::move(runs);
    return out;
}

/// Standard normal samples (scaled), reproducible from (seed, stream).
inline std::vector<Vec<double>> gaussian_samples(std::size_t count, std::size_t dim, std::uint64_t seed, double scale = 1.0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32), 0xA5A5u};
    std::mt19937_64 rng(seq);
    std::normal_distribution<double> g(0.0, scale);
    std::vector<Vec<double>> xs(count, Vec<double>(dim));
    for (auto& x : xs)
        for (auto& v : x) v = g(rng);
    return xs;
}

/// Approximate division of simple polynomials over the given sample points.
inline DivisionResult<double> approx_divide(const DivisionProblem<double>& prob, const ApproxConfig& cfg,
                                            std::vector<Vec<double>> xs)
{
    const std::size_t n = prob.dim();
    for (const auto& x : xs)
        if (x.size() != n) throw std::invalid_argument("approx_divide: sample dimension mismatch");
    Vec<double> fs;
    for (const auto& x : xs) {
        auto v = prob.f(x);
        if (v.is_neg_inf()) throw std::invalid_argument("approx_divide: dividend is NEG_INF at a sample");
        fs.push_back(v.value());
    }
    cfg.validate(xs.size());
    DivisionResult<double> res;
    res.approximate = true;
    auto C = build_constraints_C(prob.p, prob.d);
    SampleSet s(std::move(xs), std::move(fs));
    ClusterRun run;
    try {
        run = run_clustering_multistart(s, C, cfg);
    } catch (const TrivialDivision&) {
        res.quotient = TropicalPolynomial<double>::neg_inf(n);
        res.remainder = prob.p.canonical();
        return res;
    }
    res.quotient = TropicalPolynomial<double>(n, run.terms).deduplicated();
    res.error_trace = run.error_trace;

    // Dividend terms that win at a sample where d + q falls short.
    const auto p = prob.p.canonical();
    const double tol = ScalarTraits<double>::feas_tol();
    std::vector<bool> keep(p.size(), false);
    for (const auto& x : s.xs) {
        double pv = p.eval(x).value();
        double approx = prob.d.eval(x).value() + res.quotient.eval(x).value();
        if (pv > approx + tol) keep[p.argmax(x)] = true;
    }
    std::vector<Term> rterms;
    for (std::size_t i = 0; i < p.size(); ++i)
        if (keep[i]) rterms.push_back(p.term(i));
    res.remainder = TropicalPolynomial<double>(n, std::move(rterms));
    res.nontrivial = is_nontrivial(res);
    res.effective = is_effective(res, prob, s.xs);
    return res;
}

inline DivisionResult<double> approx_divide(const DivisionProblem<double>& prob, const ApproxConfig& cfg)
{
    return approx_divide(prob, cfg, gaussian_samples(cfg.samples, prob.dim(), cfg.seed, cfg.sample_scale));
}

}  // namespace tropdiv
