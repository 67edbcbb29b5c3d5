#include "tropdiv/exact_division.hpp"

#include "oracle.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tropdiv;
using Q = Rational;

namespace {

DivisionProblem<Q> example1()
{
    return {make_polynomial<Q>(1, {{{-2}, -1}, {{0}, 1}, {{1}, 1}, {{3}, -3}}), make_polynomial<Q>(1, {{{1}, 0}, {{2}, -1}})};
}

DivisionProblem<Q> example2()
{
    return {make_polynomial<Q>(2, {{{0, 0}, 0}, {{3, 3}, 0}, {{6, 0}, 0}}),
            make_polynomial<Q>(2, {{{1, 0}, 0}, {{1, 1}, 0}, {{2, 1}, 0}})};
}

std::vector<Vec<Q>> grid(std::size_t n, int half, int den)
{
    std::vector<Vec<Q>> g;
    if (n == 1) {
        for (int i = -half; i <= half; ++i) g.push_back({ratio(i, den)});
    } else {
        for (int i = -half; i <= half; ++i)
            for (int k = -half; k <= half; ++k) g.push_back({ratio(i, den), ratio(k, den)});
    }
    return g;
}

}  // namespace

TEST(ExactDivision, Example1)
{
    auto res = exact_divide(example1());
    auto q = make_polynomial<Q>(1, {{{-3}, -1}, {{-1}, 1}, {{ratio(-1, 2)}, 1}, {{1}, -2}}).canonical();
    EXPECT_EQ(res.quotient, q) << res.quotient.str();
    EXPECT_EQ(res.remainder.canonical(), make_polynomial<Q>(1, {{{1}, 1}}));
    EXPECT_TRUE(res.nontrivial);
    EXPECT_TRUE(res.effective);
}

TEST(ExactDivision, Example1Cells)
{
    auto det = exact_divide_detailed(example1());
    EXPECT_EQ(det.cells.size(), 5u);
    // Hull generated by vertices (-1, 2), (0, 1), (2, 0) and rays (-1, 3), (1, 1).
    EXPECT_EQ(det.hull.vertices, (std::vector<Vec<Q>>{{-1, 2}, {0, 1}, {2, 0}}));
    EXPECT_EQ(det.hull.rays, (std::vector<Vec<Q>>{{-1, 3}, {1, 1}}));
    // Normalized rows z >= s x + c: slopes {-3, -1, -1/2, 1}, intercepts {-1, 1, 1, -2}.
    ASSERT_EQ(det.hull_rows.rows.size(), 4u);
    std::vector<std::pair<Q, Q>> lines;
    for (const auto& r : det.hull_rows.rows) lines.push_back({Q(-r.a[0] / r.a[1]), Q(r.b / r.a[1])});
    std::sort(lines.begin(), lines.end());
    EXPECT_EQ(lines, (std::vector<std::pair<Q, Q>>{{-3, -1}, {-1, 1}, {ratio(-1, 2), 1}, {1, -2}}));
}

TEST(ExactDivision, Example2)
{
    auto prob = example2();
    auto res = exact_divide(prob);
    auto q = make_polynomial<Q>(2, {{{ratio(3, 2), ratio(3, 2)}, 0}, {{3, 0}, 0}, {{0, 0}, 0}}).canonical();
    EXPECT_EQ(res.quotient, q) << res.quotient.str();
    auto s = prune_dominated(tropical_sum(prob.d, res.quotient));
    EXPECT_EQ(s.size(), 6u);
}

TEST(ExactDivision, Example2CellBoundaries)
{
    // Brute-force: at grid points, the (argmax p, argmax d) pair must be a kept cell.
    auto prob = example2();
    auto cells = partition_cells(prob);
    auto p = prob.p.canonical(), d = prob.d.canonical();
    for (const auto& x : grid(2, 20, 3)) {
        bool unique = true;
        auto best = p.argmax(x), bestd = d.argmax(x);
        for (std::size_t i = 0; i < p.size(); ++i)
            if (i != best && p.term(i).eval(x) == p.eval(x)) unique = false;
        for (std::size_t j = 0; j < d.size(); ++j)
            if (j != bestd && d.term(j).eval(x) == d.eval(x)) unique = false;
        if (!unique) continue;
        bool found = false;
        for (const auto& c : cells)
            if (c.i == best && c.j == bestd) {
                found = true;
                EXPECT_TRUE(contains_point(c.region, x));
            }
        EXPECT_TRUE(found);
    }
    for (const auto& c : cells) {
        EXPECT_TRUE(contains_point(c.region, c.interior));
        EXPECT_EQ(p.argmax(c.interior), c.i);
        EXPECT_EQ(d.argmax(c.interior), c.j);
    }
}

TEST(ExactDivision, SingleMonomialIsOneCell)
{
    auto m = make_polynomial<Q>(2, {{{1, 2}, 3}});
    DivisionProblem<Q> prob(m, m);
    EXPECT_EQ(partition_cells(prob).size(), 1u);
    auto res = exact_divide(prob);
    EXPECT_EQ(res.quotient, TropicalPolynomial<Q>::constant(2, 0));
    EXPECT_TRUE(res.remainder.is_neg_inf());
    EXPECT_TRUE(res.effective);
}

TEST(ExactDivision, SelfDivision)
{
    auto prob = example1();
    auto res = exact_divide(DivisionProblem<Q>(prob.p, prob.p));
    EXPECT_EQ(res.quotient, TropicalPolynomial<Q>::constant(1, 0));
    EXPECT_TRUE(res.remainder.is_neg_inf());
}

TEST(ExactDivision, TrivialDivision)
{
    // f = -|x| has no affine minorant.
    auto res = exact_divide(DivisionProblem<Q>(TropicalPolynomial<Q>::constant(1, 0), make_polynomial<Q>(1, {{{1}, 0}, {{-1}, 0}})));
    EXPECT_FALSE(res.nontrivial);
    EXPECT_TRUE(res.quotient.is_neg_inf());
    EXPECT_EQ(res.remainder, TropicalPolynomial<Q>::constant(1, 0));
    EXPECT_FALSE(res.effective);
}

TEST(ExactDivision, AffineDifferenceIsNontrivial)
{
    // f = -x is affine, so the quotient is -x itself.
    auto res = exact_divide(DivisionProblem<Q>(TropicalPolynomial<Q>::constant(1, 0), make_polynomial<Q>(1, {{{1}, 0}})));
    EXPECT_TRUE(res.nontrivial);
    EXPECT_EQ(res.quotient, make_polynomial<Q>(1, {{{-1}, 0}}));
}

TEST(ExactDivision, AbsoluteValues)
{
    auto res = exact_divide(DivisionProblem<Q>(make_polynomial<Q>(1, {{{3}, 0}, {{-3}, 0}}), make_polynomial<Q>(1, {{{2}, 0}, {{-2}, 0}})));
    EXPECT_TRUE(res.nontrivial);
    EXPECT_EQ(res.quotient.canonical(), make_polynomial<Q>(1, {{{-1}, 0}, {{1}, 0}}));
}

TEST(ExactDivision, DimensionMismatch)
{
    EXPECT_THROW(DivisionProblem<Q>(example1().p, example2().p), std::invalid_argument);
}

TEST(ExactDivision, PointwiseBoundAndCover)
{
    std::mt19937_64 rng(31);
    std::uniform_int_distribution<int> c(-400, 400);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t n = 1 + trial % 2;
        auto prob = oracle::random_problem(rng, n);
        auto res = exact_divide(prob);
        ASSERT_TRUE(res.nontrivial);
        const int probes = n == 1 ? 10000 : 2500;
        for (int k = 0; k < probes; ++k) {
            Vec<Q> x(n);
            for (auto& v : x) v = ratio(c(rng), 37);
            auto qd = res.quotient.eval(x) + prob.d.eval(x);
            auto pv = prob.p.eval(x);
            ASSERT_LE(qd, pv);
            ASSERT_EQ(max(qd, res.remainder.eval(x)), pv);
        }
    }
}

TEST(ExactDivision, RemainderIsMinimal)
{
    // Dropping any remainder term breaks the cover identity somewhere.
    std::mt19937_64 rng(32);
    for (int trial = 0; trial < 10; ++trial) {
        auto prob = oracle::random_problem(rng, 1 + trial % 2);
        auto det = exact_divide_detailed(prob);
        const auto& r = det.result.remainder;
        auto qd = tropical_sum(prob.d, det.result.quotient);
        for (std::size_t drop = 0; drop < r.size(); ++drop) {
            std::vector<TropicalTerm<Q>> less;
            for (std::size_t k = 0; k < r.size(); ++k)
                if (k != drop) less.push_back(r.term(k));
            auto cover = tropical_max(qd, TropicalPolynomial<Q>(prob.dim(), less));
            bool broken = false;
            for (const auto& c : det.cells)
                if (cover.eval(c.interior) != prob.p.eval(c.interior)) broken = true;
            EXPECT_TRUE(broken);
        }
    }
}

TEST(ExactDivision, BiconjugateOracle)
{
    std::mt19937_64 rng(33);
    for (int trial = 0; trial < 10; ++trial) {
        const std::size_t n = 1 + trial % 2;
        auto prob = oracle::random_problem(rng, n);
        auto res = exact_divide(prob);
        // The box truncation perturbs the envelope by O(1/L).
        const Q L = Q(10000000000.0);
        const Q tol = ratio(1, 1000000);
        auto s = oracle::arrangement_samples(prob, L);
        if (n == 1) {
            oracle::LowerHull1D env(s.xs, s.fs);
            for (const auto& x : grid(1, 500, 50)) EXPECT_LE(abs(Q(res.quotient.eval(x).value() - env(x[0]))), tol);
        } else {
            oracle::Envelope2D env(s.xs, s.fs);
            for (const auto& x : grid(2, 40, 4))
                EXPECT_LE(abs(Q(res.quotient.eval(x).value() - env(x))), tol) << prob.p.str();
            // Spot checks against the plain LP envelope.
            for (const auto& x : grid(2, 2, 1))
                EXPECT_EQ(env(x), oracle::envelope_at(s.xs, s.fs, x));
        }
    }
}

TEST(ExactDivision, QuotientCoefficientsInDividendSpan)
{
    // d and p both live in the x1 = x2 direction: quotient coefficients must too.
    std::mt19937_64 rng(34);
    std::uniform_int_distribution<int> c(-3, 3), b(-3, 3);
    for (int trial = 0; trial < 8; ++trial) {
        std::vector<TropicalTerm<Q>> pt, dt;
        for (int k = 0; k < 4; ++k) {
            Q v = c(rng);
            pt.push_back({{v, v}, MaxPlus<Q>(Q(b(rng)))});
        }
        for (int k = 0; k < 2; ++k) {
            Q v = c(rng);
            dt.push_back({{v, v}, MaxPlus<Q>(Q(b(rng)))});
        }
        DivisionProblem<Q> prob(TropicalPolynomial<Q>(2, pt), TropicalPolynomial<Q>(2, dt));
        auto res = exact_divide(prob);
        for (const auto& t : res.quotient.terms()) EXPECT_EQ(t.a[0], t.a[1]);
    }
}

TEST(ExactDivision, RedividingRemainderIsNotEffective)
{
    std::mt19937_64 rng(35);
    for (int trial = 0; trial < 15; ++trial) {
        auto prob = oracle::random_problem(rng, 1 + trial % 2);
        auto res = exact_divide(prob);
        if (res.remainder.is_neg_inf()) continue;
        auto again = exact_divide(DivisionProblem<Q>(res.remainder, prob.d));
        EXPECT_FALSE(again.effective);
        EXPECT_EQ(again.remainder.canonical(), res.remainder.canonical());
    }
}

TEST(ExactDivision, DividingByQuotientRecoversAtLeastDivisor)
{
    // Q(p, q) >= d always; on Example 1 the inequality is strict somewhere.
    auto prob = example1();
    auto res = exact_divide(prob);
    auto back = exact_divide(DivisionProblem<Q>(prob.p, res.quotient));
    bool strict = false;
    for (const auto& x : grid(1, 200, 20)) {
        EXPECT_GE(back.quotient.eval(x), prob.d.eval(x));
        if (back.quotient.eval(x) > prob.d.eval(x)) strict = true;
    }
    EXPECT_TRUE(strict);
    EXPECT_EQ(back.quotient.canonical(), make_polynomial<Q>(1, {{{1}, 0}, {{ratio(3, 2)}, 0}, {{2}, -1}}).canonical());
    EXPECT_TRUE(back.remainder.is_neg_inf());
}
