#include "tropdiv/tropical.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tropdiv;
using Q = Rational;

namespace {

TropicalPolynomial<Q> example1_p()
{
    return make_polynomial<Q>(1, {{{-2}, -1}, {{0}, 1}, {{1}, 1}, {{3}, -3}});
}

TropicalPolynomial<Q> example2_p() { return make_polynomial<Q>(2, {{{0, 0}, 0}, {{3, 3}, 0}, {{6, 0}, 0}}); }
TropicalPolynomial<Q> example2_d() { return make_polynomial<Q>(2, {{{1, 0}, 0}, {{1, 1}, 0}, {{2, 1}, 0}}); }

TropicalPolynomial<Q> random_poly(std::mt19937_64& rng, std::size_t dim, std::size_t terms)
{
    std::uniform_int_distribution<int> c(-4, 4);
    std::vector<TropicalTerm<Q>> ts;
    for (std::size_t i = 0; i < terms; ++i) {
        Vec<Q> a(dim);
        for (auto& v : a) v = c(rng);
        ts.push_back({a, MaxPlus<Q>(ratio(c(rng), 2))});
    }
    return TropicalPolynomial<Q>(dim, ts);
}

}  // namespace

TEST(Tropical, Eval)
{
    auto p = example1_p();
    EXPECT_EQ(p.eval({0}).value(), 1);
    EXPECT_EQ(p.eval({3}).value(), 6);
    EXPECT_TRUE(TropicalPolynomial<Q>::neg_inf(1).eval({Q(7)}).is_neg_inf());
    EXPECT_THROW(p.eval({0, 1}), std::invalid_argument);
}

TEST(Tropical, SumIdentityAndDedup)
{
    auto relu = make_polynomial<Q>(1, {{{1}, 0}, {{0}, 0}});
    auto zero = TropicalPolynomial<Q>::constant(1, 0);
    EXPECT_EQ(tropical_sum(relu, zero).canonical(), relu.canonical());
    auto sq = tropical_sum(relu, relu).canonical();
    EXPECT_EQ(sq, make_polynomial<Q>(1, {{{0}, 0}, {{1}, 0}, {{2}, 0}}));
}

TEST(Tropical, MaxIdentities)
{
    auto one = TropicalPolynomial<Q>::constant(1, 1);
    EXPECT_EQ(tropical_max(one, TropicalPolynomial<Q>::neg_inf(1)), one);
    auto relu = make_polynomial<Q>(1, {{{1}, 0}, {{0}, 0}});
    EXPECT_EQ(tropical_max(relu, relu), relu);
    auto p = tropical_max(make_polynomial<Q>(1, {{{-2}, -1}}), make_polynomial<Q>(1, {{{0}, 1}, {{1}, 1}, {{3}, -3}}));
    EXPECT_EQ(p.canonical(), example1_p().canonical());
}

TEST(Tropical, DimensionMismatch)
{
    EXPECT_THROW(tropical_sum(example1_p(), example2_p()), std::invalid_argument);
    EXPECT_THROW(tropical_max(example1_p(), example2_p()), std::invalid_argument);
    EXPECT_THROW(TropicalPolynomial<Q>(2, {{{Q(1)}, MaxPlus<Q>(Q(0))}}), std::invalid_argument);
}

TEST(Tropical, SumOfExample2DivisorAndQuotient)
{
    auto q = make_polynomial<Q>(2, {{{ratio(3, 2), ratio(3, 2)}, 0}, {{3, 0}, 0}, {{0, 0}, 0}});
    auto s = prune_dominated(tropical_sum(example2_d(), q));
    auto expected = make_polynomial<Q>(2, {{{1, 0}, 0},
                                           {{1, 1}, 0},
                                           {{ratio(5, 2), ratio(5, 2)}, 0},
                                           {{ratio(7, 2), ratio(5, 2)}, 0},
                                           {{5, 1}, 0},
                                           {{4, 0}, 0}});
    EXPECT_EQ(s, expected.canonical());
}

TEST(Tropical, NewtonPoints)
{
    auto pts = newton_points(example2_p());
    ASSERT_EQ(pts.size(), 3u);
    EXPECT_EQ(pts[1], (Vec<Q>{3, 3}));
    auto c = TropicalPolynomial<Q>::constant(2, 5);
    EXPECT_EQ(newton_points(c)[0], (Vec<Q>{0, 0}));
    EXPECT_EQ(enewt_points(c)[0], (Vec<Q>{0, 0, 5}));
    auto dpts = newton_points(example2_d());
    EXPECT_EQ(dpts[2], (Vec<Q>{2, 1}));
    EXPECT_THROW(newton_points(TropicalPolynomial<Q>::neg_inf(2)), std::invalid_argument);
}

TEST(Tropical, EnfValue)
{
    EXPECT_EQ(enf_value(example2_p(), {ratio(3, 2), ratio(3, 2)}).value(), 0);
    EXPECT_TRUE(enf_value(example2_p(), {7, 0}).is_neg_inf());
    auto p = make_polynomial<Q>(1, {{{1}, 1}, {{0}, 0}});
    EXPECT_EQ(enf_value(p, {ratio(1, 2)}).value(), ratio(1, 2));
    EXPECT_THROW(enf_value(p, {1, 1}), std::invalid_argument);
}

TEST(Tropical, NegInfTermsAreDroppedByCanonical)
{
    TropicalPolynomial<Q> p(1, {{{Q(1)}, MaxPlus<Q>()}, {{Q(0)}, MaxPlus<Q>(Q(2))}});
    EXPECT_EQ(p.eval({Q(100)}).value(), 2);
    EXPECT_EQ(p.canonical().size(), 1u);
    TropicalPolynomial<Q> all(1, {{{Q(1)}, MaxPlus<Q>()}});
    EXPECT_TRUE(all.is_neg_inf());
}

TEST(Tropical, SumAndMaxArePointwise)
{
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> c(-50, 50);
    for (std::size_t dim : {1u, 2u}) {
        auto p1 = random_poly(rng, dim, 4), p2 = random_poly(rng, dim, 3);
        auto s = tropical_sum(p1, p2), m = tropical_max(p1, p2);
        EXPECT_LE(s.size(), p1.size() * p2.size());
        for (int k = 0; k < 1000; ++k) {
            Vec<Q> x(dim);
            for (auto& v : x) v = ratio(c(rng), 7);
            EXPECT_EQ(s.eval(x), p1.eval(x) + p2.eval(x));
            EXPECT_EQ(m.eval(x), max(p1.eval(x), p2.eval(x)));
        }
    }
}

TEST(Tropical, SumIsPointwiseInDouble)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> g;
    auto p1 = convert<double>(random_poly(rng, 2, 5)), p2 = convert<double>(random_poly(rng, 2, 4));
    auto s = tropical_sum(p1, p2);
    for (int k = 0; k < 1000; ++k) {
        Vec<double> x{g(rng), g(rng)};
        EXPECT_NEAR(s.eval(x).value(), p1.eval(x).value() + p2.eval(x).value(), 1e-9);
    }
}

TEST(Tropical, EnfDominatesLiftedTerms)
{
    std::mt19937_64 rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        auto p = random_poly(rng, 1 + trial % 2, 5);
        for (const auto& t : p.terms()) EXPECT_GE(enf_value(p, t.a).value(), t.b.value());
    }
}

// Primal oracle in x-space: p1 <= p2 iff for every term t of p1,
// sup_x min_k (t(x) - t_k(x)) <= 0 over the terms t_k of p2.
bool dominated_by(const TropicalPolynomial<Q>& p1, const TropicalPolynomial<Q>& p2)
{
    const std::size_t n = p1.dim();
    for (const auto& t : p1.terms()) {
        LinearProgram<Q> lp(n + 1);
        lp.objective[n] = 1;
        for (const auto& u : p2.terms()) {
            Vec<Q> row(n + 1);
            for (std::size_t k = 0; k < n; ++k) row[k] = u.a[k] - t.a[k];
            row[n] = 1;
            lp.add_le(row, t.b.value() - u.b.value());
        }
        lp.set_bounds(n, std::nullopt, Q(1));
        auto out = solve_lp(lp);
        if (!out.optimal() || out.value > 0) return false;
    }
    return true;
}

// p1 <= p2 as functions iff ENF(p1) <= ENF(p2) on the Newton polytope of p1.
TEST(Tropical, EnfOrderMatchesFunctionOrder)
{
    std::mt19937_64 rng(9);
    int both = 0, neither = 0;
    for (int trial = 0; trial < 80; ++trial) {
        const std::size_t dim = 1 + trial % 2;
        auto p1 = random_poly(rng, dim, 1 + trial % 5);
        auto p2 = random_poly(rng, dim, 1 + (trial / 2) % 5);
        if (trial % 3 == 0) p2 = tropical_max(p1, p2);
        const bool fn_le = dominated_by(p1, p2);
        bool enf_le = true;
        for (const auto& t : p1.terms()) {
            auto e2 = enf_value(p2, t.a);
            if (e2.is_neg_inf() || e2.value() < t.b.value()) enf_le = false;
        }
        EXPECT_EQ(fn_le, enf_le) << p1.str() << " vs " << p2.str();
        (fn_le ? both : neither) += 1;
    }
    EXPECT_GT(both, 5);
    EXPECT_GT(neither, 5);
}
