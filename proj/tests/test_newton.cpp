#include "tropdiv/newton.hpp"

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

}  // namespace

TEST(ConstraintSet, Example2QuotientCoefficients)
{
    auto prob = example2();
    auto C = build_constraints_C(prob.p, prob.d);
    EXPECT_TRUE(C.contains({ratio(3, 2), ratio(3, 2)}));
    EXPECT_TRUE(C.contains({3, 0}));
    EXPECT_TRUE(C.contains({0, 0}));
    EXPECT_FALSE(C.contains({6, 0}));
    EXPECT_FALSE(C.contains({-1, 0}));
    EXPECT_FALSE(C.empty());
}

TEST(ConstraintSet, ZeroDivisorGivesNewtonPolytope)
{
    auto prob = example2();
    auto C = build_constraints_C(prob.p, TropicalPolynomial<Q>::constant(2, Q(0)));
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> u(-4, 28);
    auto pts = newton_points(prob.p);
    for (int t = 0; t < 300; ++t) {
        Vec<Q> a{ratio(u(rng), 4), ratio(u(rng), 4)};
        EXPECT_EQ(C.contains(a), in_convex_hull(pts, a)) << a[0] << "," << a[1];
    }
    for (const auto& v : pts) EXPECT_TRUE(C.contains(v));
}

TEST(ConstraintSet, EmptyWhenDivisorTooWide)
{
    auto C = build_constraints_C(make_polynomial<Q>(1, {{{0}, 0}}), make_polynomial<Q>(1, {{{-1}, 0}, {{1}, 0}}));
    EXPECT_TRUE(C.empty());
    auto C2 = build_constraints_C(make_polynomial<Q>(1, {{{-1}, 0}, {{1}, 0}}), make_polynomial<Q>(1, {{{-2}, 0}, {{2}, 0}}));
    EXPECT_TRUE(C2.empty());
}

TEST(ConstraintSet, ExtremePoints)
{
    std::vector<Vec<Q>> pts{{0, 0}, {2, 0}, {1, 0}, {0, 2}, {1, 1}, {2, 0}, {ratio(1, 2), ratio(1, 2)}};
    EXPECT_EQ(extreme_point_indices(pts), (std::vector<std::size_t>{0, 1, 3}));
    EXPECT_EQ(extreme_points(std::vector<Vec<Q>>{{5}}), (std::vector<Vec<Q>>{{5}}));
}

TEST(LowerBound, Example1)
{
    auto prob = example1();
    std::vector<Vec<Q>> probes;
    for (int i = -400; i <= 400; ++i) probes.push_back({ratio(i, 20)});
    EXPECT_EQ(lower_bound_l(prob, {-3}, probes), MaxPlus<Q>(-1));
    EXPECT_EQ(lower_bound_l(prob, {1}, probes), MaxPlus<Q>(-2));
    EXPECT_EQ(lower_bound_l(prob, {-1}, probes), MaxPlus<Q>(1));
    EXPECT_EQ(lower_bound_l(prob, {ratio(-1, 2)}, probes), MaxPlus<Q>(1));
    EXPECT_TRUE(lower_bound_l(prob, {2}, probes).is_neg_inf());
    EXPECT_TRUE(lower_bound_l(prob, {-4}, probes).is_neg_inf());
    EXPECT_THROW(lower_bound_l(prob, {1, 1}, probes), std::invalid_argument);
}

TEST(Zonotope, UnitSquare)
{
    auto C = build_constraints_C(zonotope_rep<Q>({{1, 0}, {0, 1}}, 2), {});
    EXPECT_TRUE(C.contains({0, 0}));
    EXPECT_TRUE(C.contains({1, 1}));
    EXPECT_TRUE(C.contains({ratio(1, 2), 1}));
    EXPECT_FALSE(C.contains({ratio(3, 2), 0}));
    EXPECT_FALSE(C.contains({-ratio(1, 10), ratio(1, 2)}));
    auto seg = build_constraints_C(zonotope_rep<Q>({{2, 1}}, 2), {});
    EXPECT_TRUE(seg.contains({1, ratio(1, 2)}));
    EXPECT_FALSE(seg.contains({1, 1}));
}

TEST(Zonotope, MembershipMatchesCornerEnumeration)
{
    std::mt19937_64 rng(11);
    std::uniform_int_distribution<int> g(-3, 3);
    std::uniform_int_distribution<int> pt(-12, 12);
    for (int trial = 0; trial < 12; ++trial) {
        const std::size_t units = 1 + static_cast<std::size_t>(trial % 6);
        std::vector<Vec<Q>> gens(units);
        for (auto& v : gens) v = {Q(g(rng)), Q(g(rng))};
        auto Z = build_constraints_C(zonotope_rep(gens, 2), {});
        std::vector<Vec<Q>> corners;
        for (std::size_t mask = 0; mask < (std::size_t(1) << units); ++mask) {
            Vec<Q> c{0, 0};
            for (std::size_t u = 0; u < units; ++u)
                if (mask >> u & 1) {
                    c[0] += gens[u][0];
                    c[1] += gens[u][1];
                }
            corners.push_back(c);
        }
        for (int t = 0; t < 25; ++t) {
            Vec<Q> a{ratio(pt(rng), 2), ratio(pt(rng), 2)};
            EXPECT_EQ(Z.contains(a), in_convex_hull(corners, a));
        }
    }
}

TEST(Zonotope, MaxCombinationIsHullOfUnion)
{
    auto a = zonotope_rep<Q>({{1, 0}}, 2);
    auto b = zonotope_rep<Q>({{0, 1}}, 2);
    auto C = build_constraints_C(combine_reps<Q>({a, b}, Combination::max), {});
    EXPECT_TRUE(C.contains({ratio(1, 2), ratio(1, 2)}));
    EXPECT_FALSE(C.contains({1, 1}));
    auto S = build_constraints_C(combine_reps<Q>({a, b}, Combination::sum), {});
    EXPECT_TRUE(S.contains({1, 1}));
}
