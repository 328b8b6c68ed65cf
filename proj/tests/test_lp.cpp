#include "toricflow/lp.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace toricflow;

namespace {
RatVector vec(std::initializer_list<int> v) {
    RatVector out(static_cast<Eigen::Index>(v.size()));
    Eigen::Index i = 0;
    for (int x : v) out(i++) = x;
    return out;
}
}  // namespace

TEST(Lp, SmallMaximize) {
    // max x + y, x + 2y <= 4, 3x + y <= 6, x, y >= 0  ->  (8/5, 6/5), 14/5
    LinearProgram lp(2);
    lp.add_le(vec({1, 2}), 4);
    lp.add_le(vec({3, 1}), 6);
    lp.add_ge(vec({1, 0}), 0);
    lp.add_ge(vec({0, 1}), 0);
    lp.objective = vec({1, 1});
    const LpResult r = maximize(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.value, Rational(14, 5));
    EXPECT_EQ(r.x, (RatVector(2) << Rational(8, 5), Rational(6, 5)).finished());
}

TEST(Lp, InfeasibleAndUnbounded) {
    LinearProgram bad(1);
    bad.add_ge(vec({1}), 2);
    bad.add_le(vec({1}), 1);
    EXPECT_EQ(maximize(bad).status, LpStatus::Infeasible);
    EXPECT_FALSE(find_feasible(bad));

    LinearProgram open(2);
    open.add_ge(vec({1, 0}), 0);
    open.objective = vec({1, 0});
    EXPECT_EQ(maximize(open).status, LpStatus::Unbounded);
    EXPECT_EQ(minimize(open).status, LpStatus::Optimal);
    EXPECT_EQ(minimize(open).value, Rational(0));
}

TEST(Lp, EqualitiesAndDegeneracy) {
    LinearProgram lp(3);
    lp.add_eq(vec({1, 1, 1}), 1);
    lp.add_eq(vec({2, 2, 2}), 2);  // redundant
    for (int j = 0; j < 3; ++j) lp.add_ge(RatVector::Unit(3, j), 0);
    lp.objective = vec({0, 0, 1});
    const LpResult r = maximize(lp);
    ASSERT_EQ(r.status, LpStatus::Optimal);
    EXPECT_EQ(r.value, Rational(1));
}

TEST(Lp, BruteForceVerticesOracle) {
    // random 2-variable LPs in a box, optimum checked against all pairwise
    // constraint intersections
    std::mt19937_64 rng(5);
    std::uniform_int_distribution<int> d(-5, 5);
    for (int trial = 0; trial < 60; ++trial) {
        LinearProgram lp(2);
        std::vector<std::pair<RatVector, Rational>> rows;
        auto ge = [&](RatVector a, Rational b) {
            lp.add_ge(a, b);
            rows.emplace_back(a, b);
        };
        ge(vec({1, 0}), -4);
        ge(vec({-1, 0}), -4);
        ge(vec({0, 1}), -4);
        ge(vec({0, -1}), -4);
        for (int k = 0; k < 3; ++k) ge(vec({d(rng), d(rng)}), Rational(d(rng)) - 3);
        lp.objective = vec({d(rng), d(rng)});
        const LpResult r = maximize(lp);
        std::optional<Rational> best;
        for (std::size_t i = 0; i < rows.size(); ++i)
            for (std::size_t j = i + 1; j < rows.size(); ++j) {
                const auto& [a, b] = rows[i];
                const auto& [c, e] = rows[j];
                const Rational det = a(0) * c(1) - a(1) * c(0);
                if (det == 0) continue;
                RatVector x(2);
                x << (b * c(1) - a(1) * e) / det, (a(0) * e - b * c(0)) / det;
                bool ok = true;
                for (const auto& [g, h] : rows)
                    if (g.dot(x) < h) ok = false;
                if (!ok) continue;
                const Rational v = lp.objective.dot(x);
                if (!best || v > *best) best = v;
            }
        if (!best) {
            EXPECT_EQ(r.status, LpStatus::Infeasible);
        } else {
            ASSERT_EQ(r.status, LpStatus::Optimal);
            EXPECT_EQ(r.value, *best);
        }
    }
}
