#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "costres/solver.hpp"
#include "oracles.hpp"

using namespace costres;

TEST(SolveLp, SingleVariableLowerBound) {
    ProblemInstance p;
    int x = p.add_variable("x", -kInf, kInf, 1.0);
    p.add_constraint("c", {{x, 1.0}}, Sense::ge, 3.0);
    auto s = solve_lp(p);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_NEAR(s.objective, 3.0, 1e-12);
}

TEST(SolveLp, ContradictoryRowsAreInfeasible) {
    ProblemInstance p;
    int x = p.add_variable("x", -kInf, kInf, 1.0);
    p.add_constraint("lo", {{x, 1.0}}, Sense::ge, 2.0);
    p.add_constraint("hi", {{x, 1.0}}, Sense::le, 1.0);
    EXPECT_EQ(solve_lp(p).status, SolveStatus::infeasible);
}

TEST(SolveLp, BoundBindingVertex) {
    ProblemInstance p;
    int x = p.add_variable("x", 0.0, kInf, -1.0);
    p.add_constraint("cap", {{x, 1.0}}, Sense::le, 10.0);
    auto s = solve_lp(p);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_DOUBLE_EQ(s.objective, -10.0);
    EXPECT_DOUBLE_EQ(s.values[0], 10.0);
}

TEST(SolveLp, DetectsUnboundedness) {
    ProblemInstance p;
    int x = p.add_variable("x", 0.0, kInf, -1.0);
    int y = p.add_variable("y", 0.0, kInf, 0.0);
    p.add_constraint("c", {{x, 1.0}, {y, -1.0}}, Sense::le, 1.0);
    EXPECT_EQ(solve_lp(p).status, SolveStatus::unbounded);
}

TEST(SolveLp, NoRows) {
    ProblemInstance p;
    p.add_variable("x", 1.0, 4.0, 2.0);
    p.add_variable("y", -3.0, 4.0, -1.0);
    p.add_objective_offset(5.0);
    auto s = solve_lp(p);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    EXPECT_DOUBLE_EQ(s.objective, 2.0 - 4.0 + 5.0);
}

TEST(SolveLp, DegenerateLpTerminates) {
    // Klee-Minty style cube with many ties at the origin.
    ProblemInstance p;
    const int n = 6;
    for (int j = 0; j < n; ++j) p.add_variable("x" + std::to_string(j), 0.0, kInf, -std::pow(2.0, n - 1 - j));
    for (int i = 0; i < n; ++i) {
        std::vector<Term> t;
        for (int j = 0; j < i; ++j) t.push_back({j, std::pow(2.0, i - j + 1)});
        t.push_back({i, 1.0});
        p.add_constraint("k" + std::to_string(i), t, Sense::le, std::pow(5.0, i + 1));
    }
    for (int i = 0; i < n; ++i) p.add_constraint("z" + std::to_string(i), {{i, 1.0}, {(i + 1) % n, -1.0}}, Sense::le, 1e6);
    auto s = solve_lp(p);
    ASSERT_EQ(s.status, SolveStatus::optimal);
    auto ref = oracle::vertex_optimum(oracle::to_dense([&] {
        auto q = p;
        for (int j = 0; j < n; ++j) q.set_bounds(j, 0.0, 1e7);
        return q;
    }()));
    ASSERT_TRUE(ref.has_value());
    EXPECT_NEAR(s.objective, *ref, 1e-6 * std::abs(*ref));
}

TEST(SolveLp, MatchesVertexEnumeration) {
    std::mt19937_64 rng(11);
    int feasible = 0;
    for (int k = 0; k < 200; ++k) {
        auto inst = oracle::random_milp(rng, 3, 0, 4);
        auto s = solve_lp(inst);
        auto ref = oracle::vertex_optimum(oracle::to_dense(inst));
        if (!ref) {
            EXPECT_EQ(s.status, SolveStatus::infeasible) << "case " << k;
            continue;
        }
        ++feasible;
        ASSERT_EQ(s.status, SolveStatus::optimal) << "case " << k;
        EXPECT_NEAR(s.objective, *ref, 1e-7) << "case " << k;
        EXPECT_LE(inst.max_violation(s.values), 1e-7);
        // Objective equals the recomputed c'x.
        double cx = 0.0;
        for (std::size_t j = 0; j < s.values.size(); ++j) cx += inst.variables()[j].objective * s.values[j];
        EXPECT_NEAR(s.objective, cx, 1e-9 * (1.0 + std::abs(cx)));
    }
    EXPECT_GT(feasible, 50);
}

TEST(SolveMilp, NoBinariesEqualsLp) {
    std::mt19937_64 rng(3);
    for (int k = 0; k < 30; ++k) {
        auto inst = oracle::random_milp(rng, 4, 0, 5);
        auto a = solve_lp(inst);
        auto b = solve_milp(inst);
        ASSERT_EQ(a.status, b.status);
        if (a.ok()) {
            EXPECT_NEAR(a.objective, b.objective, 1e-9);
        }
    }
}

TEST(SolveMilp, MatchesIndependentEnumeration) {
    std::mt19937_64 rng(5);
    for (int k = 0; k < 60; ++k) {
        auto inst = oracle::random_milp(rng, 2, 4, 4);
        auto s = solve_milp(inst);
        auto ref = oracle::enumerate_milp(inst);
        if (!ref) {
            EXPECT_EQ(s.status, SolveStatus::infeasible) << "case " << k;
            continue;
        }
        ASSERT_EQ(s.status, SolveStatus::optimal) << "case " << k;
        EXPECT_NEAR(s.objective, *ref, 1e-6) << "case " << k;
        EXPECT_LE(inst.max_violation(s.values), 1e-7);
        EXPECT_LE(s.objective - s.bound, 1e-6);
    }
}

TEST(SolveMilp, MatchesBruteForceOnLargerRandomSet) {
    std::mt19937_64 rng(17);
    for (int k = 0; k < 40; ++k) {
        auto inst = oracle::random_milp(rng, 5, 10, 8);
        auto a = solve_milp(inst);
        auto b = brute_force(inst);
        ASSERT_EQ(a.status, b.status) << "case " << k;
        if (a.ok()) {
            EXPECT_NEAR(a.objective, b.objective, 1e-6) << "case " << k;
        }
    }
}

TEST(SolveMilp, DeterministicAcrossRuns) {
    std::mt19937_64 rng(23);
    auto inst = oracle::random_milp(rng, 6, 12, 10);
    auto a = solve_milp(inst);
    auto b = solve_milp(inst);
    EXPECT_EQ(a.status, b.status);
    EXPECT_EQ(a.values, b.values);
    EXPECT_EQ(a.objective, b.objective);
}

TEST(BruteForce, ForcedAssignment) {
    ProblemInstance p;
    int a = p.add_binary("a", 1.0);
    int b = p.add_binary("b", 1.0);
    p.add_constraint("ab", {{a, 1.0}, {b, -1.0}}, Sense::eq, 1.0);
    auto s = brute_force(p);
    ASSERT_TRUE(s.ok());
    EXPECT_EQ(s.values[static_cast<std::size_t>(a)], 1.0);
    EXPECT_EQ(s.values[static_cast<std::size_t>(b)], 0.0);
    EXPECT_DOUBLE_EQ(s.objective, 1.0);
}

TEST(BruteForce, NoBinariesEqualsLp) {
    ProblemInstance p;
    int x = p.add_variable("x", 0.0, 8.0, -2.0);
    p.add_constraint("c", {{x, 2.0}}, Sense::le, 9.0);
    EXPECT_DOUBLE_EQ(brute_force(p).objective, solve_lp(p).objective);
}

TEST(BruteForce, RefusesTooManyBinaries) {
    ProblemInstance p;
    for (int j = 0; j < 21; ++j) p.add_binary("b" + std::to_string(j));
    EXPECT_THROW(brute_force(p), SolverError);
}

TEST(WriteLp, FormatIsStable) {
    ProblemInstance p;
    int u = p.add_binary("u[G1][0]", 50.0);
    int x = p.add_variable("p[G1][0]", 0.0, 100.0, 20.0);
    p.add_constraint("lim[G1][0]", {{x, 1.0}, {u, -100.0}}, Sense::le, 0.0);
    p.add_objective_offset(7.5);
    std::ostringstream out;
    write_lp(out, p);
    EXPECT_EQ(out.str(),
              "\\ objective offset: 7.5\n"
              "Minimize\n obj: + 50 u(G1,0) + 20 p(G1,0)\n"
              "Subject To\n lim(G1,0): + 1 p(G1,0) - 100 u(G1,0) <= 0\n"
              "Bounds\n 0 <= p(G1,0) <= 100\n"
              "Binary\n u(G1,0)\n"
              "End\n");
}

TEST(Presolve, SameOptimumWithAndWithout) {
    std::mt19937_64 rng(29);
    for (int k = 0; k < 60; ++k) {
        auto inst = oracle::random_milp(rng, 4, 6, 7);
        // Pin a few columns and add singleton rows so the reductions fire.
        inst.set_bounds(0, 1.0, 1.0);
        inst.add_constraint("single", {{1, 2.0}}, Sense::le, 3.0);
        inst.add_constraint("pin", {{static_cast<int>(inst.variables().size()) - 1, 1.0}}, Sense::ge, 0.5);
        MilpOptions raw;
        raw.presolve = false;
        auto a = solve_milp(inst);
        auto b = solve_milp(inst, raw);
        ASSERT_EQ(a.status, b.status) << "case " << k;
        if (a.ok()) {
            EXPECT_NEAR(a.objective, b.objective, 1e-6) << "case " << k;
            EXPECT_LE(inst.max_violation(a.values), 1e-7);
        }
    }
}

TEST(Presolve, DetectsInfeasibleSingletons) {
    ProblemInstance p;
    int x = p.add_variable("x", 0.0, 5.0, 1.0);
    p.add_constraint("a", {{x, 1.0}}, Sense::ge, 6.0);
    EXPECT_TRUE(presolve(p).infeasible);
    EXPECT_EQ(solve_milp(p).status, SolveStatus::infeasible);
}
