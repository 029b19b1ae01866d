#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <random>

#include "bdms/errors.hpp"
#include "bdms/milp.hpp"

using namespace bdms;
using namespace bdms::milp;

TEST_CASE("unconstrained box LP sits at the cheap bound") {
    Model m;
    m.add_var(0, 10, -1.0);
    m.add_var(-2, 3, 2.0);
    Solution s = solve(m);
    CHECK(s.objective == doctest::Approx(-14.0).epsilon(1e-9));
    CHECK(s.x(0) == doctest::Approx(10.0));
    CHECK(s.x(1) == doctest::Approx(-2.0));
}

TEST_CASE("covering constraint LP") {
    // min x + 2y  s.t. x + y >= 1, x <= 0.4
    Model m;
    int x = m.add_var(0, 0.4, 1.0);
    int y = m.add_var(0, kInf, 2.0);
    auto& r = m.add_row(1.0, kInf);
    r.terms = {{x, 1.0}, {y, 1.0}};
    Solution s = solve(m);
    CHECK(s.objective == doctest::Approx(0.4 + 2 * 0.6).epsilon(1e-9));
    CHECK(s.x(x) == doctest::Approx(0.4));
    CHECK(s.x(y) == doctest::Approx(0.6));
}

TEST_CASE("equality rows and free variables") {
    // min |free var pinned by equality|: x free, x + y = 3, y in [0,1], min x
    Model m;
    int x = m.add_var(-kInf, kInf, 1.0);
    int y = m.add_var(0, 1, 0.0);
    auto& r = m.add_row(3.0, 3.0);
    r.terms = {{x, 1.0}, {y, 1.0}};
    Solution s = solve(m);
    CHECK(s.objective == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(s.x(y) == doctest::Approx(1.0));
}

TEST_CASE("infeasible box and infeasible rows both throw") {
    Model a;
    int v = a.add_var(0, 1, 1.0);
    auto& r = a.add_row(5.0, kInf);
    r.terms = {{v, 1.0}};
    CHECK_THROWS_AS(solve(a), InfeasibleError);

    Model b;
    int w = b.add_var(0, 1, 1.0);
    auto& r1 = b.add_row(0.8, kInf);
    r1.terms = {{w, 1.0}};
    auto& r2 = b.add_row(-kInf, 0.2);
    r2.terms = {{w, 1.0}};
    CHECK_THROWS_AS(solve(b), InfeasibleError);
}

TEST_CASE("unbounded relaxation throws") {
    Model m;
    m.add_var(0, kInf, -1.0);
    CHECK_THROWS_AS(solve_relaxation(m), InfeasibleError);
}

TEST_CASE("knapsack by branch and bound") {
    // max 5a + 4b + 3c  s.t. 2a + 3b + c <= 4, binary -> a = c = 1, value 8.
    Model m;
    int a = m.add_var(0, 1, -5.0, true);
    int b = m.add_var(0, 1, -4.0, true);
    int c = m.add_var(0, 1, -3.0, true);
    auto& r = m.add_row(-kInf, 4.0);
    r.terms = {{a, 2.0}, {b, 3.0}, {c, 1.0}};
    Solution s = solve(m);
    CHECK(s.status == Status::optimal);
    CHECK(s.objective == doctest::Approx(-8.0).epsilon(1e-9));
    CHECK(s.x(a) == doctest::Approx(1.0));
    CHECK(s.x(b) == doctest::Approx(0.0));
    CHECK(s.x(c) == doctest::Approx(1.0));
}

TEST_CASE("integrality bites relative to the relaxation") {
    // max x + y s.t. 2x + y <= 2.5, x + 2y <= 2.5, binaries.
    Model m;
    int x = m.add_var(0, 1, -1.0, true);
    int y = m.add_var(0, 1, -1.0, true);
    m.add_row(-kInf, 2.5).terms = {{x, 2.0}, {y, 1.0}};
    m.add_row(-kInf, 2.5).terms = {{x, 1.0}, {y, 2.0}};
    Solution relax = solve_relaxation(m);
    CHECK(relax.objective == doctest::Approx(-5.0 / 3).epsilon(1e-9));
    Solution s = solve(m);
    CHECK(s.objective == doctest::Approx(-1.0).epsilon(1e-9));
    CHECK(s.x(x) + s.x(y) == doctest::Approx(1.0));
}

TEST_CASE("general integers, not only binaries") {
    // min 3x - 2y s.t. x + y >= 3.7, x,y integer in [0,5].
    Model m;
    int x = m.add_var(0, 5, 3.0, true);
    int y = m.add_var(0, 5, -2.0, true);
    m.add_row(3.7, kInf).terms = {{x, 1.0}, {y, 1.0}};
    Solution s = solve(m);
    CHECK(s.x(y) == doctest::Approx(5.0));
    CHECK(s.x(x) == doctest::Approx(0.0));
    CHECK(s.objective == doctest::Approx(-10.0).epsilon(1e-9));
}

TEST_CASE("no integer point inside a thin slab") {
    // 0.3 <= x <= 0.7 with x integer is infeasible though the LP is not.
    Model m;
    int x = m.add_var(0, 1, 1.0, true);
    m.add_row(0.3, 0.7).terms = {{x, 1.0}};
    CHECK_THROWS_AS(solve(m), InfeasibleError);
}

TEST_CASE("node budget of zero raises a timeout") {
    Model m;
    int x = m.add_var(0, 1, -1.0, true);
    m.add_row(-kInf, 0.5).terms = {{x, 1.0}};
    SolveOptions opt;
    opt.node_limit = 0;
    CHECK_THROWS_AS(solve(m, opt), TimeoutError);
}

TEST_CASE("random MILPs agree with exhaustive enumeration") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> coef(-2.0, 2.0);
    for (int trial = 0; trial < 30; ++trial) {
        const int nb = 6, nc = 2, nr = 4;
        Model m;
        for (int j = 0; j < nb; ++j) m.add_var(0, 1, coef(rng), true);
        for (int j = 0; j < nc; ++j) m.add_var(0, 1.5, coef(rng), false);
        std::vector<std::vector<double>> A(nr, std::vector<double>(nb + nc));
        std::vector<double> rhs(nr);
        for (int i = 0; i < nr; ++i) {
            auto& row = m.add_row(-kInf, 0.0);
            double s = 0;
            for (int j = 0; j < nb + nc; ++j) {
                A[i][static_cast<std::size_t>(j)] = coef(rng);
                row.terms.push_back({j, A[i][static_cast<std::size_t>(j)]});
                s += std::abs(A[i][static_cast<std::size_t>(j)]);
            }
            rhs[static_cast<std::size_t>(i)] = 0.3 * s;  // keeps most instances feasible
            row.hi = rhs[static_cast<std::size_t>(i)];
        }

        // Oracle: enumerate the 64 binary patterns, solve the continuous
        // remainder by LP on the same solver restricted to fixed binaries.
        double best = kInf;
        for (int mask = 0; mask < (1 << nb); ++mask) {
            Model sub = m;
            bool zero_ok = true;
            for (int j = 0; j < nb; ++j) {
                double v = (mask >> j) & 1 ? 1.0 : 0.0;
                sub.col_lo[static_cast<std::size_t>(j)] = v;
                sub.col_hi[static_cast<std::size_t>(j)] = v;
                sub.is_integer[static_cast<std::size_t>(j)] = false;
            }
            (void)zero_ok;
            try {
                Solution s = solve_relaxation(sub);
                best = std::min(best, s.objective);
            } catch (const InfeasibleError&) {
            }
        }

        if (best == kInf) {
            CHECK_THROWS_AS(solve(m), InfeasibleError);
        } else {
            Solution s = solve(m);
            CHECK(s.objective == doctest::Approx(best).epsilon(1e-6));
            // The reported point satisfies every row.
            for (int i = 0; i < nr; ++i) {
                double ax = 0;
                for (int j = 0; j < nb + nc; ++j) ax += A[i][static_cast<std::size_t>(j)] * s.x(j);
                CHECK(ax <= rhs[static_cast<std::size_t>(i)] + 1e-6);
            }
        }
    }
}
