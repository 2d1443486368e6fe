#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "aam/milp.hpp"
#include "aam/rng.hpp"
#include "test_support.hpp"

using namespace aam;
using namespace aam::milp;

TEST_CASE("empty model solves to zero") {
    MilpModel m;
    MilpSolution s = solve(m);
    CHECK(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(0.0));
}

TEST_CASE("two-binary knapsack by inspection") {
    MilpModel m;
    const int x = m.add_binary("x", -1.0);
    const int y = m.add_binary("y", -1.0);
    m.add_row({{x, 1.0}, {y, 1.0}}, Sense::LE, 1.0);
    MilpSolution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.objective == doctest::Approx(-1.0));
    CHECK(check_solution(m, s.x));
}

TEST_CASE("pure LP with bounds") {
    MilpModel m;
    const int x = m.add_var("x", 0.0, 4.0, -2.0, false);
    const int y = m.add_var("y", 0.0, 4.0, -3.0, false);
    m.add_row({{x, 1.0}, {y, 2.0}}, Sense::LE, 6.0);
    m.add_row({{x, 1.0}, {y, -1.0}}, Sense::GE, -2.0);
    MilpSolution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    // vertex sweep: x=4 forces y<=1, giving -8-3 = -11; all other vertices are worse
    CHECK(s.objective == doctest::Approx(-11.0));
    CHECK(s.x[x] == doctest::Approx(4.0));
    CHECK(s.x[y] == doctest::Approx(1.0));
}

TEST_CASE("infeasible and unbounded statuses") {
    {
        MilpModel m;
        const int x = m.add_binary("x");
        m.add_row({{x, 1.0}}, Sense::GE, 2.0);
        CHECK(solve(m).status == SolveStatus::Infeasible);
    }
    {
        MilpModel m;
        m.add_var("x", 0.0, kInf, -1.0, false);
        CHECK(solve(m).status == SolveStatus::Unbounded);
    }
}

TEST_CASE("integer rounding of near-integral bounds") {
    MilpModel m;
    const int x = m.add_var("x", 0.4, 2.6, 1.0, true);
    MilpSolution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.x[x] == doctest::Approx(1.0));
}

TEST_CASE("100 random integer programs match exhaustive enumeration") {
    Rng rng(20240811);
    int solved = 0, infeasible = 0;
    for (int iter = 0; iter < 100; ++iter) {
        testsupport::RandomMilp rm = testsupport::make_random_milp(rng);
        auto expect = testsupport::brute_force_milp(rm);
        MilpSolution s = solve(rm.model);
        if (expect) {
            REQUIRE(s.status == SolveStatus::Optimal);
            CHECK(s.objective == doctest::Approx(*expect).epsilon(1e-9));
            CHECK(check_solution(rm.model, s.x));
            ++solved;
        } else {
            REQUIRE(s.status == SolveStatus::Infeasible);
            ++infeasible;
        }
    }
    CHECK(solved > 20);
    CHECK(infeasible > 5);
}

TEST_CASE("LP relaxation bounds the integer optimum") {
    Rng rng(7);
    for (int iter = 0; iter < 40; ++iter) {
        testsupport::RandomMilp rm = testsupport::make_random_milp(rng);
        MilpSolution s = solve(rm.model);
        if (s.status != SolveStatus::Optimal) continue;
        CHECK(s.root_lp_objective <= s.objective + 1e-6);
    }
}

TEST_CASE("reproducibility: identical model gives identical result") {
    Rng rng(99);
    testsupport::RandomMilp rm = testsupport::make_random_milp(rng);
    MilpSolution a = solve(rm.model);
    MilpSolution b = solve(rm.model);
    CHECK(a.status == b.status);
    CHECK(a.objective == b.objective);
    CHECK(a.nodes == b.nodes);
    if (a.status == SolveStatus::Optimal) CHECK(a.x == b.x);
}

TEST_CASE("node limit carries the incumbent") {
    Rng rng(123);
    // a model that needs a few nodes; limit to 1 node
    MilpModel m;
    std::vector<int> xs;
    for (int j = 0; j < 6; ++j) xs.push_back(m.add_binary("x" + std::to_string(j), -1.0));
    std::vector<LinTerm> row;
    for (int j = 0; j < 6; ++j) row.push_back({xs[j], 2.0});
    m.add_row(std::move(row), Sense::LE, 7.0);
    SolveLimits limits;
    limits.max_nodes = 1;
    MilpSolution s = solve(m, limits);
    CHECK(s.status == SolveStatus::NodeLimit);
}

TEST_CASE("big-M indicator: guard fixed to 1 reduces to the plain constraint") {
    MilpModel m;
    const int x = m.add_var("x", 0.0, 10.0, 1.0, false);
    const int g = m.add_binary("g");
    LinExpr e;  // x - 4 >= 0 when g = 1
    e.add(x, 1.0);
    e.constant = -4.0;
    add_big_m_indicator(m, g, e, Sense::GE, 14.0);
    m.fix_var(g, 1.0);
    MilpSolution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.x[x] == doctest::Approx(4.0));
}

TEST_CASE("big-M indicator: guard fixed to 0 leaves the box unconstrained") {
    MilpModel m;
    const int x = m.add_var("x", 0.0, 10.0, 1.0, false);
    const int g = m.add_binary("g");
    LinExpr e;
    e.add(x, 1.0);
    e.constant = -4.0;
    add_big_m_indicator(m, g, e, Sense::GE, 14.0);
    m.fix_var(g, 0.0);
    MilpSolution s = solve(m);
    REQUIRE(s.status == SolveStatus::Optimal);
    CHECK(s.x[x] == doctest::Approx(0.0));  // free to sit at its cheap bound
}

TEST_CASE("big-M indicator rejects an uncertified M") {
    MilpModel m;
    const int x = m.add_var("x", 0.0, 100.0, 0.0, false);
    const int g = m.add_binary("g");
    LinExpr e;
    e.add(x, 1.0);
    e.constant = -4.0;
    CHECK_THROWS_AS(add_big_m_indicator(m, g, e, Sense::GE, 5.0), ConfigError);
}

TEST_CASE("randomized indicators match case-split enumeration") {
    Rng rng(4242);
    for (int iter = 0; iter < 60; ++iter) {
        MilpModel m;
        LinExpr e;
        const int nv = 5;
        for (int j = 0; j < nv; ++j) {
            const double lo = static_cast<double>(static_cast<int>(rng.below(5))) - 2.0;
            const double up = lo + static_cast<double>(rng.below(4));
            m.add_var("x" + std::to_string(j), lo, up, 0.0, false);
            e.add(j, static_cast<double>(static_cast<int>(rng.below(9))) - 4.0);
        }
        e.constant = static_cast<double>(static_cast<int>(rng.below(9))) - 4.0;
        const int g = m.add_binary("g");
        const Sense sense = rng.uniform() < 0.5 ? Sense::GE : Sense::LE;
        auto [blo, bhi] = m.expr_box(e);
        add_big_m_indicator(m, g, e, sense, std::max(std::abs(blo), std::abs(bhi)));

        for (int gv = 0; gv <= 1; ++gv) {
            MilpModel probe = m;
            probe.fix_var(g, gv);
            const bool lp_feasible = solve(probe).status == SolveStatus::Optimal;
            bool expect;
            if (gv == 0) {
                expect = true;  // relaxed side must never cut the box
            } else {
                expect = (sense == Sense::GE) ? (bhi >= -1e-9) : (blo <= 1e-9);
            }
            CHECK(lp_feasible == expect);
        }
    }
}

TEST_CASE("LP-format dump mentions variables and constraints") {
    MilpModel m;
    const int x = m.add_var("dep_time", 0.0, 5.0, 1.5, false);
    m.add_row({{x, 2.0}}, Sense::LE, 4.0, "cap");
    const std::string text = m.to_lp_format();
    CHECK(text.find("dep_time") != std::string::npos);
    CHECK(text.find("cap") != std::string::npos);
}
