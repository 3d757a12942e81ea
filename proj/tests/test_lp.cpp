#include <doctest.h>

#include <sstream>

#include "fixtures.hpp"
#include "lp.hpp"

using namespace mpctune;

namespace {
LpProblem empty_rows_problem(int n) {
  LpProblem p;
  p.c.setZero(n);
  p.a_eq.resize(0, n);
  p.b_eq.resize(0);
  p.a_ub.resize(0, n);
  p.b_ub.resize(0);
  p.lb.setZero(n);
  p.ub.setConstant(n, kInf);
  return p;
}

double feasibility_residual(const LpProblem& p, const Eigen::VectorXd& x) {
  double worst = 0.0;
  for (int i = 0; i < p.num_eq(); ++i) {
    const double r = std::abs(p.a_eq.row(i).dot(x) - p.b_eq(i));
    worst = std::max(worst, r / (1.0 + std::abs(p.b_eq(i))));
  }
  for (int i = 0; i < p.num_ub(); ++i) {
    const double r = p.a_ub.row(i).dot(x) - p.b_ub(i);
    worst = std::max(worst, r / (1.0 + std::abs(p.b_ub(i))));
  }
  for (int j = 0; j < p.num_vars(); ++j) {
    worst = std::max(worst, p.lb(j) - x(j));
    worst = std::max(worst, x(j) - p.ub(j));
  }
  return worst;
}
}  // namespace

TEST_CASE("one-variable examples") {
  SUBCASE("min -x s.t. x <= 1, x >= 0") {
    LpProblem p = empty_rows_problem(1);
    p.c(0) = -1.0;
    p.a_ub.resize(1, 1);
    p.a_ub << 1.0;
    p.b_ub.resize(1);
    p.b_ub << 1.0;
    const auto s = solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x(0) == doctest::Approx(1.0));
    CHECK(s.objective == doctest::Approx(-1.0));
  }

  SUBCASE("x >= 2 and x <= 1 is infeasible") {
    LpProblem p = empty_rows_problem(1);
    p.c(0) = 1.0;
    p.a_ub.resize(2, 1);
    p.a_ub << -1.0, 1.0;
    p.b_ub.resize(2);
    p.b_ub << -2.0, 1.0;
    const auto s = solve(p);
    CHECK(s.status == LpStatus::Infeasible);
  }

  SUBCASE("min -x with x free above is unbounded") {
    LpProblem p = empty_rows_problem(1);
    p.c(0) = -1.0;
    p.a_ub.resize(1, 1);
    p.a_ub << -1.0;  // -x <= 0, i.e. x >= 0 as a row
    p.b_ub.resize(1);
    p.b_ub << 0.0;
    p.ub(0) = kInf;
    const auto s = solve(p);
    CHECK(s.status == LpStatus::Unbounded);
  }

  SUBCASE("bounds-only problem") {
    LpProblem p = empty_rows_problem(2);
    p.c << 3.0, -2.0;
    p.lb << -1.0, -1.0;
    p.ub << 2.0, 5.0;
    const auto s = solve(p);
    REQUIRE(s.status == LpStatus::Optimal);
    CHECK(s.x(0) == -1.0);
    CHECK(s.x(1) == 5.0);
  }
}

TEST_CASE("equality rows and mixed bounds") {
  // min x0 + 2 x1 + 3 x2  s.t.  x0 + x1 + x2 = 4,  x0 <= 1.5, x1 <= 2, x2 <= 5
  LpProblem p = empty_rows_problem(3);
  p.c << 1.0, 2.0, 3.0;
  p.a_eq.resize(1, 3);
  p.a_eq << 1.0, 1.0, 1.0;
  p.b_eq.resize(1);
  p.b_eq << 4.0;
  p.ub << 1.5, 2.0, 5.0;
  const auto s = solve(p);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.x(0) == doctest::Approx(1.5));
  CHECK(s.x(1) == doctest::Approx(2.0));
  CHECK(s.x(2) == doctest::Approx(0.5));
  CHECK(s.objective == doctest::Approx(7.0));
}

TEST_CASE("negative lower bounds route through the bounded simplex") {
  // min x0 + x1  s.t. x0 + 2 x1 >= 1  with x in [-5, 5]^2
  LpProblem p = empty_rows_problem(2);
  p.c << 1.0, 1.0;
  p.a_ub.resize(1, 2);
  p.a_ub << -1.0, -2.0;
  p.b_ub.resize(1);
  p.b_ub << -1.0;
  p.lb << -5.0, -5.0;
  p.ub << 5.0, 5.0;
  const auto s = solve(p);
  REQUIRE(s.status == LpStatus::Optimal);
  // optimum at x0 = -5, x1 = 3
  CHECK(s.objective == doctest::Approx(-2.0));
}

TEST_CASE("random LPs match the vertex-enumeration oracle") {
  int feasible_count = 0;
  for (uint64_t seed = 0; seed < 60; ++seed) {
    const LpProblem p = fixtures::random_lp(seed);
    const auto oracle = fixtures::enumerate_lp_minimum(p);
    const auto s = solve(p);
    INFO("seed ", seed);
    if (oracle.feasible) {
      ++feasible_count;
      REQUIRE(s.status == LpStatus::Optimal);
      CHECK(s.objective == doctest::Approx(oracle.objective).epsilon(1e-6));
      CHECK(feasibility_residual(p, s.x) <= 1e-7);
    } else {
      CHECK(s.status == LpStatus::Infeasible);
    }
  }
  CHECK(feasible_count > 20);  // the generator must exercise both outcomes
}

TEST_CASE("weak-duality sanity via rejection sampling") {
  Rng rng(99);
  for (uint64_t seed = 100; seed < 110; ++seed) {
    const LpProblem p = fixtures::random_lp(seed);
    const auto s = solve(p);
    if (s.status != LpStatus::Optimal) continue;
    const int n = p.num_vars();
    int found = 0;
    for (int trial = 0; trial < 2000 && found < 50; ++trial) {
      Eigen::VectorXd x(n);
      for (int j = 0; j < n; ++j) x(j) = rng.uniform(p.lb(j), p.ub(j));
      bool ok = true;
      for (int i = 0; i < p.num_ub() && ok; ++i) {
        if (p.a_ub.row(i).dot(x) > p.b_ub(i)) ok = false;
      }
      if (!ok) continue;
      ++found;
      CHECK(p.c.dot(x) >= s.objective - 1e-9);
    }
  }
}

TEST_CASE("determinism: identical problems yield identical solutions") {
  const LpProblem p = fixtures::random_lp(7);
  const auto s1 = solve(p);
  const auto s2 = solve(p);
  REQUIRE(s1.status == s2.status);
  if (s1.status == LpStatus::Optimal) {
    CHECK(s1.iterations == s2.iterations);
    CHECK((s1.x - s2.x).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("tightening a bound never decreases the minimum") {
  for (uint64_t seed = 40; seed < 52; ++seed) {
    LpProblem p = fixtures::random_lp(seed);
    const auto s = solve(p);
    if (s.status != LpStatus::Optimal) continue;
    // shrink the box around each variable in turn
    for (int j = 0; j < p.num_vars(); ++j) {
      LpProblem q = p;
      const double mid = 0.5 * (q.lb(j) + q.ub(j));
      q.ub(j) = mid;
      const auto st = solve(q);
      if (st.status == LpStatus::Optimal) {
        CHECK(st.objective >= s.objective - 1e-9 * (1.0 + std::abs(s.objective)));
      }
    }
  }
}

TEST_CASE("input validation") {
  LpProblem p = empty_rows_problem(2);
  p.c << 1.0, 1.0;
  SUBCASE("dimension mismatch") {
    p.a_ub.resize(1, 3);
    p.b_ub.resize(1);
    CHECK_THROWS_AS(solve(p), InputError);
  }
  SUBCASE("lb > ub") {
    p.lb(0) = 2.0;
    p.ub(0) = 1.0;
    CHECK_THROWS_AS(solve(p), InputError);
  }
  SUBCASE("non-finite cost") {
    p.c(0) = kInf;
    CHECK_THROWS_AS(solve(p), InputError);
  }
}

TEST_CASE("LP text dump") {
  LpProblem p = empty_rows_problem(2);
  p.c << 1.0, -2.5;
  p.a_eq.resize(1, 2);
  p.a_eq << 1.0, 1.0;
  p.b_eq.resize(1);
  p.b_eq << 3.0;
  p.a_ub.resize(1, 2);
  p.a_ub << 2.0, -1.0;
  p.b_ub.resize(1);
  p.b_ub << 4.0;
  p.lb << 0.0, -kInf;
  p.ub << 10.0, kInf;
  p.var_names = {"alpha", "beta"};
  std::ostringstream os;
  write_lp_file(p, os);
  const std::string text = os.str();
  CHECK(text.find("Minimize") != std::string::npos);
  CHECK(text.find("Subject To") != std::string::npos);
  CHECK(text.find("= 3") != std::string::npos);
  CHECK(text.find("<= 4") != std::string::npos);
  CHECK(text.find("beta free") != std::string::npos);
  CHECK(text.find("End") != std::string::npos);
}
