#include <cmath>
#include <random>

#include "doctest.h"
#include "risr/simplex.hpp"

using namespace risr;

TEST_CASE("two variable corner optimum") {
  LinearProgram lp;
  const int x = lp.add_var(0.0, kInf, -3.0, "x");
  const int y = lp.add_var(0.0, kInf, -5.0, "y");
  lp.add_row({x}, {1.0}, -kInf, 4.0, "cap-x");
  lp.add_row({y}, {1.0}, -kInf, 6.0, "cap-y");
  lp.add_row({x, y}, {3.0, 2.0}, -kInf, 18.0, "mix");
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-36.0));
  CHECK(s.x(x) == doctest::Approx(2.0));
  CHECK(s.x(y) == doctest::Approx(6.0));
}

TEST_CASE("equality and ranged rows") {
  LinearProgram lp;
  const int a = lp.add_var(0.0, 10.0, 1.0, "a");
  const int b = lp.add_var(0.0, 10.0, 2.0, "b");
  lp.add_row({a, b}, {1.0, 1.0}, 7.0, 7.0, "balance");
  lp.add_row({a, b}, {1.0, -1.0}, -2.0, 2.0, "spread");
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  // Cheapest split of 7 with |a-b| <= 2: a = 4.5, b = 2.5.
  CHECK(s.x(a) == doctest::Approx(4.5));
  CHECK(s.x(b) == doctest::Approx(2.5));
  CHECK(s.objective == doctest::Approx(9.5));
}

TEST_CASE("negative lower bounds and free-ish variables") {
  LinearProgram lp;
  const int u = lp.add_var(-5.0, 5.0, 1.0, "u");
  const int v = lp.add_var(-3.0, 8.0, -1.0, "v");
  lp.add_row({u, v}, {1.0, 1.0}, -1.0, 1.0, "window");
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  // u as low as possible, v as high as possible inside the window.
  CHECK(s.x(u) == doctest::Approx(-5.0));
  CHECK(s.x(v) == doctest::Approx(6.0));
  CHECK(s.objective == doctest::Approx(-11.0));
}

TEST_CASE("infeasibility carries a row certificate") {
  LinearProgram lp;
  const int x = lp.add_var(0.0, 1.0, 0.0, "x");
  lp.add_row({x}, {1.0}, 2.0, kInf, "demands-two");
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Infeasible);
  REQUIRE(!s.infeasible_rows.empty());
  CHECK(lp.rows[s.infeasible_rows.front()].name == "demands-two");
}

TEST_CASE("conflicting rows are infeasible") {
  LinearProgram lp;
  const int x = lp.add_var(-kInf, kInf, 0.0, "x");
  const int y = lp.add_var(-kInf, kInf, 0.0, "y");
  lp.add_row({x, y}, {1.0, 1.0}, 4.0, kInf, "at-least");
  lp.add_row({x, y}, {1.0, 1.0}, -kInf, 3.0, "at-most");
  const LpSolution s = solve_lp(lp);
  CHECK(s.status == LpStatus::Infeasible);
}

TEST_CASE("unbounded ray is detected") {
  LinearProgram lp;
  const int x = lp.add_var(0.0, kInf, -1.0, "x");
  const int y = lp.add_var(0.0, kInf, 0.0, "y");
  lp.add_row({x, y}, {1.0, -1.0}, -kInf, 1.0, "gap");
  const LpSolution s = solve_lp(lp);
  CHECK(s.status == LpStatus::Unbounded);
}

TEST_CASE("degenerate pivoting terminates") {
  // Classic cycling-prone construction; Bland's fallback must finish it.
  LinearProgram lp;
  const int x1 = lp.add_var(0.0, kInf, -0.75, "x1");
  const int x2 = lp.add_var(0.0, kInf, 150.0, "x2");
  const int x3 = lp.add_var(0.0, kInf, -0.02, "x3");
  const int x4 = lp.add_var(0.0, kInf, 6.0, "x4");
  lp.add_row({x1, x2, x3, x4}, {0.25, -60.0, -0.04, 9.0}, -kInf, 0.0, "r1");
  lp.add_row({x1, x2, x3, x4}, {0.5, -90.0, -0.02, 3.0}, -kInf, 0.0, "r2");
  lp.add_row({x3}, {1.0}, -kInf, 1.0, "r3");
  const LpSolution s = solve_lp(lp);
  REQUIRE(s.status == LpStatus::Optimal);
  CHECK(s.objective == doctest::Approx(-0.05));
}

TEST_CASE("random dense programs agree with vertex enumeration") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> cu(-2.0, 2.0), au(-1.0, 1.0),
      bu(1.0, 4.0);
  for (int rep = 0; rep < 25; ++rep) {
    // Two bounded variables, three one-sided rows: brute-force the optimum
    // over all basic points (bound/row intersections).
    LinearProgram lp;
    const double c0 = cu(rng), c1 = cu(rng);
    lp.add_var(0.0, 3.0, c0, "x0");
    lp.add_var(0.0, 3.0, c1, "x1");
    std::vector<std::array<double, 3>> rows;
    for (int r = 0; r < 3; ++r) {
      rows.push_back({au(rng), au(rng), bu(rng)});
      lp.add_row({0, 1}, {rows[r][0], rows[r][1]}, -kInf, rows[r][2],
                 "r" + std::to_string(r));
    }
    const LpSolution s = solve_lp(lp);
    REQUIRE(s.status == LpStatus::Optimal);

    // Candidate vertices: intersections of every pair of active constraints.
    std::vector<std::array<double, 2>> lines;
    lines.push_back({1.0, 0.0});  // x0 = 0 or 3 handled via offsets below
    double best = 1e30;
    std::vector<std::array<double, 3>> all = rows;
    all.push_back({1.0, 0.0, 0.0});
    all.push_back({1.0, 0.0, 3.0});
    all.push_back({0.0, 1.0, 0.0});
    all.push_back({0.0, 1.0, 3.0});
    auto feasible = [&](double x, double y) {
      if (x < -1e-9 || x > 3.0 + 1e-9 || y < -1e-9 || y > 3.0 + 1e-9)
        return false;
      for (const auto& r : rows)
        if (r[0] * x + r[1] * y > r[2] + 1e-9) return false;
      return true;
    };
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = i + 1; j < all.size(); ++j) {
        const double det = all[i][0] * all[j][1] - all[i][1] * all[j][0];
        if (std::abs(det) < 1e-12) continue;
        const double x =
            (all[i][2] * all[j][1] - all[i][1] * all[j][2]) / det;
        const double y =
            (all[i][0] * all[j][2] - all[i][2] * all[j][0]) / det;
        if (feasible(x, y)) best = std::min(best, c0 * x + c1 * y);
      }
    if (feasible(0.0, 0.0)) best = std::min(best, 0.0);
    REQUIRE(best < 1e29);
    CHECK(s.objective == doctest::Approx(best).epsilon(1e-7));
  }
}

TEST_CASE("iteration cap reports instead of spinning") {
  LinearProgram lp;
  for (int i = 0; i < 6; ++i)
    lp.add_var(0.0, kInf, -1.0, "x" + std::to_string(i));
  for (int r = 0; r < 4; ++r) {
    std::vector<int> idx;
    std::vector<double> val;
    for (int i = 0; i < 6; ++i) {
      idx.push_back(i);
      val.push_back(1.0 + 0.1 * ((r + i) % 3));
    }
    lp.add_row(idx, val, -kInf, 10.0, "cap" + std::to_string(r));
  }
  const LpSolution s = solve_lp(lp, 1);
  CHECK(s.status == LpStatus::IterationLimit);
}
