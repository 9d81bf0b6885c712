#include <Eigen/Dense>
#include <cmath>
#include <vector>

#include "doctest.h"
#include "helpers.hpp"
#include "risr/dispatch.hpp"

using namespace risr;

namespace {

MultiRegionSystem one_region() {
  std::vector<Region> r(1);
  r[0] = {0, 60.0, 0.0, 0.0, 10.0, 2.0};
  return MultiRegionSystem(std::move(r), {}, 60.0, 1000.0);
}

Generator base_gen() {
  Generator g;
  g.id = "base";
  g.region = 0;
  g.kind = GenKind::Sg;
  g.p_min = 1.0;
  g.p_max = 5.0;
  g.cost_lin = 10.0;
  g.cost_const = 50.0;
  g.cost_up = 80.0;
  g.inertia = 40.0;
  g.initially_on = true;
  g.initial_p = 2.0;
  return g;
}

Generator peak_gen() {
  Generator g;
  g.id = "peak";
  g.region = 0;
  g.kind = GenKind::FastSg;
  g.p_min = 0.5;
  g.p_max = 4.0;
  g.cost_lin = 35.0;
  g.cost_const = 20.0;
  g.cost_up = 60.0;
  g.inertia = 15.0;
  return g;
}

DemandSeries demand_of(std::vector<std::vector<double>> rows,
                       double hours = 0.5) {
  DemandSeries d;
  d.by_region = std::move(rows);
  d.period_hours = hours;
  return d;
}

// Brute force over every binary assignment: fix, solve the remaining linear
// program, keep the best feasible objective.
double exhaustive_best(const DispatchProblem& prob) {
  const int nb = static_cast<int>(prob.binary_cols.size());
  REQUIRE(nb <= 12);
  double best = kInf;
  for (int mask = 0; mask < (1 << nb); ++mask) {
    LinearProgram lp = prob.lp;
    for (int k = 0; k < nb; ++k) {
      const double v = (mask >> k) & 1 ? 1.0 : 0.0;
      const int col = prob.binary_cols[k];
      if (v < lp.lo[col] || v > lp.up[col]) { lp.rows.clear(); break; }
      lp.lo[col] = v;
      lp.up[col] = v;
    }
    if (lp.rows.empty()) continue;  // assignment conflicts with must-run
    const LpSolution s = solve_lp(lp);
    if (s.status == LpStatus::Optimal) best = std::min(best, s.objective);
  }
  return best;
}

}  // namespace

TEST_CASE("branch and bound equals exhaustive enumeration") {
  const MultiRegionSystem sys = one_region();
  SecurityModel none;
  DispatchOptions opt;
  opt.gap_abs = 0.0;
  opt.pwl_segments = 2;

  SUBCASE("two units, three periods") {
    const auto prob = build_problem(
        sys, {base_gen(), peak_gen()},
        demand_of({{3.0}, {7.5}, {2.0}}), none, opt);
    CHECK(prob.binary_cols.size() == 6);
    const Schedule sched = solve_dispatch(prob, opt);
    REQUIRE(sched.status == "optimal");
    const double ref = exhaustive_best(prob);
    CHECK(sched.objective ==
          doctest::Approx(ref).epsilon(1e-6));
  }

  SUBCASE("minimum up time changes the optimum") {
    Generator p = peak_gen();
    p.min_up_h = 1.5;  // three half-hour periods
    const auto prob = build_problem(
        sys, {base_gen(), p}, demand_of({{6.0}, {2.0}, {6.0}, {2.0}}), none,
        opt);
    const Schedule sched = solve_dispatch(prob, opt);
    REQUIRE(sched.status == "optimal");
    CHECK(sched.objective == doctest::Approx(exhaustive_best(prob)).epsilon(1e-6));
    // Once started for the first peak it must ride through.
    if (sched.rows[0][1].on) {
      CHECK(sched.rows[1][1].on);
      CHECK(sched.rows[2][1].on);
    }
  }

  SUBCASE("aggregate security row forces the expensive unit on") {
    SecurityModel coi = coi_security(sys, 2.0 / (2.0 * 50.0));
    // rhs = dP/(2 lim) = 50: the base unit alone (40 s) falls short.
    const auto prob = build_problem(sys, {base_gen(), peak_gen()},
                                    demand_of({{3.0}, {3.0}}), coi, opt);
    const Schedule sched = solve_dispatch(prob, opt);
    REQUIRE(sched.status == "optimal");
    CHECK(sched.objective == doctest::Approx(exhaustive_best(prob)).epsilon(1e-6));
    for (int t = 0; t < 2; ++t) {
      CHECK(sched.rows[t][0].on);
      CHECK(sched.rows[t][1].on);
      CHECK(sched.region_inertia[t][0] == doctest::Approx(55.0));
    }
  }
}

TEST_CASE("disjunctive cells in a small program") {
  // Two regions; the secure set is an L shape in (H0, H1): either H0 >= 50,
  // or H0 >= 20 with H1 >= 60. Decomposed by hand into two boxes.
  std::vector<Region> r(2);
  r[0] = {0, 40.0, 10.0, 80.0, 8.0, 2.0};
  r[1] = {1, 50.0, 20.0, 90.0, 10.0, 0.0};
  const MultiRegionSystem sys(std::move(r), {{0, 1, 1.0}}, 60.0, 1000.0);

  ConvexCell right;
  right.vertices = {{50.0, 20.0}, {80.0, 20.0}, {80.0, 90.0}, {50.0, 90.0}};
  ConvexCell upper;
  upper.vertices = {{20.0, 60.0}, {50.0, 60.0}, {50.0, 90.0}, {20.0, 90.0}};
  for (ConvexCell* c : {&right, &upper}) {
    const auto& v = c->vertices;
    for (std::size_t i = 0; i < v.size(); ++i) {
      const auto& a = v[i];
      const auto& b = v[(i + 1) % v.size()];
      Eigen::Vector2d normal(b.y() - a.y(), -(b.x() - a.x()));
      normal.normalize();
      c->halfspaces.push_back({normal, normal.dot(a)});
    }
  }
  SecurityModel cells;
  cells.kind = SecurityModel::Kind::Cells;
  cells.cells = to_disjunctive({right, upper},
                               Box2{{10.0, 20.0}, {80.0, 90.0}}, {0, 1});

  Generator g0 = base_gen();  // 40 s in region 0: not secure alone
  g0.p_max = 8.0;
  Generator g1 = peak_gen();
  g1.id = "r1-sg";
  g1.region = 1;
  g1.inertia = 30.0;
  Generator vi;
  vi.id = "vi";
  vi.region = 1;
  vi.kind = GenKind::ViIbr;
  vi.vi_max = 40.0;
  vi.vi_cost = 100.0;
  vi.must_run = true;
  vi.initially_on = true;

  DispatchOptions opt;
  opt.gap_abs = 0.0;
  opt.pwl_segments = 2;
  const auto prob = build_problem(sys, {g0, g1, vi},
                                  demand_of({{3.0, 1.0}, {4.0, 1.0}}), cells,
                                  opt);
  CHECK(prob.binary_cols.size() == 10);  // 3 u + 2 z per period
  const Schedule sched = solve_dispatch(prob, opt);
  REQUIRE(sched.status == "optimal");
  CHECK(sched.objective == doctest::Approx(exhaustive_best(prob)).epsilon(1e-6));

  const ValidationReport rep = validate_schedule(sched, prob, sys, 1, 0, 0.0);
  CHECK(rep.ok);
  for (int t = 0; t < 2; ++t) {
    CHECK(sched.active_cell[t] >= 0);
    // Cheapest securing: stay in the upper cell with bought virtual inertia
    // rather than committing nothing feasible in region 0 alone.
    const double h0 = sched.region_inertia[t][0];
    const double h1 = sched.region_inertia[t][1];
    const bool in_right = h0 >= 50.0 - 1e-6;
    const bool in_upper = h0 >= 20.0 - 1e-6 && h1 >= 60.0 - 1e-6;
    CHECK((in_right || in_upper));
  }
}

TEST_CASE("ramp limits couple the periods") {
  Generator g = base_gen();
  g.p_max = 10.0;
  g.ramp = 2.0;
  g.must_run = true;
  const auto prob =
      build_problem(one_region(), {g}, demand_of({{4.0}, {6.0}, {8.0}}),
                    SecurityModel{}, {});
  const Schedule sched = solve_dispatch(prob, {});
  REQUIRE(sched.status == "optimal");
  CHECK(sched.rows[0][0].power == doctest::Approx(4.0));
  CHECK(sched.rows[2][0].power == doctest::Approx(8.0));

  // A jump the ramp cannot follow is reported infeasible with its rows.
  const auto bad = build_problem(one_region(), {g},
                                 demand_of({{4.0}, {9.5}}), SecurityModel{},
                                 {});
  const Schedule none = solve_dispatch(bad, {});
  CHECK(none.status == "infeasible");
  CHECK_FALSE(none.infeasible_rows.empty());
}

TEST_CASE("validation flags a tampered schedule") {
  const MultiRegionSystem sys = one_region();
  const auto prob = build_problem(sys, {base_gen(), peak_gen()},
                                  demand_of({{3.0}, {6.5}}), SecurityModel{},
                                  {});
  Schedule sched = solve_dispatch(prob, {});
  REQUIRE(sched.status == "optimal");
  REQUIRE(validate_schedule(sched, prob, sys, -1, -1, 0.0).ok);

  SUBCASE("power above the committed limit") {
    sched.rows[0][0].power = 9.0;
    const auto rep = validate_schedule(sched, prob, sys, -1, -1, 0.0);
    CHECK_FALSE(rep.ok);
    REQUIRE(!rep.violations.empty());
  }
  SUBCASE("output while offline") {
    // Period 1 demand exceeds the base unit's cap, so the peak unit must be
    // on there; clearing the flag while keeping its output is inconsistent.
    REQUIRE(sched.rows[1][1].power > 0.0);
    sched.rows[1][1].on = 0;
    const auto rep = validate_schedule(sched, prob, sys, -1, -1, 0.0);
    CHECK_FALSE(rep.ok);
  }
  SUBCASE("broken minimum down time") {
    // peak initially off with min_down 1 h: cycling on-off-on in half-hour
    // periods violates the off dwell if it stops after a start.
    Generator p = peak_gen();
    p.min_down_h = 1.0;
    const auto prob2 = build_problem(sys, {base_gen(), p},
                                     demand_of({{6.0}, {2.0}, {6.0}}),
                                     SecurityModel{}, {});
    Schedule s2 = solve_dispatch(prob2, {});
    REQUIRE(s2.status == "optimal");
    s2.rows[0][1].on = 1;
    s2.rows[0][1].power = 1.0;
    s2.rows[1][1].on = 0;
    s2.rows[1][1].power = 0.0;
    s2.rows[2][1].on = 1;
    s2.rows[2][1].power = 1.0;
    s2.rows[0][0].power = 5.0;
    s2.rows[1][0].power = 2.0;
    s2.rows[2][0].power = 5.0;
    const auto rep = validate_schedule(s2, prob2, sys, -1, -1, 0.0);
    CHECK_FALSE(rep.ok);
  }
}

TEST_CASE("security model construction") {
  const MultiRegionSystem sys = testing::two_region();
  const double lim = 1.0 / 60.0;

  const SecurityModel coi = coi_security(sys, lim);
  CHECK(coi.kind == SecurityModel::Kind::Linear);
  CHECK(coi.linear_coeffs.size() == 2);
  CHECK(coi.linear_coeffs(0) == doctest::Approx(1.0));
  CHECK(coi.linear_coeffs(1) == doctest::Approx(1.0));
  CHECK(coi.linear_rhs == doctest::Approx(1.8 / (2.0 * lim)));

  RocofInertiaField field(sys, {0}, 0, 1);
  ConservativeFit fit;
  fit.coeffs = Eigen::VectorXd::Constant(1, -0.004);
  fit.offset = 3.0;
  const SecurityModel cons = conservative_security(field, fit, lim);
  CHECK(cons.kind == SecurityModel::Kind::Linear);
  CHECK(cons.linear_coeffs(0) == doctest::Approx(2.0 * lim + 0.004));
  CHECK(cons.linear_coeffs(1) == doctest::Approx(2.0 * lim));  // not adjustable
  CHECK(cons.linear_rhs == doctest::Approx(1.8 + 3.0));
}

TEST_CASE("problem construction rejects inconsistent input") {
  const MultiRegionSystem sys = one_region();
  CHECK_THROWS_AS(
      build_problem(sys, {}, demand_of({{1.0}}), SecurityModel{}, {}),
      ScenarioError);
  CHECK_THROWS_AS(build_problem(sys, {base_gen()}, demand_of({}),
                                SecurityModel{}, {}),
                  ScenarioError);
  CHECK_THROWS_AS(build_problem(sys, {base_gen()},
                                demand_of({{1.0, 2.0}}),  // two regions of one
                                SecurityModel{}, {}),
                  ScenarioError);
  Generator g = base_gen();
  g.region = 3;
  CHECK_THROWS_AS(build_problem(sys, {g}, demand_of({{1.0}}),
                                SecurityModel{}, {}),
                  ScenarioError);
  g = base_gen();
  g.p_min = 6.0;  // above p_max
  CHECK_THROWS_AS(build_problem(sys, {g}, demand_of({{1.0}}),
                                SecurityModel{}, {}),
                  ScenarioError);
  g = base_gen();
  g.cost_quad = -1.0;
  CHECK_THROWS_AS(build_problem(sys, {g}, demand_of({{1.0}}),
                                SecurityModel{}, {}),
                  ScenarioError);
}

TEST_CASE("piecewise cost matches the quadratic at the knots") {
  Generator g = base_gen();
  g.cost_quad = 2.0;
  g.cost_lin = 5.0;
  g.cost_const = 100.0;
  g.must_run = true;
  // Demand pins output at p_min + half the range = an interior knot for two
  // segments, where the piecewise-linear cost is exact.
  const double knot = g.p_min + 0.5 * (g.p_max - g.p_min);
  DispatchOptions opt;
  opt.pwl_segments = 2;
  opt.gap_abs = 0.0;
  const auto prob = build_problem(one_region(), {g}, demand_of({{knot}}), {},
                                  opt);
  const Schedule sched = solve_dispatch(prob, opt);
  REQUIRE(sched.status == "optimal");
  const double exact =
      0.5 * (g.cost_quad * knot * knot + g.cost_lin * knot + g.cost_const);
  CHECK(sched.objective == doctest::Approx(exact).epsilon(1e-9));
}

TEST_CASE("fleet JSON parsing") {
  const char* good = R"({
    "generators": [
      {"id": "a", "region": 0, "kind": "sg", "p_min_pu": 1.0, "p_max_pu": 5.0,
       "inertia_s": 30.0, "initially_on": true},
      {"id": "b", "region": 0, "kind": "vi-ibr", "p_max_pu": 0.0,
       "vi_max_s": 25.0, "vi_cost": 120.0}
    ],
    "dispatch": {
      "period_hours": 1.0,
      "rocof_lim_hz_per_s": 0.9,
      "observed": 0, "disturbed": 0,
      "demand_pu": [[2.0], [3.0]]
    }
  })";
  const FleetData fd = load_fleet(good, 60.0);
  CHECK(fd.generators.size() == 2);
  CHECK(fd.generators[0].kind == GenKind::Sg);
  CHECK(fd.generators[1].kind == GenKind::ViIbr);
  CHECK(fd.generators[1].vi_max == doctest::Approx(25.0));
  CHECK(fd.demand.period_hours == doctest::Approx(1.0));
  CHECK(fd.demand.by_region.size() == 2);
  CHECK(fd.rocof_lim == doctest::Approx(0.9 / 60.0));

  CHECK_THROWS_AS(load_fleet(R"({"generators": []})", 60.0), ScenarioError);
  CHECK_THROWS_AS(load_fleet(R"({
    "generators": [{"region": 0, "p_max_pu": 1.0}],
    "dispatch": {"demand_pu": [[1.0]]}
  })", 60.0), ScenarioError);
  CHECK_THROWS_AS(load_fleet(R"({
    "generators": [{"id": "a", "region": 0, "p_max_pu": 1.0, "kind": "coal"}],
    "dispatch": {"demand_pu": [[1.0]]}
  })", 60.0), ScenarioError);
}

TEST_CASE("solver is deterministic") {
  const auto prob = build_problem(one_region(), {base_gen(), peak_gen()},
                                  demand_of({{3.0}, {7.0}, {2.5}}),
                                  SecurityModel{}, {});
  const Schedule a = solve_dispatch(prob, {});
  const Schedule b = solve_dispatch(prob, {});
  CHECK(a.objective == b.objective);
  CHECK(a.nodes == b.nodes);
  CHECK(a.status == b.status);
}
