#include <Eigen/Dense>
#include <cmath>
#include <random>

#include "doctest.h"
#include "risr/geometry.hpp"

using namespace risr;
using Eigen::Vector2d;

namespace {

double polyline_point_dist(const std::vector<Vector2d>& line,
                           const Vector2d& p) {
  double best = 1e30;
  for (std::size_t i = 1; i < line.size(); ++i) {
    const Vector2d a = line[i - 1], b = line[i];
    const Vector2d ab = b - a;
    const double len2 = ab.squaredNorm();
    double t = len2 > 0.0 ? (p - a).dot(ab) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    best = std::min(best, (p - (a + t * ab)).norm());
  }
  return best;
}

std::vector<Vector2d> arc_points(const Vector2d& c, double r, double a0,
                                 double a1, int n) {
  std::vector<Vector2d> pts;
  for (int i = 0; i < n; ++i) {
    const double a = a0 + (a1 - a0) * i / (n - 1);
    pts.push_back(c + r * Vector2d(std::cos(a), std::sin(a)));
  }
  return pts;
}

Polyhedron l_shape() {
  Polyhedron poly;
  poly.vertices = {{0.0, 0.0}, {4.0, 0.0}, {4.0, 1.0},
                   {1.0, 1.0}, {1.0, 3.0}, {0.0, 3.0}};
  return poly;
}

}  // namespace

TEST_CASE("polyline simplification keeps endpoints and stays close") {
  std::vector<Vector2d> pts;
  for (int i = 0; i <= 100; ++i) {
    const double x = i * 0.1;
    pts.push_back({x, std::sin(x)});
  }
  const double tol = 0.05;
  const auto simple = simplify_polyline(pts, tol);
  REQUIRE(simple.size() >= 2);
  CHECK(simple.size() < pts.size() / 2);
  CHECK(simple.front() == pts.front());
  CHECK(simple.back() == pts.back());
  // Subset property: every kept vertex is an input vertex.
  for (const auto& s : simple) {
    bool found = false;
    for (const auto& p : pts)
      if ((s - p).norm() == 0.0) { found = true; break; }
    CHECK(found);
  }
  for (const auto& p : pts)
    CHECK(polyline_point_dist(simple, p) <= tol + 1e-12);
}

TEST_CASE("frontier closure around the secure side") {
  const Box2 box{{0.0, 0.0}, {10.0, 10.0}};
  // Quarter circle from the bottom edge to the left edge around the origin
  // corner; secure side is outside the arc (away from the corner).
  const auto arc = arc_points({0.0, 0.0}, 4.0, 0.0, 1.5707963, 40);
  const Polyhedron poly = build_polyhedron({arc}, box, {9.0, 9.0});
  REQUIRE(poly.vertices.size() > 20);
  CHECK(is_simple_polygon(poly.vertices));
  CHECK(point_in_polygon(poly.vertices, {9.0, 9.0}));
  CHECK_FALSE(point_in_polygon(poly.vertices, {0.5, 0.5}));
  // Area = box minus the quarter disc, up to chord discretisation.
  CHECK(poly.area() ==
        doctest::Approx(100.0 - 0.25 * 3.14159265 * 16.0).epsilon(0.01));
}

TEST_CASE("closed frontier loops keep the island that holds the sample") {
  const Box2 box{{0.0, 0.0}, {20.0, 20.0}};
  auto loop = arc_points({10.0, 10.0}, 5.0, 0.0, 2.0 * 3.14159265358979, 80);
  loop.back() = loop.front();  // exact closure
  const Polyhedron poly = build_polyhedron({loop}, box, {10.0, 10.0});
  CHECK(poly.area() == doctest::Approx(3.14159265 * 25.0).epsilon(0.01));

  // The sample outside every closure candidate has no secure polygon.
  CHECK_THROWS_AS(build_polyhedron({loop}, box, {1.0, 1.0}), NumericalError);
}

TEST_CASE("detached frontier pockets are dropped, holes rejected") {
  const Box2 box{{0.0, 0.0}, {30.0, 30.0}};
  // Main frontier: open arc crossing the box; secure side holds (25, 25).
  const auto main_arc = arc_points({0.0, 0.0}, 18.0, 0.0, 1.5707963, 50);
  // Far-away pocket near the opposite corner, outside the main closure.
  const auto pocket = arc_points({2.0, 2.0}, 2.5, 0.0, 1.5707963, 12);

  const Polyhedron poly =
      build_polyhedron({main_arc, pocket}, box, {25.0, 25.0});
  CHECK(is_simple_polygon(poly.vertices));
  CHECK(point_in_polygon(poly.vertices, {25.0, 25.0}));

  // A detached loop strictly inside the chosen polygon means a hole.
  auto hole = arc_points({24.0, 24.0}, 2.0, 0.0, 2.0 * 3.14159265358979, 30);
  hole.back() = hole.front();
  CHECK_THROWS_AS(build_polyhedron({main_arc, hole}, box, {28.0, 12.0}),
                  NumericalError);
}

TEST_CASE("empty frontier secures the whole box") {
  const Box2 box{{5.0, 5.0}, {9.0, 11.0}};
  const Polyhedron poly = build_polyhedron({}, box, {6.0, 6.0});
  CHECK(poly.vertices.size() == 4);
  CHECK(poly.area() == doctest::Approx(24.0));
}

TEST_CASE("convex decomposition conserves area exactly") {
  for (const Polyhedron& poly :
       {l_shape(), Polyhedron{{{0.0, 0.0}, {6.0, 0.0}, {6.0, 4.0}, {3.0, 1.5},
                               {0.0, 4.0}}}}) {
    const auto cells = convex_decompose(poly);
    REQUIRE(!cells.empty());
    double sum = 0.0;
    for (const auto& c : cells) {
      REQUIRE(c.vertices.size() >= 3);
      // Convexity: every cross product of successive edges is non-negative.
      const int m = static_cast<int>(c.vertices.size());
      double area = 0.0;
      for (int i = 0; i < m; ++i) {
        const Vector2d& a = c.vertices[i];
        const Vector2d& b = c.vertices[(i + 1) % m];
        const Vector2d& d = c.vertices[(i + 2) % m];
        const double cr = (b.x() - a.x()) * (d.y() - a.y()) -
                          (b.y() - a.y()) * (d.x() - a.x());
        CHECK(cr >= -1e-9);
        area += a.x() * b.y() - b.x() * a.y();
      }
      sum += 0.5 * area;
    }
    CHECK(std::abs(sum - poly.area()) < 1e-9);
  }
}

TEST_CASE("membership in cells equals membership in the polygon") {
  const Polyhedron poly = l_shape();
  const auto cells = convex_decompose(poly);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> ux(-0.5, 4.5), uy(-0.5, 3.5);
  int inside = 0;
  for (int i = 0; i < 1000; ++i) {
    const Vector2d p(ux(rng), uy(rng));
    // Skip points hugging an edge: the two predicates may round differently.
    bool near_edge = false;
    auto ring = poly.vertices;
    ring.push_back(ring.front());
    for (std::size_t k = 1; k < ring.size(); ++k)
      if (polyline_point_dist({ring[k - 1], ring[k]}, p) < 1e-7)
        near_edge = true;
    if (near_edge) continue;
    const bool in_poly = point_in_polygon(poly.vertices, p);
    const bool in_cells = point_in_cells(cells, p, 1e-9);
    CHECK(in_poly == in_cells);
    inside += in_poly ? 1 : 0;
  }
  CHECK(inside > 100);  // the sampling window actually covers the shape
}

TEST_CASE("big-M values cover the search box") {
  const Polyhedron poly = l_shape();
  const auto cells = convex_decompose(poly);
  const Box2 box{{-1.0, -1.0}, {5.0, 4.0}};
  const DisjunctiveConstraint dc = to_disjunctive(cells, box, {0, 1});
  REQUIRE(dc.big_m.size() == dc.cells.size());
  const Vector2d corners[4] = {{-1.0, -1.0}, {5.0, -1.0}, {5.0, 4.0},
                               {-1.0, 4.0}};
  for (std::size_t c = 0; c < dc.cells.size(); ++c) {
    REQUIRE(dc.big_m[c].size() == dc.cells[c].halfspaces.size());
    for (std::size_t k = 0; k < dc.big_m[c].size(); ++k) {
      const auto& hs = dc.cells[c].halfspaces[k];
      CHECK(dc.big_m[c][k] >= -1e-12);
      // With the relaxed row a.x <= b + M, every box corner is feasible.
      for (const auto& corner : corners)
        CHECK(hs.normal.dot(corner) <= hs.offset + dc.big_m[c][k] + 1e-9);
    }
  }
}

TEST_CASE("convex hull of a point cloud") {
  std::vector<Vector2d> pts = {{0.0, 0.0}, {4.0, 0.0}, {4.0, 3.0},
                               {0.0, 3.0}, {2.0, 1.5}, {1.0, 1.0},
                               {3.9, 2.9}};
  const auto hull = convex_hull(pts);
  REQUIRE(hull.size() == 4);
  // Counter-clockwise orientation.
  double area = 0.0;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const auto& a = hull[i];
    const auto& b = hull[(i + 1) % hull.size()];
    area += a.x() * b.y() - b.x() * a.y();
  }
  CHECK(0.5 * area == doctest::Approx(12.0));

  const auto cuts = hull_halfspaces(hull);
  CHECK(cuts.size() == 4);
  for (const auto& p : pts)
    for (const auto& hs : cuts)
      CHECK(hs.normal.dot(p) <= hs.offset + 1e-12);

  // Degenerate inputs collapse without crashing.
  CHECK(convex_hull({{1.0, 1.0}, {1.0, 1.0}}).size() == 1);
  CHECK(hull_halfspaces({{0.0, 0.0}, {1.0, 0.0}}).empty());
}

TEST_CASE("point assessment separates range and severity verdicts") {
  // Covered end to end through the CLI fixture tests; here only the range
  // precedence: an out-of-range coordinate wins over any severity verdict.
  const char* text = R"({
    "nominal_freq_hz": 60.0, "base_mva": 1000.0,
    "regions": [
      {"id": 0, "inertia_s": 30.0, "inertia_lo_s": 10.0, "inertia_up_s": 60.0,
       "damping_pu": 8.0},
      {"id": 1, "inertia_s": 50.0, "damping_pu": 12.0, "disturbance_pu": 1.8}
    ],
    "tie_lines": [{"from": 0, "to": 1, "sync_coeff_pu_per_rad": 1.1}]
  })";
  const MultiRegionSystem sys = load_scenario(text);
  Eigen::VectorXd bad(2);
  bad << 5.0, 50.0;  // below region 0's lower range bound
  const Assessment a = assess(sys, bad, 0, 1, 0.5 / 60.0);
  CHECK(a.verdict == Verdict::InsecureRange);

  Eigen::VectorXd good(2);
  good << 55.0, 50.0;
  const Assessment b = assess(sys, good, 0, 1, 2.0 / 60.0);
  CHECK(b.verdict == Verdict::Secure);
  CHECK(b.max_rocof < 0.0);
  const Assessment c = assess(sys, good, 0, 1, 0.05 / 60.0);
  CHECK(c.verdict == Verdict::InsecureRocof);
}
