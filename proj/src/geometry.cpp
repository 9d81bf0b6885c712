#include "risr/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "risr/logging.hpp"

namespace risr {

namespace {

using Eigen::Vector2d;

double cross(const Vector2d& o, const Vector2d& a, const Vector2d& b) {
  return (a.x() - o.x()) * (b.y() - o.y()) - (a.y() - o.y()) * (b.x() - o.x());
}

double signed_area(const std::vector<Vector2d>& poly) {
  double s = 0.0;
  const int n = static_cast<int>(poly.size());
  for (int i = 0; i < n; ++i) {
    const Vector2d& p = poly[i];
    const Vector2d& q = poly[(i + 1) % n];
    s += p.x() * q.y() - q.x() * p.y();
  }
  return 0.5 * s;
}

bool segments_cross(const Vector2d& a, const Vector2d& b, const Vector2d& c,
                    const Vector2d& d) {
  const double d1 = cross(c, d, a);
  const double d2 = cross(c, d, b);
  const double d3 = cross(a, b, c);
  const double d4 = cross(a, b, d);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

void dedupe(std::vector<Vector2d>& poly, double tol) {
  std::vector<Vector2d> out;
  for (const auto& p : poly)
    if (out.empty() || (p - out.back()).norm() > tol) out.push_back(p);
  while (out.size() > 1 && (out.front() - out.back()).norm() <= tol)
    out.pop_back();
  poly = std::move(out);
}

void simplify_rec(const std::vector<Vector2d>& pts, int lo, int hi, double tol,
                  std::vector<char>& keep) {
  if (hi - lo < 2) return;
  const Vector2d& a = pts[lo];
  const Vector2d& b = pts[hi];
  const Vector2d ab = b - a;
  const double len = ab.norm();
  int imax = -1;
  double dmax = tol;
  for (int i = lo + 1; i < hi; ++i) {
    double d;
    if (len < 1e-12) {
      d = (pts[i] - a).norm();
    } else {
      d = std::abs(cross(a, b, pts[i])) / len;
    }
    if (d > dmax) {
      dmax = d;
      imax = i;
    }
  }
  if (imax < 0) return;
  keep[imax] = 1;
  simplify_rec(pts, lo, imax, tol, keep);
  simplify_rec(pts, imax, hi, tol, keep);
}

}  // namespace

double Polyhedron::area() const { return signed_area(vertices); }

std::vector<Vector2d> simplify_polyline(const std::vector<Vector2d>& pts,
                                        double tol) {
  if (pts.size() <= 2) return pts;
  std::vector<char> keep(pts.size(), 0);
  keep[0] = 1;
  keep[pts.size() - 1] = 1;
  simplify_rec(pts, 0, static_cast<int>(pts.size()) - 1, tol, keep);
  std::vector<Vector2d> out;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (keep[i]) out.push_back(pts[i]);
  return out;
}

bool point_in_polygon(const std::vector<Vector2d>& poly, const Vector2d& p) {
  bool in = false;
  const int n = static_cast<int>(poly.size());
  for (int i = 0, j = n - 1; i < n; j = i++) {
    const Vector2d& a = poly[i];
    const Vector2d& b = poly[j];
    if ((a.y() > p.y()) != (b.y() > p.y()) &&
        p.x() < (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x())
      in = !in;
  }
  return in;
}

bool is_simple_polygon(const std::vector<Vector2d>& poly) {
  const int n = static_cast<int>(poly.size());
  if (n < 3) return false;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
      if (segments_cross(poly[i], poly[(i + 1) % n], poly[j],
                         poly[(j + 1) % n]))
        return false;
    }
  }
  return true;
}

namespace {

// Position along the box perimeter, counter-clockwise from the lower-left
// corner: bottom, right, top, left.
double perimeter_param(const Box2& box, const Vector2d& p) {
  const double w = box.up.x() - box.lo.x();
  const double h = box.up.y() - box.lo.y();
  const double db = std::abs(p.y() - box.lo.y());
  const double dr = std::abs(p.x() - box.up.x());
  const double dt = std::abs(p.y() - box.up.y());
  const double dl = std::abs(p.x() - box.lo.x());
  const double dmin = std::min({db, dr, dt, dl});
  if (dmin == db) return std::clamp(p.x() - box.lo.x(), 0.0, w);
  if (dmin == dr) return w + std::clamp(p.y() - box.lo.y(), 0.0, h);
  if (dmin == dt) return w + h + std::clamp(box.up.x() - p.x(), 0.0, w);
  return 2.0 * w + h + std::clamp(box.up.y() - p.y(), 0.0, h);
}

// Corners passed when walking counter-clockwise from s_from to s_to.
std::vector<Vector2d> corners_between(const Box2& box, double s_from,
                                      double s_to) {
  const double w = box.up.x() - box.lo.x();
  const double h = box.up.y() - box.lo.y();
  const double per = 2.0 * (w + h);
  const Vector2d corner[4] = {{box.up.x(), box.lo.y()},
                              {box.up.x(), box.up.y()},
                              {box.lo.x(), box.up.y()},
                              {box.lo.x(), box.lo.y()}};
  const double corner_s[4] = {w, w + h, w + h + w, per};

  std::vector<Vector2d> out;
  double span = s_to - s_from;
  if (span <= 0.0) span += per;
  for (int k = 0; k < 8; ++k) {
    const double s = corner_s[k % 4] + per * (k / 4);
    double rel = s - s_from;
    if (rel <= 0.0) continue;
    if (rel >= span) break;
    out.push_back(corner[k % 4]);
  }
  return out;
}

std::vector<Vector2d> box_polygon(const Box2& box) {
  return {{box.lo.x(), box.lo.y()},
          {box.up.x(), box.lo.y()},
          {box.up.x(), box.up.y()},
          {box.lo.x(), box.up.y()}};
}

// Greedy nearest-endpoint chaining, but arcs join only across gaps below
// join_tol; what remains starts a new chain. Disconnected pieces of the
// frontier (separate secure pockets) must not be welded into one loop.
std::vector<std::vector<Vector2d>> chain_arcs(
    const std::vector<std::vector<Vector2d>>& arcs, double join_tol) {
  std::vector<std::vector<Vector2d>> pool;
  for (const auto& a : arcs)
    if (!a.empty()) pool.push_back(a);

  std::vector<std::vector<Vector2d>> chains;
  while (!pool.empty()) {
    std::vector<Vector2d> chain = pool.front();
    pool.erase(pool.begin());
    for (;;) {
      double best = std::numeric_limits<double>::infinity();
      std::size_t bi = 0;
      bool front_attach = false, reversed = false;
      for (std::size_t i = 0; i < pool.size(); ++i) {
        const auto& a = pool[i];
        const double ee = (chain.back() - a.front()).norm();
        const double er = (chain.back() - a.back()).norm();
        const double fe = (chain.front() - a.back()).norm();
        const double fr = (chain.front() - a.front()).norm();
        if (ee < best) { best = ee; bi = i; front_attach = false; reversed = false; }
        if (er < best) { best = er; bi = i; front_attach = false; reversed = true; }
        if (fe < best) { best = fe; bi = i; front_attach = true; reversed = false; }
        if (fr < best) { best = fr; bi = i; front_attach = true; reversed = true; }
      }
      if (pool.empty() || best > join_tol) break;
      std::vector<Vector2d> a = pool[bi];
      pool.erase(pool.begin() + bi);
      if (reversed) std::reverse(a.begin(), a.end());
      if (front_attach) {
        chain.insert(chain.begin(), a.begin(), a.end());
      } else {
        chain.insert(chain.end(), a.begin(), a.end());
      }
    }
    chains.push_back(std::move(chain));
  }
  // Longest chain first: the main frontier piece gets the first closure try.
  std::sort(chains.begin(), chains.end(),
            [](const std::vector<Vector2d>& a, const std::vector<Vector2d>& b) {
              return a.size() > b.size();
            });
  return chains;
}

}  // namespace

Polyhedron build_polyhedron(const std::vector<std::vector<Vector2d>>& arcs,
                            const Box2& box, const Vector2d& secure_point) {
  const double diag = (box.up - box.lo).norm();
  const double tol = 1e-9 * diag;

  auto chains = chain_arcs(arcs, 0.05 * diag);
  Polyhedron poly;
  bool any_frontier = false;
  std::size_t used = chains.size();
  for (std::size_t ci = 0; ci < chains.size() && poly.vertices.empty(); ++ci) {
    auto& chain = chains[ci];
    dedupe(chain, tol);
    if (chain.size() < 2) continue;
    any_frontier = true;

    // A chain is a closed loop when its endpoint gap is negligible, or when
    // the gap is modest and both endpoints sit away from the box perimeter
    // (an interior loop cannot legitimately close along the box edges).
    const double gap = (chain.front() - chain.back()).norm();
    auto edge_dist = [&](const Vector2d& p) {
      return std::min({p.x() - box.lo.x(), box.up.x() - p.x(),
                       p.y() - box.lo.y(), box.up.y() - p.y()});
    };
    const double interior =
        std::min(edge_dist(chain.front()), edge_dist(chain.back()));
    const bool closed =
        chain.size() > 2 &&
        (gap < 1e-6 * diag || (gap <= 0.05 * diag && interior > gap));
    if (closed) {
      // Closed frontier: the trace loops inside the box. A loop that does
      // not hold the secure sample bounds some other pocket; skip it.
      if (!point_in_polygon(chain, secure_point)) continue;
      poly.vertices = chain;
      used = ci;
    } else {
      const double s_end = perimeter_param(box, chain.back());
      const double s_start = perimeter_param(box, chain.front());
      // Two closures: walk the perimeter counter-clockwise from the chain's
      // end back to its start, or the same with the chain reversed.
      for (int attempt = 0; attempt < 2; ++attempt) {
        std::vector<Vector2d> cand = chain;
        const double a = attempt == 0 ? s_end : s_start;
        const double b = attempt == 0 ? s_start : s_end;
        if (attempt == 1) std::reverse(cand.begin(), cand.end());
        const auto corners = corners_between(box, a, b);
        cand.insert(cand.end(), corners.begin(), corners.end());
        dedupe(cand, tol);
        if (cand.size() < 3) continue;
        if (!point_in_polygon(cand, secure_point)) continue;
        if (signed_area(cand) < 0.0) std::reverse(cand.begin(), cand.end());
        if (!is_simple_polygon(cand)) continue;
        poly.vertices = cand;
        used = ci;
        break;
      }
    }
  }

  if (!any_frontier) {
    poly.vertices = box_polygon(box);
    return poly;
  }
  if (poly.vertices.empty())
    throw NumericalError(
        "no perimeter closure of the frontier contains the secure sample");

  // Unused chains outside the polygon bound pockets that were already cut
  // away by the chosen closure; dropping them only shrinks the certified
  // set. A chain inside the polygon would carve a hole, which the convex
  // decomposition cannot represent.
  for (std::size_t ci = 0; ci < chains.size(); ++ci) {
    if (ci == used || chains[ci].size() < 2) continue;
    const Vector2d probe = chains[ci][chains[ci].size() / 2];
    if (point_in_polygon(poly.vertices, probe))
      throw NumericalError(
          "a detached frontier component lies inside the secure polygon; "
          "secure sets with holes are not supported");
  }

  if (signed_area(poly.vertices) < 0.0)
    std::reverse(poly.vertices.begin(), poly.vertices.end());
  if (!is_simple_polygon(poly.vertices))
    throw NumericalError("frontier closure self-intersects");
  return poly;
}

namespace {

bool point_in_triangle(const Vector2d& p, const Vector2d& a, const Vector2d& b,
                       const Vector2d& c) {
  const double d1 = cross(a, b, p);
  const double d2 = cross(b, c, p);
  const double d3 = cross(c, a, p);
  const bool has_neg = d1 < 0 || d2 < 0 || d3 < 0;
  const bool has_pos = d1 > 0 || d2 > 0 || d3 > 0;
  return !(has_neg && has_pos);
}

std::vector<std::array<int, 3>> ear_clip(const std::vector<Vector2d>& poly) {
  const int n = static_cast<int>(poly.size());
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  std::vector<std::array<int, 3>> tris;

  double scale = 0.0;
  for (const auto& p : poly) scale = std::max(scale, p.norm());
  const double eps = 1e-12 * scale * scale;

  double pass_eps = eps;
  int guard = 0;
  while (idx.size() > 3) {
    const int m = static_cast<int>(idx.size());
    bool clipped = false;
    for (int i = 0; i < m; ++i) {
      const int ia = idx[(i + m - 1) % m];
      const int ib = idx[i];
      const int ic = idx[(i + 1) % m];
      const double cr = cross(poly[ia], poly[ib], poly[ic]);
      if (cr < -pass_eps) continue;  // reflex corner
      bool blocked = false;
      for (int j = 0; j < m && !blocked; ++j) {
        const int iv = idx[j];
        if (iv == ia || iv == ib || iv == ic) continue;
        if (point_in_triangle(poly[iv], poly[ia], poly[ib], poly[ic]))
          blocked = true;
      }
      if (blocked) continue;
      if (cr > eps) tris.push_back({ia, ib, ic});
      idx.erase(idx.begin() + i);
      clipped = true;
      break;
    }
    if (!clipped) {
      // Loosen the reflex threshold for near-collinear corners.
      pass_eps *= 100.0;
      if (++guard > 4)
        throw NumericalError("ear clipping stalled; polygon degenerate");
      continue;
    }
    pass_eps = eps;
    guard = 0;
  }
  if (idx.size() == 3) {
    if (cross(poly[idx[0]], poly[idx[1]], poly[idx[2]]) > eps)
      tris.push_back({idx[0], idx[1], idx[2]});
  }
  return tris;
}

bool convex_ccw(const std::vector<int>& cell, const std::vector<Vector2d>& pts,
                double eps) {
  const int m = static_cast<int>(cell.size());
  for (int i = 0; i < m; ++i) {
    const Vector2d& a = pts[cell[i]];
    const Vector2d& b = pts[cell[(i + 1) % m]];
    const Vector2d& c = pts[cell[(i + 2) % m]];
    if (cross(a, b, c) < -eps) return false;
  }
  return true;
}

}  // namespace

std::vector<ConvexCell> convex_decompose(const Polyhedron& poly) {
  const auto& pts = poly.vertices;
  if (pts.size() < 3)
    throw ScenarioError("convex decomposition needs at least 3 vertices");
  if (signed_area(pts) <= 0.0)
    throw ScenarioError("polygon must be counter-clockwise with positive area");

  double scale = 0.0;
  for (const auto& p : pts) scale = std::max(scale, p.norm());
  const double eps = 1e-10 * scale * scale;

  auto tris = ear_clip(pts);
  std::vector<std::vector<int>> cells;
  for (const auto& t : tris) cells.push_back({t[0], t[1], t[2]});

  // Greedy Hertel-Mehlhorn: remove a shared diagonal whenever the merged
  // cell stays convex.
  bool merged = true;
  while (merged) {
    merged = false;
    std::map<std::pair<int, int>, std::vector<std::size_t>> edge_cells;
    for (std::size_t ci = 0; ci < cells.size(); ++ci) {
      const auto& c = cells[ci];
      const int m = static_cast<int>(c.size());
      for (int i = 0; i < m; ++i) {
        const int a = c[i], b = c[(i + 1) % m];
        edge_cells[{std::min(a, b), std::max(a, b)}].push_back(ci);
      }
    }
    for (const auto& [edge, owners] : edge_cells) {
      if (owners.size() != 2) continue;
      const std::size_t c1 = owners[0], c2 = owners[1];
      const auto& a_cell = cells[c1];
      const auto& b_cell = cells[c2];
      // Splice c2 into c1 across the shared edge (a -> b in c1).
      const int m1 = static_cast<int>(a_cell.size());
      int pos1 = -1;
      int a = -1;
      for (int i = 0; i < m1; ++i) {
        const int u = a_cell[i], v = a_cell[(i + 1) % m1];
        if (std::min(u, v) == edge.first && std::max(u, v) == edge.second) {
          pos1 = i;
          a = u;
          break;
        }
      }
      if (pos1 < 0) continue;
      const int m2 = static_cast<int>(b_cell.size());
      int pos2 = -1;
      for (int i = 0; i < m2; ++i)
        if (b_cell[i] == a) pos2 = i;
      if (pos2 < 0) continue;

      std::vector<int> unioned;
      for (int i = 0; i <= pos1; ++i) unioned.push_back(a_cell[i]);
      for (int i = 1; i < m2 - 1; ++i)
        unioned.push_back(b_cell[(pos2 + i) % m2]);
      for (int i = pos1 + 1; i < m1; ++i) unioned.push_back(a_cell[i]);

      if (static_cast<int>(unioned.size()) != m1 + m2 - 2) continue;
      if (!convex_ccw(unioned, pts, eps)) continue;

      cells[c1] = std::move(unioned);
      cells.erase(cells.begin() + static_cast<long>(c2));
      merged = true;
      break;
    }
  }

  std::vector<ConvexCell> out;
  for (const auto& c : cells) {
    ConvexCell cell;
    for (int i : c) cell.vertices.push_back(pts[i]);
    const int m = static_cast<int>(cell.vertices.size());
    for (int i = 0; i < m; ++i) {
      const Vector2d& p = cell.vertices[i];
      const Vector2d& q = cell.vertices[(i + 1) % m];
      Vector2d normal(q.y() - p.y(), -(q.x() - p.x()));
      const double len = normal.norm();
      if (len < 1e-14) continue;
      normal /= len;
      cell.halfspaces.push_back({normal, normal.dot(p)});
    }
    out.push_back(std::move(cell));
  }
  return out;
}

DisjunctiveConstraint to_disjunctive(const std::vector<ConvexCell>& cells,
                                     const Box2& box,
                                     const std::vector<int>& axes) {
  DisjunctiveConstraint dc;
  dc.cells = cells;
  dc.box = box;
  dc.axes = axes;
  const Vector2d corner[4] = {{box.lo.x(), box.lo.y()},
                              {box.up.x(), box.lo.y()},
                              {box.up.x(), box.up.y()},
                              {box.lo.x(), box.up.y()}};
  for (const auto& cell : cells) {
    std::vector<double> ms;
    for (const auto& hs : cell.halfspaces) {
      double m = 0.0;
      for (const auto& c : corner)
        m = std::max(m, hs.normal.dot(c) - hs.offset);
      ms.push_back(m);
    }
    dc.big_m.push_back(std::move(ms));
  }
  return dc;
}

std::vector<Vector2d> convex_hull(std::vector<Vector2d> pts) {
  std::sort(pts.begin(), pts.end(), [](const Vector2d& a, const Vector2d& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(),
                        [](const Vector2d& a, const Vector2d& b) {
                          return (a - b).norm() < 1e-12;
                        }),
            pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 3) return pts;

  std::vector<Vector2d> hull(2 * n);
  int k = 0;
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  for (int i = n - 2, lower = k + 1; i >= 0; --i) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

std::vector<HalfSpace> hull_halfspaces(const std::vector<Vector2d>& hull) {
  std::vector<HalfSpace> out;
  const int m = static_cast<int>(hull.size());
  if (m < 3) return out;
  for (int i = 0; i < m; ++i) {
    const Vector2d& p = hull[i];
    const Vector2d& q = hull[(i + 1) % m];
    Vector2d normal(q.y() - p.y(), -(q.x() - p.x()));
    const double len = normal.norm();
    if (len < 1e-14) continue;
    normal /= len;
    out.push_back({normal, normal.dot(p)});
  }
  return out;
}

bool point_in_cells(const std::vector<ConvexCell>& cells, const Vector2d& p,
                    double tol) {
  for (const auto& cell : cells) {
    bool ok = true;
    for (const auto& hs : cell.halfspaces)
      if (hs.normal.dot(p) > hs.offset + tol) {
        ok = false;
        break;
      }
    if (ok) return true;
  }
  return false;
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Secure: return "secure";
    case Verdict::InsecureRocof: return "insecure-rocof";
    case Verdict::InsecureRange: return "insecure-range";
  }
  return "unknown";
}

Assessment assess(const MultiRegionSystem& sys, const Eigen::VectorXd& inertia,
                  int observed, int disturbed, double rocof_lim) {
  if (!(rocof_lim > 0.0)) throw ScenarioError("rocof_lim must be positive");
  Assessment as;
  for (int i = 0; i < sys.size(); ++i) {
    const Region& r = sys.region(i);
    if (inertia(i) < r.inertia_lo - 1e-12 ||
        inertia(i) > r.inertia_up + 1e-12) {
      as.verdict = Verdict::InsecureRange;
      as.detail = "region " + std::to_string(i) + " inertia " +
                  std::to_string(inertia(i)) + " outside [" +
                  std::to_string(r.inertia_lo) + ", " +
                  std::to_string(r.inertia_up) + "]";
      return as;
    }
  }
  const GlobalMax gm =
      global_max(decompose(sys.with_inertia(inertia), observed, disturbed));
  as.max_rocof = gm.value;
  as.t_star = gm.t_star;
  as.msn = gm.msn;
  if (std::abs(gm.value) > rocof_lim) {
    as.verdict = Verdict::InsecureRocof;
    as.detail = "worst rate of change of frequency exceeds the limit";
  } else {
    as.verdict = Verdict::Secure;
    as.detail = "within limit and ranges";
  }
  return as;
}

}  // namespace risr
