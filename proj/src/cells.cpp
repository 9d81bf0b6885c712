#include "risr/cells.hpp"

#include <set>
#include <utility>

#include "risr/logging.hpp"

namespace risr {

std::vector<AnchorId> discover_anchors(const InertiaField& field,
                                       const Eigen::VectorXd& lo,
                                       const Eigen::VectorXd& up, int grid) {
  std::set<std::pair<int, int>> seen;
  const int dim = static_cast<int>(lo.size());
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= grid;
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    Eigen::VectorXd h(dim);
    for (int i = 0; i < dim; ++i) {
      const int gi = rem % grid;
      rem /= grid;
      h(i) = lo(i) + (up(i) - lo(i)) * gi / (grid - 1.0);
    }
    try {
      const GlobalMax gm = field.global_detail(h);
      if (gm.component > 0) seen.insert({gm.component, gm.swing});
    } catch (const std::exception& e) {
      log::debug(std::string("anchor probe failed: ") + e.what());
    }
  }
  std::vector<AnchorId> out;
  for (const auto& [c, s] : seen) out.push_back({c, s});
  return out;
}

std::vector<BoundaryTrace> trace_families(const SearchContext& ctx,
                                          const std::vector<AnchorId>& anchors,
                                          int slices, int stride) {
  std::vector<BoundaryTrace> traces;
  for (const auto& a : anchors) {
    if (ctx.box_lo.size() == 2) {
      BoundaryTrace tr = trace_2d(ctx, a);
      if (!tr.points.empty()) traces.push_back(std::move(tr));
    } else {
      auto trs = trace_3d(ctx, a, slices, stride);
      for (auto& tr : trs)
        if (!tr.points.empty()) traces.push_back(std::move(tr));
    }
  }
  return traces;
}

namespace {

// An interior sample of the secure side. Box corners are nudged inward so the
// sample can never coincide with a vertex of the closed frontier polygon.
Eigen::Vector2d secure_corner(const InertiaField& field,
                              const Eigen::VectorXd& lo,
                              const Eigen::VectorXd& up, double level) {
  const double dx = 0.02 * (up(0) - lo(0));
  const double dy = 0.02 * (up(1) - lo(1));
  const Eigen::Vector2d corners[4] = {{up(0) - dx, up(1) - dy},
                                      {lo(0) + dx, up(1) - dy},
                                      {up(0) - dx, lo(1) + dy},
                                      {lo(0) + dx, lo(1) + dy}};
  for (const auto& c : corners) {
    try {
      if (field.global_level(c) < level) return c;
    } catch (const std::exception&) {
    }
  }
  Eigen::Vector2d best = Eigen::Vector2d::Zero();
  double best_level = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 9; ++i) {
    for (int k = 1; k < 9; ++k) {
      const Eigen::Vector2d c(lo(0) + (up(0) - lo(0)) * i / 9.0,
                              lo(1) + (up(1) - lo(1)) * k / 9.0);
      try {
        const double v = field.global_level(c);
        if (v < best_level) {
          best_level = v;
          best = c;
        }
      } catch (const std::exception&) {
      }
    }
  }
  if (best_level < level) return best;
  throw ScenarioError(
      "no sample of the search box is secure; the region is empty at this "
      "limit");
}

}  // namespace

SecureRegionCells build_secure_cells(const RocofInertiaField& field,
                                     double level, const Eigen::VectorXd& lo,
                                     const Eigen::VectorXd& up, double step,
                                     double eps_level, std::uint64_t seed,
                                     double simplify_frac) {
  if (lo.size() != 2)
    throw ScenarioError("security cells are built over two adjustable regions");
  SearchContext ctx;
  ctx.field = &field;
  ctx.level = level;
  ctx.box_lo = lo;
  ctx.box_up = up;
  ctx.step = step;
  ctx.eps_level = eps_level;
  ctx.seed = seed;

  const auto anchors = discover_anchors(field, lo, up, 9);
  if (anchors.empty())
    throw ScenarioError("no oscillatory trough family found over the box");
  const auto traces = trace_families(ctx, anchors, 9, 4);
  const FullBoundary full = assemble_full(ctx, traces);

  SecureRegionCells res;
  res.traces = traces;
  res.full = full;
  res.box.lo = Eigen::Vector2d(lo(0), lo(1));
  res.box.up = Eigen::Vector2d(up(0), up(1));
  res.axes = field.adjustable();

  const double diag = (up - lo).norm();
  std::vector<std::vector<Eigen::Vector2d>> arcs;
  for (const auto& arc : full.arcs) {
    std::vector<Eigen::Vector2d> pts;
    for (const auto& p : arc.points) pts.emplace_back(p(0), p(1));
    arcs.push_back(simplify_polyline(pts, simplify_frac * diag));
  }
  const Eigen::Vector2d secure = secure_corner(field, lo, up, level);
  res.polygon = build_polyhedron(arcs, res.box, secure);
  res.cells = convex_decompose(res.polygon);
  res.disjunctive = to_disjunctive(res.cells, res.box, res.axes);
  return res;
}

}  // namespace risr
