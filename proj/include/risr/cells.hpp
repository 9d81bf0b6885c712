#pragma once

#include <cstdint>
#include <vector>

#include "risr/boundary.hpp"
#include "risr/geometry.hpp"

namespace risr {

// Trough families that win somewhere on a grid over the box; the starting
// set for full-boundary tracing.
std::vector<AnchorId> discover_anchors(const InertiaField& field,
                                       const Eigen::VectorXd& lo,
                                       const Eigen::VectorXd& up, int grid);

// Trace every family: one planar trace per anchor in 2-D, sliced traces plus
// a transversal family in 3-D. Empty traces are dropped.
std::vector<BoundaryTrace> trace_families(const SearchContext& ctx,
                                          const std::vector<AnchorId>& anchors,
                                          int slices = 9, int stride = 4);

// End-to-end product of the 2-D pipeline: traces, the globally binding
// boundary, its closure into a polygon, and the convex split with its
// mixed-integer encoding.
struct SecureRegionCells {
  std::vector<BoundaryTrace> traces;
  FullBoundary full;
  Polyhedron polygon;
  std::vector<ConvexCell> cells;
  DisjunctiveConstraint disjunctive;
  Box2 box;
  std::vector<int> axes;
};

// Trace the severity level set over a two-coordinate box, close it against
// the box, and decompose the secure side into convex cells. simplify_frac
// scales the polyline simplification tolerance by the box diagonal.
SecureRegionCells build_secure_cells(const RocofInertiaField& field,
                                     double level, const Eigen::VectorXd& lo,
                                     const Eigen::VectorXd& up, double step,
                                     double eps_level, std::uint64_t seed,
                                     double simplify_frac);

}  // namespace risr
