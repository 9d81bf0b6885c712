#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "risr/boundary.hpp"

namespace risr {

struct Box2 {
  Eigen::Vector2d lo, up;
};

// Simple polygon, counter-clockwise vertices, no repeated closing vertex.
struct Polyhedron {
  std::vector<Eigen::Vector2d> vertices;
  double area() const;
};

// normal . x <= offset
struct HalfSpace {
  Eigen::Vector2d normal;
  double offset = 0.0;
};

struct ConvexCell {
  std::vector<Eigen::Vector2d> vertices;  // counter-clockwise
  std::vector<HalfSpace> halfspaces;      // edges as inequalities
};

// Union-of-cells membership as big-M rows: for cell i and its halfspace k,
// a_k . x <= b_k + M_ik (1 - z_i), with exactly one z_i active. M_ik is the
// worst violation of halfspace k over the bounding box.
struct DisjunctiveConstraint {
  std::vector<ConvexCell> cells;
  std::vector<std::vector<double>> big_m;
  Box2 box;
  std::vector<int> axes;  // region ids of the two coordinates
};

// Drop interior vertices deviating less than tol from the chord
// (endpoints always survive; output is a subset of the input).
std::vector<Eigen::Vector2d> simplify_polyline(
    const std::vector<Eigen::Vector2d>& pts, double tol);

// Close the traced frontier into the secure part of the box: chain the arcs,
// walk the box perimeter on the side containing secure_point, orient
// counter-clockwise. An empty frontier secures the whole box.
Polyhedron build_polyhedron(const std::vector<std::vector<Eigen::Vector2d>>& arcs,
                            const Box2& box,
                            const Eigen::Vector2d& secure_point);

bool is_simple_polygon(const std::vector<Eigen::Vector2d>& poly);
bool point_in_polygon(const std::vector<Eigen::Vector2d>& poly,
                      const Eigen::Vector2d& p);

// Ear clipping into triangles, then greedy merging of neighbours while the
// union stays convex. Cell vertices are polygon vertices; no new points.
std::vector<ConvexCell> convex_decompose(const Polyhedron& poly);

DisjunctiveConstraint to_disjunctive(const std::vector<ConvexCell>& cells,
                                     const Box2& box,
                                     const std::vector<int>& axes);

// Convex hull of a point set, counter-clockwise, no repeated closing vertex.
// Collinear inputs collapse to the extreme segment.
std::vector<Eigen::Vector2d> convex_hull(std::vector<Eigen::Vector2d> pts);

// Outward edge inequalities of a counter-clockwise convex polygon. Every
// point of the polygon (and of anything it contains) satisfies all of them,
// so for a union of cells these act as valid relaxation cuts.
std::vector<HalfSpace> hull_halfspaces(const std::vector<Eigen::Vector2d>& hull);

bool point_in_cells(const std::vector<ConvexCell>& cells,
                    const Eigen::Vector2d& p, double tol = 1e-9);

enum class Verdict { Secure, InsecureRocof, InsecureRange };

std::string to_string(Verdict v);

// Point check on an explicit inertia vector: range violations are reported
// before severity; otherwise the analytic worst case decides.
struct Assessment {
  Verdict verdict = Verdict::Secure;
  double max_rocof = 0.0;  // signed, per-unit/s
  double t_star = 0.0;
  int msn = 0;
  std::string detail;
};

Assessment assess(const MultiRegionSystem& sys, const Eigen::VectorXd& inertia,
                  int observed, int disturbed, double rocof_lim);

}  // namespace risr
