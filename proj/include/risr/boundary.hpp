#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "risr/field.hpp"

namespace risr {

// Everything the tracing kernel needs: the level to follow, the box of
// adjustable coordinates, step sizes and budgets. Zero-valued knobs select
// the documented defaults.
struct SearchContext {
  const InertiaField* field = nullptr;
  double level = 0.0;               // severity to follow (per-unit/s)
  Eigen::VectorXd box_lo, box_up;   // adjustable-coordinate bounds
  double step = 1.0;                // arc step, inertia seconds
  double eps_level = 0.0;           // default 1e-3 * level
  int max_steps = 0;                // default 10 * box diagonal / step
  std::uint64_t seed = 1234;

  double eps() const { return eps_level > 0.0 ? eps_level : 1e-3 * level; }
  double diagonal() const { return (box_up - box_lo).norm(); }
  int step_budget() const {
    return max_steps > 0 ? max_steps
                         : static_cast<int>(10.0 * diagonal() / step) + 1;
  }
};

enum class Termination {
  BoxExit,
  AnchorVanished,
  MaxSteps,
  CorrectorFailed,
  ClosedLoop
};

std::string to_string(Termination t);

// One traced arc of an anchored level set, points in trace order. The curve
// grows from the seed in both directions; each end records why it stopped.
struct BoundaryTrace {
  AnchorId anchor;
  std::vector<Eigen::VectorXd> points;
  Termination terminated_by = Termination::MaxSteps;    // forward end
  Termination terminated_back = Termination::MaxSteps;  // backward end
};

// Arcs of the union of anchored level sets that survive the global filter:
// points where the overall severity equals the followed level. binding names
// the trough family that is active there.
struct BoundaryArc {
  AnchorId binding;
  std::vector<Eigen::VectorXd> points;
};

struct FullBoundary {
  std::vector<BoundaryArc> arcs;
  std::size_t point_count() const {
    std::size_t n = 0;
    for (const auto& a : arcs) n += a.points.size();
    return n;
  }
  std::vector<Eigen::VectorXd> all_points() const;
};

// Pair of nearby on-level points that start a trace, or the reason none was
// found in the box.
struct SeedResult {
  bool found = false;
  Eigen::VectorXd first, second;
  std::string reason;
};

SeedResult seed_boundary(const SearchContext& ctx, const AnchorId& anchor);

BoundaryTrace trace_2d(const SearchContext& ctx, const AnchorId& anchor);

// Slice a 3-D box along the second coordinate, trace each slice in the
// (first, third) plane, then add a transversal family with the first
// coordinate fixed at a strided subset of the traced values.
std::vector<BoundaryTrace> trace_3d(const SearchContext& ctx,
                                    const AnchorId& anchor, int slices = 9,
                                    int stride = 4);

FullBoundary assemble_full(const SearchContext& ctx,
                           const std::vector<BoundaryTrace>& traces);

// sum of adjustable coords = rhs - (fixed contribution); returned in the
// adjustable coordinates: ones . h = rhs.
struct Hyperplane {
  Eigen::VectorXd normal;
  double rhs = 0.0;
};

// Aggregate-inertia security boundary: sum H = |dP|/(2 lim), with the fixed
// regions' inertia subtracted into the right-hand side.
Hyperplane coi_boundary(const MultiRegionSystem& sys,
                        const std::vector<int>& adjustable, double rocof_lim);

// Over-estimating linear envelope of the worst-case severity, fitted on a
// grid: y(h) = 2 sum H * (sum of trig amplitudes * scale) is bounded above
// by coeffs . h + offset on every training sample.
struct ConservativeFit {
  Eigen::VectorXd coeffs;  // one per adjustable coordinate
  double offset = 0.0;
  double rms_residual = 0.0;
  int samples = 0;
};

ConservativeFit conservative_fit(const RocofInertiaField& field,
                                 const Eigen::VectorXd& box_lo,
                                 const Eigen::VectorXd& box_up,
                                 int grid_per_axis = 8);

// Envelope severity used by the fit, in power units (per-unit).
double envelope_power(const RocofInertiaField& field, const Eigen::VectorXd& h);

// 2-D polylines of the closed-form baselines, sampled at n points of the
// first coordinate. The second coordinate is not clipped to the box: when a
// baseline puts its critical line outside the adjustable window, the
// distance to that line is still the meaningful measure of its bias.
std::vector<Eigen::VectorXd> coi_polyline(const MultiRegionSystem& sys,
                                          const std::vector<int>& adjustable,
                                          double rocof_lim,
                                          const Eigen::VectorXd& box_lo,
                                          const Eigen::VectorXd& box_up, int n);

std::vector<Eigen::VectorXd> conservative_polyline(
    const RocofInertiaField& field, const ConservativeFit& fit,
    double rocof_lim, const Eigen::VectorXd& box_lo,
    const Eigen::VectorXd& box_up, int n);

// Reference boundary from time-domain integration: per grid column of the
// first coordinate, every level crossing of the simulated severity along the
// second coordinate is bisected. Dimension must be 2.
std::vector<Eigen::VectorXd> simulated_boundary(const RocofInertiaField& field,
                                                double rocof_lim,
                                                const Eigen::VectorXd& box_lo,
                                                const Eigen::VectorXd& box_up,
                                                int columns, double t_end,
                                                double dt);

// Mean over reference points of the distance to the nearest candidate point,
// as a percentage of the box diagonal.
double boundary_error(const std::vector<Eigen::VectorXd>& candidate,
                      const std::vector<Eigen::VectorXd>& reference,
                      const Eigen::VectorXd& box_lo,
                      const Eigen::VectorXd& box_up);

}  // namespace risr
