#include "risr/boundary.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "risr/logging.hpp"
#include "risr/simulate.hpp"

namespace risr {

namespace {

using Eigen::VectorXd;

std::optional<double> eval_level(const InertiaField& field,
                                 const AnchorId& anchor, const VectorXd& p) {
  for (int i = 0; i < p.size(); ++i)
    if (!(p(i) > 1e-3)) return std::nullopt;  // inertia must stay physical
  try {
    return field.anchored_level(p, anchor);
  } catch (const std::exception& e) {
    log::debug(std::string("field evaluation failed off-boundary: ") + e.what());
    return std::nullopt;
  }
}

bool inside_box(const VectorXd& p, const VectorXd& lo, const VectorXd& up) {
  for (int i = 0; i < p.size(); ++i)
    if (p(i) < lo(i) || p(i) > up(i)) return false;
  return true;
}

// Root of g = level(p) - target between two points of opposite sign.
std::optional<VectorXd> bisect_points(const InertiaField& field,
                                      const AnchorId& anchor, VectorXd a,
                                      VectorXd b, double ga, double gb,
                                      double target, double value_tol) {
  if (ga == 0.0) return a;
  if (gb == 0.0) return b;
  if ((ga > 0.0) == (gb > 0.0)) return std::nullopt;
  for (int it = 0; it < 80; ++it) {
    VectorXd mid = 0.5 * (a + b);
    const auto lv = eval_level(field, anchor, mid);
    if (!lv) return std::nullopt;
    const double gm = *lv - target;
    if (std::abs(gm) <= value_tol) return mid;
    if ((gm > 0.0) == (ga > 0.0)) {
      a = std::move(mid);
      ga = gm;
    } else {
      b = std::move(mid);
      gb = gm;
    }
    if ((a - b).norm() < 1e-13 * (1.0 + a.norm())) break;
  }
  return std::nullopt;
}

VectorXd perp2(const VectorXd& d) {
  VectorXd n(2);
  n << -d(1), d(0);
  return n;
}

// Correct a predicted point back onto the level set along the normal.
// Bracket grows outward but is capped so consecutive trace points stay
// within twice the arc step.
std::optional<VectorXd> correct(const InertiaField& field,
                                const AnchorId& anchor, const VectorXd& center,
                                const VectorXd& normal, double step,
                                double target, double value_tol) {
  const auto c0 = eval_level(field, anchor, center);
  if (!c0) return std::nullopt;
  const double g0 = *c0 - target;
  if (std::abs(g0) <= value_tol) return center;

  static constexpr double kMags[] = {0.25, 0.5, 1.0, 1.7};
  struct Side {
    double prev_param = 0.0;
    double prev_g;
    bool prev_ok = true;
  };
  Side sides[2] = {{0.0, g0, true}, {0.0, g0, true}};
  for (double mag : kMags) {
    for (int si = 0; si < 2; ++si) {
      const double sign = si == 0 ? 1.0 : -1.0;
      const double param = sign * mag * step;
      const VectorXd p = center + param * normal;
      const auto lv = eval_level(field, anchor, p);
      if (!lv) {
        sides[si].prev_ok = false;
        continue;
      }
      const double g = *lv - target;
      if (std::abs(g) <= value_tol) return p;
      if (sides[si].prev_ok && (g > 0.0) != (sides[si].prev_g > 0.0)) {
        const VectorXd a = center + sides[si].prev_param * normal;
        return bisect_points(field, anchor, a, p, sides[si].prev_g, g, target,
                             value_tol);
      }
      sides[si].prev_param = param;
      sides[si].prev_g = g;
      sides[si].prev_ok = true;
    }
  }
  return std::nullopt;
}

// Where the segment a->b (a inside, b outside) crosses the box.
VectorXd clip_to_box(const VectorXd& a, const VectorXd& b, const VectorXd& lo,
                     const VectorXd& up) {
  double t = 1.0;
  for (int i = 0; i < a.size(); ++i) {
    const double d = b(i) - a(i);
    if (d > 0.0 && b(i) > up(i)) t = std::min(t, (up(i) - a(i)) / d);
    if (d < 0.0 && b(i) < lo(i)) t = std::min(t, (lo(i) - a(i)) / d);
  }
  return a + std::max(0.0, t) * (b - a);
}

// Refine the terminal point on the box edge the trace is leaving through:
// search the level crossing along that edge near the clipped exit.
std::optional<VectorXd> edge_exit_point(const SearchContext& ctx,
                                        const AnchorId& anchor,
                                        const VectorXd& inside,
                                        const VectorXd& outside) {
  const VectorXd e = clip_to_box(inside, outside, ctx.box_lo, ctx.box_up);
  int axis = -1;
  for (int i = 0; i < e.size(); ++i)
    if (std::abs(e(i) - ctx.box_lo(i)) < 1e-9 ||
        std::abs(e(i) - ctx.box_up(i)) < 1e-9)
      axis = i;
  if (axis < 0) return std::nullopt;
  const int other = 1 - axis;  // 2-D tracing only

  const double half = 2.0 * ctx.step;
  const double lo = std::max(ctx.box_lo(other), e(other) - half);
  const double up = std::min(ctx.box_up(other), e(other) + half);
  const int samples = 17;
  const double tol = 0.25 * ctx.eps();

  bool has_prev = false;
  double prev_g = 0.0;
  VectorXd prev = e;
  for (int i = 0; i < samples; ++i) {
    VectorXd p = e;
    p(other) = lo + (up - lo) * i / (samples - 1.0);
    const auto lv = eval_level(*ctx.field, anchor, p);
    if (!lv) {
      has_prev = false;
      continue;
    }
    const double g = *lv - ctx.level;
    if (std::abs(g) <= tol) return p;
    if (has_prev && (g > 0.0) != (prev_g > 0.0))
      return bisect_points(*ctx.field, anchor, prev, p, prev_g, g, ctx.level,
                           tol);
    has_prev = true;
    prev_g = g;
    prev = p;
  }
  return std::nullopt;
}

struct Leg {
  std::vector<VectorXd> points;
  Termination term = Termination::MaxSteps;
};

Leg run_direction(const SearchContext& ctx, const AnchorId& anchor,
                  VectorXd prev, VectorXd cur, const VectorXd& origin) {
  Leg leg;
  const double tol = 0.25 * ctx.eps();
  const int budget = ctx.step_budget();
  for (int n = 0; n < budget; ++n) {
    VectorXd dir = cur - prev;
    const double len = dir.norm();
    if (len < 1e-12) {
      leg.term = Termination::CorrectorFailed;
      return leg;
    }
    dir /= len;
    const VectorXd pred = cur + ctx.step * dir;
    if (!inside_box(pred, ctx.box_lo, ctx.box_up)) {
      if (auto edge = edge_exit_point(ctx, anchor, cur, pred))
        leg.points.push_back(*edge);
      leg.term = Termination::BoxExit;
      return leg;
    }
    const auto next =
        correct(*ctx.field, anchor, pred, perp2(dir), ctx.step, ctx.level, tol);
    if (!next) {
      const auto probe = eval_level(*ctx.field, anchor, pred);
      leg.term = probe ? Termination::CorrectorFailed
                       : Termination::AnchorVanished;
      return leg;
    }
    if (!inside_box(*next, ctx.box_lo, ctx.box_up)) {
      if (auto edge = edge_exit_point(ctx, anchor, cur, *next))
        leg.points.push_back(*edge);
      leg.term = Termination::BoxExit;
      return leg;
    }
    if (n > 3 && (*next - origin).norm() < 0.6 * ctx.step) {
      leg.points.push_back(origin);
      leg.term = Termination::ClosedLoop;
      return leg;
    }
    leg.points.push_back(*next);
    prev = cur;
    cur = *next;
  }
  leg.term = Termination::MaxSteps;
  return leg;
}

VectorXd random_point(std::mt19937_64& rng, const VectorXd& lo,
                      const VectorXd& up) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  VectorXd p(lo.size());
  for (int i = 0; i < lo.size(); ++i) p(i) = lo(i) + u(rng) * (up(i) - lo(i));
  return p;
}

}  // namespace

std::string to_string(Termination t) {
  switch (t) {
    case Termination::BoxExit: return "box-exit";
    case Termination::AnchorVanished: return "anchor-vanished";
    case Termination::MaxSteps: return "max-steps";
    case Termination::CorrectorFailed: return "corrector-failed";
    case Termination::ClosedLoop: return "closed-loop";
  }
  return "unknown";
}

std::vector<VectorXd> FullBoundary::all_points() const {
  std::vector<VectorXd> out;
  for (const auto& a : arcs)
    out.insert(out.end(), a.points.begin(), a.points.end());
  return out;
}

SeedResult seed_boundary(const SearchContext& ctx, const AnchorId& anchor) {
  SeedResult res;
  if (!ctx.field) throw ScenarioError("search context has no field");
  if (ctx.box_lo.size() != 2)
    throw ScenarioError("seeding operates on a 2-D search box");
  if (!(ctx.level > 0.0)) throw ScenarioError("level to trace must be positive");

  std::mt19937_64 rng(ctx.seed);
  const double tol = 0.25 * ctx.eps();
  const int chords = 64;
  const double sample_step = std::min(ctx.step, ctx.diagonal() / 32.0);

  for (int c = 0; c < chords; ++c) {
    const VectorXd a = random_point(rng, ctx.box_lo, ctx.box_up);
    const VectorXd b = random_point(rng, ctx.box_lo, ctx.box_up);
    const double len = (b - a).norm();
    if (len < 1e-9) continue;
    const int steps = std::max(2, static_cast<int>(len / sample_step));
    bool has_prev = false;
    double prev_g = 0.0;
    VectorXd prev = a;
    for (int i = 0; i <= steps; ++i) {
      const VectorXd p = a + (b - a) * (static_cast<double>(i) / steps);
      const auto lv = eval_level(*ctx.field, anchor, p);
      if (!lv) {
        has_prev = false;
        continue;
      }
      const double g = *lv - ctx.level;
      std::optional<VectorXd> hit;
      if (std::abs(g) <= tol) {
        hit = p;
      } else if (has_prev && (g > 0.0) != (prev_g > 0.0)) {
        hit = bisect_points(*ctx.field, anchor, prev, p, prev_g, g, ctx.level,
                            tol);
      }
      if (hit) {
        res.first = *hit;
        // Second point: scan a circle of one arc step around the first.
        const int arcs = 64;
        bool has_pg = false;
        double pg = 0.0;
        VectorXd pp = res.first;
        for (int k = 0; k <= arcs; ++k) {
          const double th = 2.0 * std::numbers::pi * k / arcs;
          VectorXd q(2);
          q << res.first(0) + ctx.step * std::cos(th),
              res.first(1) + ctx.step * std::sin(th);
          const auto qv = eval_level(*ctx.field, anchor, q);
          if (!qv) {
            has_pg = false;
            continue;
          }
          const double qg = *qv - ctx.level;
          if (std::abs(qg) <= tol) {
            res.second = q;
            res.found = true;
            return res;
          }
          if (has_pg && (qg > 0.0) != (pg > 0.0)) {
            if (auto s = bisect_points(*ctx.field, anchor, pp, q, pg, qg,
                                       ctx.level, tol)) {
              res.second = *s;
              res.found = true;
              return res;
            }
          }
          has_pg = true;
          pg = qg;
          pp = q;
        }
        res.reason = "level found but no continuation on the step circle";
        return res;
      }
      has_prev = true;
      prev_g = g;
      prev = p;
    }
  }
  res.reason = "no level crossing of this trough family inside the box";
  return res;
}

BoundaryTrace trace_2d(const SearchContext& ctx, const AnchorId& anchor) {
  BoundaryTrace tr;
  tr.anchor = anchor;
  const SeedResult seed = seed_boundary(ctx, anchor);
  if (!seed.found) {
    log::info("trace " + std::to_string(anchor.component) + "," +
              std::to_string(anchor.swing) + ": " + seed.reason);
    tr.terminated_by = Termination::AnchorVanished;
    tr.terminated_back = Termination::AnchorVanished;
    return tr;
  }

  const Leg fwd = run_direction(ctx, anchor, seed.first, seed.second, seed.first);
  Leg bwd;
  if (fwd.term == Termination::ClosedLoop) {
    bwd.term = Termination::ClosedLoop;  // loop already closed; nothing behind
  } else {
    bwd = run_direction(ctx, anchor, seed.second, seed.first, seed.first);
  }

  tr.points.reserve(bwd.points.size() + 2 + fwd.points.size());
  for (auto it = bwd.points.rbegin(); it != bwd.points.rend(); ++it)
    tr.points.push_back(*it);
  tr.points.push_back(seed.first);
  tr.points.push_back(seed.second);
  tr.points.insert(tr.points.end(), fwd.points.begin(), fwd.points.end());
  tr.terminated_by = fwd.term;
  tr.terminated_back = bwd.term;
  return tr;
}

namespace {

// Parent field with one coordinate pinned; presents the remaining two.
class SlicedField : public InertiaField {
 public:
  SlicedField(const InertiaField& parent, int fixed_axis, double value)
      : parent_(parent), axis_(fixed_axis), value_(value) {}
  int dimension() const override { return parent_.dimension() - 1; }
  std::optional<double> anchored_level(const VectorXd& h,
                                       const AnchorId& a) const override {
    return parent_.anchored_level(lift(h), a);
  }
  double global_level(const VectorXd& h) const override {
    return parent_.global_level(lift(h));
  }
  GlobalMax global_detail(const VectorXd& h) const override {
    return parent_.global_detail(lift(h));
  }
  VectorXd lift(const VectorXd& h) const {
    VectorXd full(parent_.dimension());
    int j = 0;
    for (int i = 0; i < parent_.dimension(); ++i)
      full(i) = i == axis_ ? value_ : h(j++);
    return full;
  }

 private:
  const InertiaField& parent_;
  int axis_;
  double value_;
};

BoundaryTrace lift_trace(const SlicedField& sf, const BoundaryTrace& tr) {
  BoundaryTrace out;
  out.anchor = tr.anchor;
  out.terminated_by = tr.terminated_by;
  out.terminated_back = tr.terminated_back;
  out.points.reserve(tr.points.size());
  for (const auto& p : tr.points) out.points.push_back(sf.lift(p));
  return out;
}

SearchContext slice_context(const SearchContext& ctx, const InertiaField& field,
                            int drop_axis) {
  SearchContext sub = ctx;
  sub.field = &field;
  sub.box_lo = VectorXd(2);
  sub.box_up = VectorXd(2);
  int j = 0;
  for (int i = 0; i < 3; ++i) {
    if (i == drop_axis) continue;
    sub.box_lo(j) = ctx.box_lo(i);
    sub.box_up(j) = ctx.box_up(i);
    ++j;
  }
  return sub;
}

}  // namespace

std::vector<BoundaryTrace> trace_3d(const SearchContext& ctx,
                                    const AnchorId& anchor, int slices,
                                    int stride) {
  if (ctx.box_lo.size() != 3)
    throw ScenarioError("trace_3d needs a 3-D search box");
  if (slices < 2) throw ScenarioError("trace_3d needs at least 2 slices");
  if (stride < 1) stride = 1;

  std::vector<BoundaryTrace> out;
  std::vector<double> coord0_values;
  for (int s = 0; s < slices; ++s) {
    const double v =
        ctx.box_lo(1) + (ctx.box_up(1) - ctx.box_lo(1)) * s / (slices - 1.0);
    SlicedField sf(*ctx.field, 1, v);
    SearchContext sub = slice_context(ctx, sf, 1);
    sub.seed = ctx.seed + static_cast<std::uint64_t>(s);
    BoundaryTrace tr = trace_2d(sub, anchor);
    if (tr.points.empty()) continue;
    for (const auto& p : tr.points) coord0_values.push_back(p(0));
    out.push_back(lift_trace(sf, tr));
  }

  std::sort(coord0_values.begin(), coord0_values.end());
  coord0_values.erase(std::unique(coord0_values.begin(), coord0_values.end(),
                                  [](double a, double b) {
                                    return std::abs(a - b) < 1e-9;
                                  }),
                      coord0_values.end());
  for (std::size_t i = 0; i < coord0_values.size();
       i += static_cast<std::size_t>(stride)) {
    SlicedField sf(*ctx.field, 0, coord0_values[i]);
    SearchContext sub = slice_context(ctx, sf, 0);
    sub.seed = ctx.seed + 1000 + static_cast<std::uint64_t>(i);
    BoundaryTrace tr = trace_2d(sub, anchor);
    if (tr.points.empty()) continue;
    out.push_back(lift_trace(sf, tr));
  }
  return out;
}

FullBoundary assemble_full(const SearchContext& ctx,
                           const std::vector<BoundaryTrace>& traces) {
  FullBoundary fb;
  const double eps = ctx.eps();
  for (const auto& tr : traces) {
    BoundaryArc arc;
    bool open = false;
    for (const auto& p : tr.points) {
      GlobalMax gd;
      bool keep = false;
      try {
        gd = ctx.field->global_detail(p);
        // Keep a point only where this trace's own family is the binding
        // one; near family swaps several level sets run within eps of each
        // other and would double-cover the frontier otherwise.
        keep = std::abs(std::abs(gd.value) - ctx.level) <= eps &&
               AnchorId{gd.component, gd.swing} == tr.anchor;
      } catch (const std::exception& e) {
        log::debug(std::string("assemble: evaluation failed: ") + e.what());
      }
      const AnchorId binding{gd.component, gd.swing};
      if (keep && open && !(binding == arc.binding)) {
        fb.arcs.push_back(std::move(arc));
        arc = BoundaryArc{};
        open = false;
      }
      if (keep) {
        if (!open) {
          arc.binding = binding;
          open = true;
        }
        arc.points.push_back(p);
      } else if (open) {
        fb.arcs.push_back(std::move(arc));
        arc = BoundaryArc{};
        open = false;
      }
    }
    if (open) fb.arcs.push_back(std::move(arc));
  }
  return fb;
}

Hyperplane coi_boundary(const MultiRegionSystem& sys,
                        const std::vector<int>& adjustable, double rocof_lim) {
  const double need = coi_critical_inertia(sys.total_disturbance(), rocof_lim);
  double fixed = 0.0;
  for (int i = 0; i < sys.size(); ++i)
    if (std::find(adjustable.begin(), adjustable.end(), i) == adjustable.end())
      fixed += sys.region(i).inertia;
  Hyperplane hp;
  hp.normal = VectorXd::Ones(static_cast<int>(adjustable.size()));
  hp.rhs = need - fixed;
  return hp;
}

double envelope_power(const RocofInertiaField& field, const VectorXd& h) {
  const ModalDecomposition md = field.decompose_at(h);
  double amps = 0.0;
  for (const auto& tc : md.trig) amps += tc.amplitude;
  return 2.0 * field.system_at(h).total_inertia() * std::abs(md.scale) * amps;
}

ConservativeFit conservative_fit(const RocofInertiaField& field,
                                 const VectorXd& box_lo, const VectorXd& box_up,
                                 int grid_per_axis) {
  const int dim = static_cast<int>(box_lo.size());
  if (grid_per_axis < 2)
    throw ScenarioError("conservative fit needs at least 2 grid points per axis");
  int total = 1;
  for (int i = 0; i < dim; ++i) total *= grid_per_axis;

  Eigen::MatrixXd design(total, dim + 1);
  Eigen::VectorXd target(total);
  for (int idx = 0; idx < total; ++idx) {
    int rem = idx;
    VectorXd h(dim);
    for (int i = 0; i < dim; ++i) {
      const int gi = rem % grid_per_axis;
      rem /= grid_per_axis;
      h(i) = box_lo(i) + (box_up(i) - box_lo(i)) * gi / (grid_per_axis - 1.0);
    }
    design.row(idx).head(dim) = h.transpose();
    design(idx, dim) = 1.0;
    target(idx) = envelope_power(field, h);
  }

  const Eigen::VectorXd sol = design.colPivHouseholderQr().solve(target);
  const Eigen::VectorXd residual = target - design * sol;

  ConservativeFit fit;
  fit.coeffs = sol.head(dim);
  fit.offset = sol(dim) + residual.maxCoeff();  // lift above every sample
  fit.rms_residual = std::sqrt(residual.squaredNorm() / total);
  fit.samples = total;
  return fit;
}

std::vector<VectorXd> coi_polyline(const MultiRegionSystem& sys,
                                   const std::vector<int>& adjustable,
                                   double rocof_lim, const VectorXd& box_lo,
                                   const VectorXd& box_up, int n) {
  if (adjustable.size() != 2)
    throw ScenarioError("baseline polylines are 2-D");
  const Hyperplane hp = coi_boundary(sys, adjustable, rocof_lim);
  // The second coordinate is deliberately not clipped: when the aggregate
  // criterion puts its critical line outside the adjustable window, the
  // distance to it is still the meaningful measure of its optimism.
  std::vector<VectorXd> out;
  for (int i = 0; i < n; ++i) {
    const double x = box_lo(0) + (box_up(0) - box_lo(0)) * i / (n - 1.0);
    const double y = hp.rhs - x;
    VectorXd p(2);
    p << x, y;
    out.push_back(p);
  }
  return out;
}

std::vector<VectorXd> conservative_polyline(const RocofInertiaField& field,
                                            const ConservativeFit& fit,
                                            double rocof_lim,
                                            const VectorXd& box_lo,
                                            const VectorXd& box_up, int n) {
  if (fit.coeffs.size() != 2)
    throw ScenarioError("baseline polylines are 2-D");
  const MultiRegionSystem& base = field.base();
  double fixed = 0.0;
  for (int i = 0; i < base.size(); ++i)
    if (std::find(field.adjustable().begin(), field.adjustable().end(), i) ==
        field.adjustable().end())
      fixed += base.region(i).inertia;
  const double dp = std::abs(base.region(field.disturbed()).disturbance);

  std::vector<VectorXd> out;
  const double denom = fit.coeffs(1) - 2.0 * rocof_lim;
  if (std::abs(denom) < 1e-12) return out;
  for (int i = 0; i < n; ++i) {
    const double x = box_lo(0) + (box_up(0) - box_lo(0)) * i / (n - 1.0);
    const double y =
        (2.0 * rocof_lim * (x + fixed) - dp - fit.coeffs(0) * x - fit.offset) /
        denom;
    VectorXd p(2);
    p << x, y;
    out.push_back(p);
  }
  return out;
}

std::vector<VectorXd> simulated_boundary(const RocofInertiaField& field,
                                         double rocof_lim,
                                         const VectorXd& box_lo,
                                         const VectorXd& box_up, int columns,
                                         double t_end, double dt) {
  if (box_lo.size() != 2)
    throw ScenarioError("simulated reference boundary is 2-D");
  const int obs = field.observed();
  auto severity = [&](double x, double y) {
    VectorXd h(2);
    h << x, y;
    const StateSpace ss = build_state_space(field.system_at(h));
    return simulated_peak_rocof(ss, obs, t_end, dt);
  };

  std::vector<VectorXd> out;
  const int ny = 81;
  for (int c = 0; c < columns; ++c) {
    const double x = box_lo(0) + (box_up(0) - box_lo(0)) * c / (columns - 1.0);
    double prev_y = box_lo(1);
    double prev_g = severity(x, prev_y) - rocof_lim;
    for (int i = 1; i < ny; ++i) {
      const double y = box_lo(1) + (box_up(1) - box_lo(1)) * i / (ny - 1.0);
      const double g = severity(x, y) - rocof_lim;
      if ((g > 0.0) != (prev_g > 0.0)) {
        double ya = prev_y, yb = y, ga = prev_g;
        for (int it = 0; it < 40; ++it) {
          const double ym = 0.5 * (ya + yb);
          const double gm = severity(x, ym) - rocof_lim;
          if (std::abs(gm) <= 1e-4 * rocof_lim || yb - ya < 1e-6) {
            ya = yb = ym;
            break;
          }
          if ((gm > 0.0) == (ga > 0.0)) {
            ya = ym;
            ga = gm;
          } else {
            yb = ym;
          }
        }
        VectorXd p(2);
        p << x, 0.5 * (ya + yb);
        out.push_back(p);
      }
      prev_y = y;
      prev_g = g;
    }
  }
  return out;
}

double boundary_error(const std::vector<VectorXd>& candidate,
                      const std::vector<VectorXd>& reference,
                      const VectorXd& box_lo, const VectorXd& box_up) {
  if (reference.empty())
    throw ScenarioError("boundary error needs reference points");
  if (candidate.empty()) return 100.0;
  const double diag = (box_up - box_lo).norm();
  double sum = 0.0;
  for (const auto& r : reference) {
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : candidate) best = std::min(best, (r - c).norm());
    sum += best;
  }
  return 100.0 * sum / (reference.size() * diag);
}

}  // namespace risr
