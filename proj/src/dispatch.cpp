#include "risr/dispatch.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "json.hpp"
#include "risr/logging.hpp"
#include "risr/modal.hpp"
#include "risr/rocof_max.hpp"

namespace risr {

namespace {

std::string tg(const std::string& what, int t, const std::string& g) {
  return what + "[t=" + std::to_string(t) + "," + g + "]";
}

int periods_of(double hours, double period_hours) {
  if (hours <= 0.0) return 0;
  return static_cast<int>(std::ceil(hours / period_hours - 1e-9));
}

}  // namespace

SecurityModel coi_security(const MultiRegionSystem& sys, double rocof_lim) {
  SecurityModel sm;
  sm.kind = SecurityModel::Kind::Linear;
  sm.linear_coeffs = Eigen::VectorXd::Ones(sys.size());
  sm.linear_rhs = coi_critical_inertia(sys.total_disturbance(), rocof_lim);
  return sm;
}

SecurityModel conservative_security(const RocofInertiaField& field,
                                    const ConservativeFit& fit,
                                    double rocof_lim) {
  // Secure side: dp + sum_adj m_i H_i + offset <= 2 lim sum_all H_n,
  // rearranged to sum_n (2 lim - m_n) H_n >= dp + offset.
  const MultiRegionSystem& base = field.base();
  SecurityModel sm;
  sm.kind = SecurityModel::Kind::Linear;
  sm.linear_coeffs =
      Eigen::VectorXd::Constant(base.size(), 2.0 * rocof_lim);
  for (std::size_t i = 0; i < field.adjustable().size(); ++i)
    sm.linear_coeffs(field.adjustable()[i]) -= fit.coeffs(static_cast<int>(i));
  sm.linear_rhs =
      std::abs(base.region(field.disturbed()).disturbance) + fit.offset;
  return sm;
}

DispatchProblem build_problem(const MultiRegionSystem& sys,
                              const std::vector<Generator>& fleet,
                              const DemandSeries& demand,
                              const SecurityModel& security,
                              const DispatchOptions& opt) {
  if (fleet.empty()) throw ScenarioError("dispatch: generator fleet is empty");
  if (demand.by_region.empty())
    throw ScenarioError("dispatch: demand has no periods");
  const int T = static_cast<int>(demand.by_region.size());
  const int G = static_cast<int>(fleet.size());
  const int R = sys.size();
  const double dt_h = demand.period_hours;
  if (!(dt_h > 0.0))
    throw ScenarioError("dispatch: period_hours must be positive");
  for (int t = 0; t < T; ++t)
    if (static_cast<int>(demand.by_region[t].size()) != R)
      throw ScenarioError("dispatch: demand row " + std::to_string(t) +
                          " does not cover every region");
  for (const auto& g : fleet) {
    if (g.region < 0 || g.region >= R)
      throw ScenarioError("generator " + g.id + ": region out of range");
    if (g.p_min < 0.0 || g.p_max < g.p_min)
      throw ScenarioError("generator " + g.id + ": power limits inconsistent");
    if (g.cost_quad < 0.0)
      throw ScenarioError("generator " + g.id +
                          ": quadratic cost must be convex (non-negative)");
    if ((g.kind == GenKind::ViIbr || g.kind == GenKind::Mixed) && g.vi_max < 0.0)
      throw ScenarioError("generator " + g.id + ": vi_max must be >= 0");
  }

  DispatchProblem pb;
  pb.periods = T;
  pb.ngen = G;
  pb.nregion = R;
  pb.fleet = fleet;
  pb.demand = demand;
  pb.security = security;
  auto& lp = pb.lp;

  pb.col_u.assign(T, std::vector<int>(G, -1));
  pb.col_p.assign(T, std::vector<int>(G, -1));
  pb.col_hvi.assign(T, std::vector<int>(G, -1));
  pb.col_zu.assign(T, std::vector<int>(G, -1));
  pb.col_zd.assign(T, std::vector<int>(G, -1));
  pb.col_hr.assign(T, std::vector<int>(R, -1));

  const int segs = std::max(1, opt.pwl_segments);
  std::vector<std::vector<std::vector<int>>> col_seg(
      T, std::vector<std::vector<int>>(G));

  for (int t = 0; t < T; ++t) {
    for (int g = 0; g < G; ++g) {
      const Generator& gen = fleet[g];
      const double u_lo = gen.must_run ? 1.0 : 0.0;
      pb.col_u[t][g] = lp.add_var(u_lo, 1.0, 0.0, tg("u", t, gen.id));
      pb.binary_cols.push_back(pb.col_u[t][g]);
      pb.col_p[t][g] = lp.add_var(0.0, gen.p_max, 0.0, tg("p", t, gen.id));
      if (gen.kind == GenKind::ViIbr || gen.kind == GenKind::Mixed)
        pb.col_hvi[t][g] =
            lp.add_var(0.0, gen.vi_max, 0.0, tg("hvi", t, gen.id));
      pb.col_zu[t][g] = lp.add_var(0.0, 1.0, gen.cost_up, tg("zu", t, gen.id));
      pb.col_zd[t][g] =
          lp.add_var(0.0, 1.0, gen.cost_down, tg("zd", t, gen.id));
    }
    for (int r = 0; r < R; ++r)
      pb.col_hr[t][r] =
          lp.add_var(0.0, kInf, 0.0, "h_region[t=" + std::to_string(t) + "," +
                                         std::to_string(r) + "]");
  }

  // Piecewise-linear convex fuel cost: p = p_min u + sum of segment fills.
  for (int t = 0; t < T; ++t) {
    for (int g = 0; g < G; ++g) {
      const Generator& gen = fleet[g];
      auto cost_at = [&](double p) {
        return gen.cost_quad * p * p + gen.cost_lin * p + gen.cost_const;
      };
      lp.cost[pb.col_u[t][g]] += dt_h * cost_at(gen.p_min);
      const double width = (gen.p_max - gen.p_min) / segs;
      if (width > 1e-12) {
        for (int k = 0; k < segs; ++k) {
          const double a = gen.p_min + k * width;
          const double b = a + width;
          const double slope = (cost_at(b) - cost_at(a)) / width;
          const int col = lp.add_var(0.0, width, dt_h * slope,
                                     tg("seg" + std::to_string(k), t, gen.id));
          col_seg[t][g].push_back(col);
        }
      }
      if (pb.col_hvi[t][g] >= 0)
        lp.cost[pb.col_hvi[t][g]] += dt_h * gen.vi_cost;

      // Definition p - p_min u - sum segments = 0 ties power to commitment
      // and keeps it inside [p_min u, p_max u].
      std::vector<int> idx = {pb.col_p[t][g], pb.col_u[t][g]};
      std::vector<double> val = {1.0, -gen.p_min};
      for (int col : col_seg[t][g]) {
        idx.push_back(col);
        val.push_back(-1.0);
      }
      lp.add_row(idx, val, 0.0, 0.0, tg("power-def", t, gen.id));
      for (int col : col_seg[t][g])
        lp.add_row({col, pb.col_u[t][g]}, {1.0, -width}, -kInf, 0.0,
                   tg("seg-cap", t, gen.id));
    }
  }

  // System balance per period (no line limits in the scenario schema).
  for (int t = 0; t < T; ++t) {
    double total = 0.0;
    for (int r = 0; r < R; ++r) total += demand.by_region[t][r];
    std::vector<int> idx;
    std::vector<double> val;
    for (int g = 0; g < G; ++g) {
      idx.push_back(pb.col_p[t][g]);
      val.push_back(1.0);
    }
    lp.add_row(idx, val, total, total, "balance[t=" + std::to_string(t) + "]");
  }

  // Startup/shutdown indicators and minimum up/down times.
  for (int g = 0; g < G; ++g) {
    const Generator& gen = fleet[g];
    const double init = gen.initially_on ? 1.0 : 0.0;
    const int t_up = periods_of(gen.min_up_h, dt_h);
    const int t_dn = periods_of(gen.min_down_h, dt_h);
    for (int t = 0; t < T; ++t) {
      if (t == 0) {
        lp.add_row({pb.col_u[0][g], pb.col_zu[0][g]}, {1.0, -1.0}, -kInf, init,
                   tg("start-def", 0, gen.id));
        lp.add_row({pb.col_u[0][g], pb.col_zd[0][g]}, {-1.0, -1.0}, -kInf,
                   -init, tg("stop-def", 0, gen.id));
      } else {
        lp.add_row({pb.col_u[t][g], pb.col_u[t - 1][g], pb.col_zu[t][g]},
                   {1.0, -1.0, -1.0}, -kInf, 0.0, tg("start-def", t, gen.id));
        lp.add_row({pb.col_u[t - 1][g], pb.col_u[t][g], pb.col_zd[t][g]},
                   {1.0, -1.0, -1.0}, -kInf, 0.0, tg("stop-def", t, gen.id));
      }
      for (int tau = t + 1; tau < std::min(t + t_up, T); ++tau) {
        if (t == 0) {
          lp.add_row({pb.col_u[0][g], pb.col_u[tau][g]}, {1.0, -1.0}, -kInf,
                     init, tg("min-up", tau, gen.id));
        } else {
          lp.add_row({pb.col_u[t][g], pb.col_u[t - 1][g], pb.col_u[tau][g]},
                     {1.0, -1.0, -1.0}, -kInf, 0.0, tg("min-up", tau, gen.id));
        }
      }
      for (int tau = t + 1; tau < std::min(t + t_dn, T); ++tau) {
        if (t == 0) {
          lp.add_row({pb.col_u[0][g], pb.col_u[tau][g]}, {-1.0, 1.0}, -kInf,
                     1.0 - init, tg("min-down", tau, gen.id));
        } else {
          lp.add_row({pb.col_u[t - 1][g], pb.col_u[t][g], pb.col_u[tau][g]},
                     {1.0, -1.0, 1.0}, -kInf, 1.0, tg("min-down", tau, gen.id));
        }
      }
      if (std::isfinite(gen.ramp)) {
        if (t == 0) {
          const double p0 = gen.initially_on ? gen.initial_p : 0.0;
          lp.add_row({pb.col_p[0][g]}, {1.0}, p0 - gen.ramp, p0 + gen.ramp,
                     tg("ramp", 0, gen.id));
        } else {
          lp.add_row({pb.col_p[t][g], pb.col_p[t - 1][g]}, {1.0, -1.0},
                     -gen.ramp, gen.ramp, tg("ramp", t, gen.id));
        }
      }
      if (pb.col_hvi[t][g] >= 0)
        lp.add_row({pb.col_hvi[t][g], pb.col_u[t][g]},
                   {1.0, -fleet[g].vi_max}, -kInf, 0.0,
                   tg("vi-cap", t, gen.id));
    }
  }

  // Regional inertia aggregation.
  for (int t = 0; t < T; ++t) {
    for (int r = 0; r < R; ++r) {
      std::vector<int> idx = {pb.col_hr[t][r]};
      std::vector<double> val = {1.0};
      for (int g = 0; g < G; ++g) {
        const Generator& gen = fleet[g];
        if (gen.region != r) continue;
        switch (gen.kind) {
          case GenKind::Sg:
          case GenKind::FastSg:
            idx.push_back(pb.col_u[t][g]);
            val.push_back(-gen.inertia);
            break;
          case GenKind::ViIbr:
            idx.push_back(pb.col_hvi[t][g]);
            val.push_back(-1.0);
            break;
          case GenKind::Mixed:
            idx.push_back(pb.col_p[t][g]);
            val.push_back(-gen.sg_inertia_per_pu);
            idx.push_back(pb.col_hvi[t][g]);
            val.push_back(-1.0);
            break;
        }
      }
      lp.add_row(idx, val, 0.0, 0.0,
                 "inertia-def[t=" + std::to_string(t) + ",r=" +
                     std::to_string(r) + "]");
    }
  }

  // Security constraints.
  if (security.kind == SecurityModel::Kind::Linear) {
    if (security.linear_coeffs.size() != R)
      throw ScenarioError("security row dimension mismatch");
    for (int t = 0; t < T; ++t) {
      std::vector<int> idx;
      std::vector<double> val;
      for (int r = 0; r < R; ++r) {
        idx.push_back(pb.col_hr[t][r]);
        val.push_back(security.linear_coeffs(r));
      }
      lp.add_row(idx, val, security.linear_rhs, kInf,
                 "security[t=" + std::to_string(t) + "]");
    }
  } else if (security.kind == SecurityModel::Kind::Cells) {
    const auto& dc = security.cells;
    if (dc.cells.empty())
      throw ScenarioError("security cells are empty");
    if (dc.axes.size() != 2)
      throw ScenarioError("security cells must name two coordinate regions");
    pb.col_cell.assign(T, std::vector<int>(dc.cells.size(), -1));
    for (int t = 0; t < T; ++t) {
      std::vector<int> one_idx;
      std::vector<double> one_val;
      for (std::size_t c = 0; c < dc.cells.size(); ++c) {
        const int zc = lp.add_var(0.0, 1.0, 0.0,
                                  "cell[t=" + std::to_string(t) + "," +
                                      std::to_string(c) + "]");
        pb.col_cell[t][c] = zc;
        pb.binary_cols.push_back(zc);
        one_idx.push_back(zc);
        one_val.push_back(1.0);
        const auto& cell = dc.cells[c];
        for (std::size_t k = 0; k < cell.halfspaces.size(); ++k) {
          const auto& hs = cell.halfspaces[k];
          const double m = dc.big_m[c][k];
          // a . h + M z <= b + M
          lp.add_row({pb.col_hr[t][dc.axes[0]], pb.col_hr[t][dc.axes[1]], zc},
                     {hs.normal.x(), hs.normal.y(), m}, -kInf, hs.offset + m,
                     "cell-face[t=" + std::to_string(t) + "," +
                         std::to_string(c) + "," + std::to_string(k) + "]");
        }
      }
      lp.add_row(one_idx, one_val, 1.0, 1.0,
                 "cell-choice[t=" + std::to_string(t) + "]");
    }

    // The union of cells lies inside its convex hull, so the hull edges hold
    // for every feasible inertia point regardless of the chosen cell. Added
    // unconditionally they tighten the big-M relaxation considerably.
    std::vector<Eigen::Vector2d> verts;
    for (const auto& cell : dc.cells)
      verts.insert(verts.end(), cell.vertices.begin(), cell.vertices.end());
    const auto cuts = hull_halfspaces(convex_hull(std::move(verts)));
    for (int t = 0; t < T; ++t)
      for (std::size_t k = 0; k < cuts.size(); ++k)
        lp.add_row({pb.col_hr[t][dc.axes[0]], pb.col_hr[t][dc.axes[1]]},
                   {cuts[k].normal.x(), cuts[k].normal.y()}, -kInf,
                   cuts[k].offset,
                   "hull-cut[t=" + std::to_string(t) + "," +
                       std::to_string(k) + "]");
  }

  return pb;
}

namespace {

Schedule extract_schedule(const DispatchProblem& pb, const Eigen::VectorXd& x,
                          double objective) {
  Schedule s;
  for (const auto& g : pb.fleet) s.gen_ids.push_back(g.id);
  s.rows.assign(pb.periods, std::vector<ScheduleRow>(pb.ngen));
  s.region_inertia.assign(pb.periods, std::vector<double>(pb.nregion, 0.0));
  s.active_cell.assign(pb.periods, -1);
  for (int t = 0; t < pb.periods; ++t) {
    for (int g = 0; g < pb.ngen; ++g) {
      ScheduleRow& r = s.rows[t][g];
      r.on = x(pb.col_u[t][g]) > 0.5 ? 1 : 0;
      r.power = x(pb.col_p[t][g]);
      if (pb.col_hvi[t][g] >= 0) r.vi_inertia = x(pb.col_hvi[t][g]);
      const int prev_on =
          t == 0 ? (pb.fleet[g].initially_on ? 1 : 0) : s.rows[t - 1][g].on;
      r.started = r.on > prev_on ? 1 : 0;
      r.stopped = prev_on > r.on ? 1 : 0;
    }
    for (int r = 0; r < pb.nregion; ++r)
      s.region_inertia[t][r] = x(pb.col_hr[t][r]);
    if (!pb.col_cell.empty())
      for (std::size_t c = 0; c < pb.col_cell[t].size(); ++c)
        if (x(pb.col_cell[t][c]) > 0.5)
          s.active_cell[t] = static_cast<int>(c);
  }
  s.objective = objective;
  return s;
}

}  // namespace

Schedule solve_dispatch(const DispatchProblem& prob,
                        const DispatchOptions& opt) {
  struct Node {
    std::vector<std::pair<int, int>> fixings;  // column, value
    double bound;
  };

  Schedule best;
  best.status = "infeasible";
  double incumbent = kInf;
  Eigen::VectorXd incumbent_x;
  long nodes = 0;
  bool node_limited = false;

  std::vector<Node> stack;
  stack.push_back({{}, -kInf});
  double root_bound = -kInf;
  double pruned_min = kInf;
  bool root_done = false;

  while (!stack.empty()) {
    if (nodes >= opt.node_limit) {
      node_limited = true;
      break;
    }
    const Node node = stack.back();
    stack.pop_back();
    if (node.bound >= incumbent - opt.gap_abs - 1e-12) {
      pruned_min = std::min(pruned_min, node.bound);
      continue;
    }
    ++nodes;

    LinearProgram lp = prob.lp;
    for (const auto& [col, v] : node.fixings) {
      lp.lo[col] = v;
      lp.up[col] = v;
    }
    const LpSolution rel = solve_lp(lp, opt.max_lp_iterations);
    if (rel.status == LpStatus::IterationLimit)
      throw NumericalError("relaxation hit the simplex iteration limit");
    if (rel.status == LpStatus::Unbounded)
      throw NumericalError("dispatch relaxation is unbounded");
    if (rel.status == LpStatus::Infeasible) {
      if (!root_done) {
        best.status = "infeasible";
        for (int r : rel.infeasible_rows)
          best.infeasible_rows.push_back(prob.lp.rows[r].name);
        root_done = true;
        root_bound = kInf;
      }
      continue;
    }
    if (!root_done) {
      root_bound = rel.objective;
      root_done = true;
    }
    if (rel.objective >= incumbent - opt.gap_abs - 1e-12) {
      pruned_min = std::min(pruned_min, rel.objective);
      continue;
    }

    // Most fractional binary, lowest index on ties.
    int branch_col = -1;
    double best_frac = 1e-6;
    for (int col : prob.binary_cols) {
      const double v = rel.x(col);
      const double frac = std::min(v - std::floor(v), std::ceil(v) - v);
      if (frac > best_frac + 1e-12) {
        best_frac = frac;
        branch_col = col;
      }
    }

    if (branch_col < 0) {
      if (rel.objective < incumbent) {
        incumbent = rel.objective;
        incumbent_x = rel.x;
      }
      continue;
    }

    const double v = rel.x(branch_col);
    const int near = v >= 0.5 ? 1 : 0;
    Node far_node{node.fixings, rel.objective};
    far_node.fixings.push_back({branch_col, 1 - near});
    Node near_node{node.fixings, rel.objective};
    near_node.fixings.push_back({branch_col, near});
    stack.push_back(std::move(far_node));
    stack.push_back(std::move(near_node));  // dive on the nearer value first
  }

  if (std::isfinite(incumbent)) {
    best = extract_schedule(prob, incumbent_x, incumbent);
    double open_bound = std::min(incumbent, pruned_min);
    for (const auto& nd : stack) open_bound = std::min(open_bound, nd.bound);
    if (node_limited) open_bound = std::min(open_bound, root_bound);
    best.best_bound = open_bound;
    best.gap_abs = incumbent - best.best_bound;
    best.status = node_limited
                      ? "node-limit"
                      : (best.gap_abs > 1e-9 ? "gap-limit" : "optimal");
  } else if (node_limited) {
    best.status = "node-limit";
  }
  best.nodes = nodes;
  return best;
}

ValidationReport validate_schedule(const Schedule& sched,
                                   const DispatchProblem& prob,
                                   const MultiRegionSystem& sys, int observed,
                                   int disturbed, double rocof_lim) {
  ValidationReport rep;
  auto fail = [&rep](const std::string& msg) {
    rep.ok = false;
    rep.violations.push_back(msg);
  };
  const double tol = 1e-6;
  const int T = prob.periods;

  for (int t = 0; t < T; ++t) {
    double total_p = 0.0, total_d = 0.0;
    for (double d : prob.demand.by_region[t]) total_d += d;
    for (int g = 0; g < prob.ngen; ++g) {
      const Generator& gen = prob.fleet[g];
      const ScheduleRow& r = sched.rows[t][g];
      total_p += r.power;
      if (r.on) {
        if (r.power < gen.p_min - tol || r.power > gen.p_max + tol)
          fail(tg("power outside committed limits", t, gen.id));
      } else if (std::abs(r.power) > tol) {
        fail(tg("power while offline", t, gen.id));
      }
      if (r.vi_inertia < -tol || r.vi_inertia > gen.vi_max + tol ||
          (!r.on && r.vi_inertia > tol))
        fail(tg("virtual inertia outside its committed cap", t, gen.id));
      if (std::isfinite(gen.ramp)) {
        const double prev =
            t == 0 ? (gen.initially_on ? gen.initial_p : 0.0)
                   : sched.rows[t - 1][g].power;
        if (std::abs(r.power - prev) > gen.ramp + tol)
          fail(tg("ramp violated", t, gen.id));
      }
    }
    if (std::abs(total_p - total_d) > 1e-5)
      fail("balance violated in period " + std::to_string(t));

    Eigen::VectorXd h(prob.nregion);
    for (int r = 0; r < prob.nregion; ++r) {
      double acc = 0.0;
      for (int g = 0; g < prob.ngen; ++g) {
        const Generator& gen = prob.fleet[g];
        if (gen.region != r) continue;
        const ScheduleRow& row = sched.rows[t][g];
        switch (gen.kind) {
          case GenKind::Sg:
          case GenKind::FastSg:
            acc += row.on * gen.inertia;
            break;
          case GenKind::ViIbr:
            acc += row.vi_inertia;
            break;
          case GenKind::Mixed:
            acc += gen.sg_inertia_per_pu * row.power + row.vi_inertia;
            break;
        }
      }
      h(r) = acc;
      if (std::abs(acc - sched.region_inertia[t][r]) > 1e-5)
        fail("inertia aggregation mismatch in period " + std::to_string(t) +
             " region " + std::to_string(r));
    }

    if (prob.security.kind == SecurityModel::Kind::Cells) {
      const auto& dc = prob.security.cells;
      const Eigen::Vector2d p(h(dc.axes[0]), h(dc.axes[1]));
      if (!point_in_cells(dc.cells, p, 1e-6))
        fail("inertia point outside every security cell in period " +
             std::to_string(t));
    } else if (prob.security.kind == SecurityModel::Kind::Linear) {
      double lhs = 0.0;
      for (int r = 0; r < prob.nregion; ++r)
        lhs += prob.security.linear_coeffs(r) * h(r);
      if (lhs < prob.security.linear_rhs - 1e-6)
        fail("linear security row violated in period " + std::to_string(t));
    }

    if (observed >= 0 && disturbed >= 0 && rocof_lim > 0.0) {
      try {
        const GlobalMax gm = global_max(decompose(sys.with_inertia(h),
                                                  observed, disturbed));
        rep.period_peak_rocof.push_back(gm.value);
      } catch (const std::exception& e) {
        fail("period " + std::to_string(t) +
             " severity evaluation failed: " + e.what());
        rep.period_peak_rocof.push_back(0.0);
      }
    }
  }

  // Minimum up/down time accounting over the whole horizon.
  for (int g = 0; g < prob.ngen; ++g) {
    const Generator& gen = prob.fleet[g];
    const int t_up = periods_of(gen.min_up_h, prob.demand.period_hours);
    const int t_dn = periods_of(gen.min_down_h, prob.demand.period_hours);
    int prev = gen.initially_on ? 1 : 0;
    for (int t = 0; t < T; ++t) {
      const int on = sched.rows[t][g].on;
      if (on > prev) {
        for (int tau = t + 1; tau < std::min(t + t_up, T); ++tau)
          if (!sched.rows[tau][g].on)
            fail(tg("minimum up time broken", t, gen.id));
      }
      if (prev > on) {
        for (int tau = t + 1; tau < std::min(t + t_dn, T); ++tau)
          if (sched.rows[tau][g].on)
            fail(tg("minimum down time broken", t, gen.id));
      }
      prev = on;
    }
  }
  return rep;
}

FleetData load_fleet(const std::string& json_text, double nominal_freq_hz) {
  using nlohmann::json;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario: invalid JSON: ") + e.what());
  }

  FleetData fd;
  if (!doc.contains("generators") || !doc.at("generators").is_array())
    throw ScenarioError("scenario: missing 'generators' array for dispatch");

  for (const auto& gj : doc.at("generators")) {
    Generator g;
    if (!gj.contains("id") || !gj.at("id").is_string())
      throw ScenarioError("generators: each entry needs a string 'id'");
    g.id = gj.at("id").get<std::string>();
    const std::string where = "generators[" + g.id + "]";
    auto num = [&](const char* key, double fallback, bool required = false) {
      if (!gj.contains(key)) {
        if (required)
          throw ScenarioError(where + ": missing field '" + key + "'");
        return fallback;
      }
      if (!gj.at(key).is_number())
        throw ScenarioError(where + ": field '" + key + "' must be a number");
      return gj.at(key).get<double>();
    };
    g.region = static_cast<int>(num("region", 0, true));
    const std::string kind = gj.value("kind", "sg");
    if (kind == "sg") g.kind = GenKind::Sg;
    else if (kind == "fast-sg") g.kind = GenKind::FastSg;
    else if (kind == "vi-ibr") g.kind = GenKind::ViIbr;
    else if (kind == "mixed") g.kind = GenKind::Mixed;
    else throw ScenarioError(where + ": unknown kind '" + kind + "'");
    g.p_min = num("p_min_pu", 0.0);
    g.p_max = num("p_max_pu", 0.0, true);
    g.cost_quad = num("cost_quad", 0.0);
    g.cost_lin = num("cost_lin", 0.0);
    g.cost_const = num("cost_const", 0.0);
    g.cost_up = num("cost_up", 0.0);
    g.cost_down = num("cost_down", 0.0);
    g.vi_cost = num("vi_cost", 0.0);
    g.inertia = num("inertia_s", 0.0);
    g.vi_max = num("vi_max_s", 0.0);
    g.sg_inertia_per_pu = num("sg_inertia_per_pu", 0.0);
    g.min_up_h = num("min_up_h", 0.0);
    g.min_down_h = num("min_down_h", 0.0);
    const double ramp = num("ramp_pu_per_period", -1.0);
    g.ramp = ramp > 0.0 ? ramp : kInf;
    g.initially_on = gj.value("initially_on", false);
    g.initial_p = num("initial_p_pu", 0.0);
    g.must_run = gj.value("must_run", false);
    fd.generators.push_back(std::move(g));
  }

  if (!doc.contains("dispatch") || !doc.at("dispatch").is_object())
    throw ScenarioError("scenario: missing 'dispatch' section");
  const auto& dj = doc.at("dispatch");
  fd.demand.period_hours = dj.value("period_hours", 0.5);
  if (!dj.contains("demand_pu") || !dj.at("demand_pu").is_array())
    throw ScenarioError("dispatch: missing 'demand_pu' array of arrays");
  for (const auto& row : dj.at("demand_pu")) {
    if (!row.is_array())
      throw ScenarioError("dispatch: demand_pu rows must be arrays");
    std::vector<double> r;
    for (const auto& v : row) {
      if (!v.is_number())
        throw ScenarioError("dispatch: demand values must be numbers");
      r.push_back(v.get<double>());
    }
    fd.demand.by_region.push_back(std::move(r));
  }
  if (dj.contains("rocof_lim_hz_per_s"))
    fd.rocof_lim = dj.at("rocof_lim_hz_per_s").get<double>() / nominal_freq_hz;
  fd.observed = dj.value("observed", -1);
  fd.disturbed = dj.value("disturbed", -1);
  if (dj.contains("adjustable"))
    for (const auto& v : dj.at("adjustable"))
      fd.adjustable.push_back(v.get<int>());
  return fd;
}

}  // namespace risr
