#include "risr/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "risr/boundary.hpp"
#include "risr/cells.hpp"
#include "risr/dispatch.hpp"
#include "risr/geometry.hpp"
#include "risr/logging.hpp"
#include "risr/modal.hpp"
#include "risr/rocof_max.hpp"
#include "risr/simulate.hpp"
#include "risr/system.hpp"

namespace risr {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path ensure_out(const std::string& out) {
  fs::path dir = out.empty() ? fs::path(".") : fs::path(out);
  fs::create_directories(dir);
  return dir;
}

void write_text(const fs::path& p, const std::string& body) {
  std::ofstream out(p);
  if (!out) throw ScenarioError("cannot write " + p.string());
  out << body;
}

int pick_disturbed(const MultiRegionSystem& sys, int flag) {
  if (flag >= 0) return flag;
  int found = -1;
  for (int i = 0; i < sys.size(); ++i) {
    if (sys.region(i).disturbance != 0.0) {
      if (found >= 0)
        throw ScenarioError(
            "several regions carry a disturbance; pass --disturbed");
      found = i;
    }
  }
  if (found < 0)
    throw ScenarioError("no region carries a disturbance; pass --disturbed");
  return found;
}

std::vector<int> default_adjustable(const MultiRegionSystem& sys,
                                    const std::vector<int>& flag) {
  if (!flag.empty()) return flag;
  std::vector<int> adj;
  for (int i = 0; i < sys.size(); ++i)
    if (sys.region(i).inertia_up > sys.region(i).inertia_lo) adj.push_back(i);
  if (adj.empty())
    throw ScenarioError(
        "no region has an adjustable inertia range; pass --adjustable");
  return adj;
}

void box_of(const MultiRegionSystem& sys, const std::vector<int>& adj,
            Eigen::VectorXd& lo, Eigen::VectorXd& up) {
  lo.resize(static_cast<int>(adj.size()));
  up.resize(static_cast<int>(adj.size()));
  for (std::size_t i = 0; i < adj.size(); ++i) {
    lo(static_cast<int>(i)) = sys.region(adj[i]).inertia_lo;
    up(static_cast<int>(i)) = sys.region(adj[i]).inertia_up;
    if (!(up(static_cast<int>(i)) > lo(static_cast<int>(i))))
      throw ScenarioError("region " + std::to_string(adj[i]) +
                          " has a degenerate inertia range");
  }
}

json gm_to_json(const GlobalMax& gm, double f0) {
  json j;
  j["value_pu_per_s"] = gm.value;
  j["value_hz_per_s"] = gm.value * f0;
  j["t_star_s"] = gm.t_star;
  j["component"] = gm.component;
  j["swing"] = gm.swing;
  j["msn"] = gm.msn;
  json cands = json::array();
  for (const auto& lm : gm.candidates) {
    json c;
    c["component"] = lm.anchor.component;
    c["swing"] = lm.anchor.swing;
    c["t_hat_s"] = lm.anchor.t_hat;
    c["t_star_s"] = lm.t_star;
    c["value_hz_per_s"] = lm.value * f0;
    c["accepted"] = lm.accepted;
    if (!lm.accepted) c["reason"] = lm.reject_reason;
    cands.push_back(c);
  }
  j["candidates"] = cands;
  return j;
}

json cells_to_json(const SecureRegionCells& res, double lim_hz, int observed,
                   int disturbed) {
  json j;
  j["axes"] = res.axes;
  j["box"]["lo"] = {res.box.lo.x(), res.box.lo.y()};
  j["box"]["up"] = {res.box.up.x(), res.box.up.y()};
  j["rocof_lim_hz_per_s"] = lim_hz;
  j["observed"] = observed;
  j["disturbed"] = disturbed;
  json poly = json::array();
  for (const auto& v : res.polygon.vertices) poly.push_back({v.x(), v.y()});
  j["polygon"] = poly;
  json cells = json::array();
  for (std::size_t c = 0; c < res.cells.size(); ++c) {
    json jc;
    json verts = json::array();
    for (const auto& v : res.cells[c].vertices)
      verts.push_back({v.x(), v.y()});
    jc["vertices"] = verts;
    json hss = json::array();
    for (const auto& hs : res.cells[c].halfspaces) {
      json h;
      h["normal"] = {hs.normal.x(), hs.normal.y()};
      h["offset"] = hs.offset;
      hss.push_back(h);
    }
    jc["halfspaces"] = hss;
    jc["big_m"] = res.disjunctive.big_m[c];
    cells.push_back(jc);
  }
  j["cells"] = cells;
  return j;
}

DisjunctiveConstraint cells_from_json(const json& j) {
  DisjunctiveConstraint dc;
  for (const auto& a : j.at("axes")) dc.axes.push_back(a.get<int>());
  dc.box.lo = Eigen::Vector2d(j.at("box").at("lo")[0].get<double>(),
                              j.at("box").at("lo")[1].get<double>());
  dc.box.up = Eigen::Vector2d(j.at("box").at("up")[0].get<double>(),
                              j.at("box").at("up")[1].get<double>());
  for (const auto& jc : j.at("cells")) {
    ConvexCell cell;
    for (const auto& v : jc.at("vertices"))
      cell.vertices.emplace_back(v[0].get<double>(), v[1].get<double>());
    for (const auto& h : jc.at("halfspaces"))
      cell.halfspaces.push_back(
          {Eigen::Vector2d(h.at("normal")[0].get<double>(),
                           h.at("normal")[1].get<double>()),
           h.at("offset").get<double>()});
    std::vector<double> ms;
    for (const auto& m : jc.at("big_m")) ms.push_back(m.get<double>());
    dc.cells.push_back(std::move(cell));
    dc.big_m.push_back(std::move(ms));
  }
  return dc;
}

struct Args {
  std::string scenario;
  std::string out;
  int observed = 0;
  int disturbed = -1;
  double rocof_lim_hz = 0.0;
  double eps_t = 0.0;
  double eps_s = 0.0;
  double step = 1.0;
  int lmax = 0;
  double dt = 1e-3;
  double t_end = 10.0;
  int threads = 1;
  std::uint64_t seed = 1234;
  std::vector<int> adjustable;
  std::vector<std::string> anchors;
  int slices = 9;
  int stride = 4;
  int grid = 41;
  double simplify = 0.005;
  std::string security = "cells";
  std::string cells_file;
  double gap = 1.0;
  int segments = 4;
  long node_limit = 200000;
  int columns = 25;
  std::string inertia_csv;
};

RocofMaxOptions max_opts(const Args& a) {
  RocofMaxOptions o;
  o.l_max = a.lmax;
  o.eps_t = a.eps_t;
  return o;
}

std::vector<AnchorId> parse_anchors(const std::vector<std::string>& specs) {
  std::vector<AnchorId> out;
  for (const auto& s : specs) {
    const auto colon = s.find(':');
    if (colon == std::string::npos)
      throw ScenarioError("anchor spec '" + s + "' must look like m:l");
    out.push_back({std::stoi(s.substr(0, colon)),
                   std::stoi(s.substr(colon + 1))});
  }
  return out;
}

double lim_pu_of(const Args& a, const MultiRegionSystem& sys) {
  if (!(a.rocof_lim_hz > 0.0))
    throw ScenarioError("--rocof-lim must be positive (Hz/s)");
  return a.rocof_lim_hz / sys.nominal_freq_hz();
}

void warn_threads(const Args& a) {
  if (a.threads != 1)
    log::info("--threads is accepted for interface stability; computation is "
              "single-threaded for determinism");
}

int cmd_simulate(const Args& a) {
  const MultiRegionSystem sys = load_scenario_file(a.scenario);
  const StateSpace ss = build_state_space(sys);
  const Trajectory tr = simulate(ss, a.t_end, a.dt);
  json j;
  j["steps"] = tr.times.size();
  j["t_end_s"] = a.t_end;
  j["dt_s"] = a.dt;
  json peaks = json::array();
  for (int r = 0; r < sys.size(); ++r) {
    double best = 0.0, tat = 0.0;
    for (std::size_t i = 0; i < tr.times.size(); ++i)
      if (std::abs(tr.rocof(i, r)) > std::abs(best)) {
        best = tr.rocof(i, r);
        tat = tr.times[i];
      }
    json p;
    p["region"] = r;
    p["peak_rocof_hz_per_s"] = best * sys.nominal_freq_hz();
    p["t_at_s"] = tat;
    peaks.push_back(p);
  }
  j["peaks"] = peaks;
  if (!a.out.empty()) {
    const fs::path dir = ensure_out(a.out);
    std::ofstream csv(dir / "trajectory.csv");
    tr.write_csv(csv, sys.nominal_freq_hz());
    j["trajectory_csv"] = (dir / "trajectory.csv").string();
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_modes(const Args& a) {
  const MultiRegionSystem sys = load_scenario_file(a.scenario);
  const StateSpace ss = build_state_space(sys);
  const ModalBasis mb = eigendecompose(ss);
  json j;
  j["n_regions"] = mb.n_regions;
  j["coi_jordan"] = mb.coi_jordan;
  j["condition"] = mb.condition;
  json eig = json::array();
  for (int i = 0; i < mb.eigenvalues.size(); ++i)
    eig.push_back({mb.eigenvalues(i).real(), mb.eigenvalues(i).imag()});
  j["eigenvalues"] = eig;

  int disturbed = -1;
  try {
    disturbed = pick_disturbed(sys, a.disturbed);
  } catch (const ScenarioError&) {
    disturbed = -1;  // eigenvalues alone are still useful
  }
  if (disturbed >= 0) {
    const ModalDecomposition md = real_modes(mb, sys, a.observed, disturbed);
    j["observed"] = md.observed;
    j["disturbed"] = md.disturbed;
    j["scale_pu_per_s"] = md.scale;
    j["exp"] = {{"amplitude", md.exp_amplitude}, {"decay_per_s", md.exp_decay}};
    json trig = json::array();
    for (const auto& tc : md.trig)
      trig.push_back({{"amplitude", tc.amplitude},
                      {"decay_per_s", tc.decay},
                      {"ang_freq_rad_per_s", tc.ang_freq},
                      {"phase_rad", tc.phase}});
    j["trig"] = trig;
    j["sum_at_zero"] = md.sum_at(0.0);
  }
  if (!a.out.empty()) {
    const fs::path dir = ensure_out(a.out);
    write_text(dir / "modes.json", j.dump(2) + "\n");
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_rocof_max(const Args& a) {
  const MultiRegionSystem sys = load_scenario_file(a.scenario);
  const int disturbed = pick_disturbed(sys, a.disturbed);
  const ModalDecomposition md = decompose(sys, a.observed, disturbed);
  const GlobalMax gm = global_max(md, max_opts(a));
  json j = gm_to_json(gm, sys.nominal_freq_hz());
  j["observed"] = a.observed;
  j["disturbed"] = disturbed;
  if (a.rocof_lim_hz > 0.0)
    j["within_limit"] = std::abs(gm.value) <= lim_pu_of(a, sys);
  if (!a.out.empty()) {
    const fs::path dir = ensure_out(a.out);
    write_text(dir / "rocof_max.json", j.dump(2) + "\n");
    std::ostringstream csv;
    csv << "component,swing,t_hat_s,t_star_s,value_hz_per_s,accepted,reason\n";
    for (const auto& lm : gm.candidates)
      csv << lm.anchor.component << "," << lm.anchor.swing << ","
          << lm.anchor.t_hat << "," << lm.t_star << ","
          << lm.value * sys.nominal_freq_hz() << "," << lm.accepted << ","
          << lm.reject_reason << "\n";
    write_text(dir / "anchors.csv", csv.str());
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_trace(const Args& a) {
  warn_threads(a);
  const MultiRegionSystem sys = load_scenario_file(a.scenario);
  const int disturbed = pick_disturbed(sys, a.disturbed);
  const auto adjustable = default_adjustable(sys, a.adjustable);
  if (adjustable.size() != 2 && adjustable.size() != 3)
    throw ScenarioError("tracing works over 2 or 3 adjustable regions");
  const double lim_pu = lim_pu_of(a, sys);

  RocofInertiaField field(sys, adjustable, a.observed, disturbed, max_opts(a));
  SearchContext ctx;
  ctx.field = &field;
  ctx.level = lim_pu;
  box_of(sys, adjustable, ctx.box_lo, ctx.box_up);
  ctx.step = a.step;
  ctx.eps_level = a.eps_s;
  ctx.seed = a.seed;

  std::vector<AnchorId> anchors = parse_anchors(a.anchors);
  if (anchors.empty())
    anchors = discover_anchors(field, ctx.box_lo, ctx.box_up,
                               adjustable.size() == 2 ? 9 : 6);
  if (anchors.empty())
    throw ScenarioError("no oscillatory trough family found over the box");

  const auto traces = trace_families(ctx, anchors, a.slices, a.stride);
  const FullBoundary full = assemble_full(ctx, traces);

  const fs::path dir = ensure_out(a.out);
  const int dim = static_cast<int>(adjustable.size());
  {
    std::ostringstream csv;
    csv << "trace,component,swing,point";
    for (int d = 0; d < dim; ++d) csv << ",h" << adjustable[d] << "_s";
    csv << ",term_forward,term_backward\n";
    for (std::size_t ti = 0; ti < traces.size(); ++ti) {
      const auto& tr = traces[ti];
      for (std::size_t pi = 0; pi < tr.points.size(); ++pi) {
        csv << ti << "," << tr.anchor.component << "," << tr.anchor.swing
            << "," << pi;
        for (int d = 0; d < dim; ++d) csv << "," << tr.points[pi](d);
        csv << "," << to_string(tr.terminated_by) << ","
            << to_string(tr.terminated_back) << "\n";
      }
    }
    write_text(dir / "trace.csv", csv.str());
  }
  {
    std::ostringstream csv;
    csv << "arc,component,swing,point";
    for (int d = 0; d < dim; ++d) csv << ",h" << adjustable[d] << "_s";
    csv << "\n";
    for (std::size_t ai = 0; ai < full.arcs.size(); ++ai) {
      const auto& arc = full.arcs[ai];
      for (std::size_t pi = 0; pi < arc.points.size(); ++pi) {
        csv << ai << "," << arc.binding.component << "," << arc.binding.swing
            << "," << pi;
        for (int d = 0; d < dim; ++d) csv << "," << arc.points[pi](d);
        csv << "\n";
      }
    }
    write_text(dir / "full_boundary.csv", csv.str());
  }

  json j;
  j["adjustable"] = adjustable;
  j["rocof_lim_hz_per_s"] = a.rocof_lim_hz;
  j["anchors_traced"] = json::array();
  for (const auto& an : anchors)
    j["anchors_traced"].push_back({an.component, an.swing});
  json jt = json::array();
  for (const auto& tr : traces) {
    json e;
    e["component"] = tr.anchor.component;
    e["swing"] = tr.anchor.swing;
    e["points"] = tr.points.size();
    e["terminated_forward"] = to_string(tr.terminated_by);
    e["terminated_backward"] = to_string(tr.terminated_back);
    jt.push_back(e);
  }
  j["traces"] = jt;
  j["full_boundary_arcs"] = full.arcs.size();
  j["full_boundary_points"] = full.point_count();
  j["trace_csv"] = (dir / "trace.csv").string();
  j["full_boundary_csv"] = (dir / "full_boundary.csv").string();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_contour(const Args& a) {
  const MultiRegionSystem sys = load_scenario_file(a.scenario);
  const int disturbed = pick_disturbed(sys, a.disturbed);
  const auto adjustable = default_adjustable(sys, a.adjustable);
  if (adjustable.size() != 2)
    throw ScenarioError("contour works over exactly 2 adjustable regions");
  RocofInertiaField field(sys, adjustable, a.observed, disturbed, max_opts(a));
  Eigen::VectorXd lo, up;
  box_of(sys, adjustable, lo, up);

  const fs::path dir = ensure_out(a.out);
  std::ostringstream csv;
  csv << "h" << adjustable[0] << "_s,h" << adjustable[1]
      << "_s,rocof_hz_per_s,component,swing,t_star_s\n";
  const int n = std::max(2, a.grid);
  for (int i = 0; i < n; ++i) {
    for (int k = 0; k < n; ++k) {
      Eigen::VectorXd h(2);
      h << lo(0) + (up(0) - lo(0)) * i / (n - 1.0),
          lo(1) + (up(1) - lo(1)) * k / (n - 1.0);
      const GlobalMax gm = field.global_detail(h);
      csv << h(0) << "," << h(1) << ","
          << std::abs(gm.value) * sys.nominal_freq_hz() << "," << gm.component
          << "," << gm.swing << "," << gm.t_star << "\n";
    }
  }
  write_text(dir / "contour.csv", csv.str());
  json j;
  j["grid"] = n;
  j["contour_csv"] = (dir / "contour.csv").string();
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_decompose(const Args& a) {
  warn_threads(a);
  const MultiRegionSystem sys = load_scenario_file(a.scenario);
  const int disturbed = pick_disturbed(sys, a.disturbed);
  const auto adjustable = default_adjustable(sys, a.adjustable);
  if (adjustable.size() != 2)
    throw ScenarioError("convex decomposition works over 2 adjustable regions");
  const double lim_pu = lim_pu_of(a, sys);

  RocofInertiaField field(sys, adjustable, a.observed, disturbed, max_opts(a));
  Eigen::VectorXd lo, up;
  box_of(sys, adjustable, lo, up);
  const SecureRegionCells res = build_secure_cells(field, lim_pu, lo, up, a.step,
                                          a.eps_s, a.seed, a.simplify);

  double cell_area = 0.0;
  for (const auto& c : res.cells) {
    Polyhedron p;
    p.vertices = c.vertices;
    cell_area += p.area();
  }

  const fs::path dir = ensure_out(a.out);
  json j = cells_to_json(res, a.rocof_lim_hz, a.observed, disturbed);
  write_text(dir / "cells.json", j.dump(2) + "\n");
  {
    std::ostringstream csv;
    csv << "vertex,h" << adjustable[0] << "_s,h" << adjustable[1] << "_s\n";
    for (std::size_t i = 0; i < res.polygon.vertices.size(); ++i)
      csv << i << "," << res.polygon.vertices[i].x() << ","
          << res.polygon.vertices[i].y() << "\n";
    write_text(dir / "polygon.csv", csv.str());
  }
  json sum;
  sum["polygon_vertices"] = res.polygon.vertices.size();
  sum["polygon_area"] = res.polygon.area();
  sum["cells"] = res.cells.size();
  sum["cell_area_sum"] = cell_area;
  sum["area_mismatch"] = std::abs(cell_area - res.polygon.area());
  sum["full_boundary_points"] = res.full.point_count();
  sum["cells_json"] = (dir / "cells.json").string();
  std::cout << sum.dump(2) << "\n";
  return 0;
}

int cmd_assess(const Args& a) {
  const MultiRegionSystem sys = load_scenario_file(a.scenario);
  const int disturbed = pick_disturbed(sys, a.disturbed);
  const double lim_pu = lim_pu_of(a, sys);

  std::vector<double> vals;
  std::stringstream ss(a.inertia_csv);
  std::string tok;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  if (static_cast<int>(vals.size()) != sys.size())
    throw ScenarioError("--inertia needs one value per region");
  Eigen::VectorXd h(sys.size());
  for (int i = 0; i < sys.size(); ++i) h(i) = vals[i];

  const Assessment as = assess(sys, h, a.observed, disturbed, lim_pu);
  json j;
  j["verdict"] = to_string(as.verdict);
  j["max_rocof_hz_per_s"] = as.max_rocof * sys.nominal_freq_hz();
  j["t_star_s"] = as.t_star;
  j["msn"] = as.msn;
  j["detail"] = as.detail;
  if (!a.out.empty()) {
    const fs::path dir = ensure_out(a.out);
    write_text(dir / "assess.json", j.dump(2) + "\n");
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_dispatch(const Args& a) {
  warn_threads(a);
  const MultiRegionSystem sys = load_scenario_file(a.scenario);
  const FleetData fd = load_fleet(slurp(a.scenario), sys.nominal_freq_hz());
  const double lim_pu =
      a.rocof_lim_hz > 0.0 ? a.rocof_lim_hz / sys.nominal_freq_hz()
                           : fd.rocof_lim;
  const int observed = fd.observed >= 0 ? fd.observed : a.observed;
  const int disturbed = pick_disturbed(sys, fd.disturbed >= 0 ? fd.disturbed
                                                              : a.disturbed);

  SecurityModel security;
  if (a.security == "none") {
    security.kind = SecurityModel::Kind::None;
  } else if (a.security == "coi") {
    if (!(lim_pu > 0.0)) throw ScenarioError("--rocof-lim required");
    security = coi_security(sys, lim_pu);
  } else if (a.security == "conservative") {
    if (!(lim_pu > 0.0)) throw ScenarioError("--rocof-lim required");
    const auto adjustable =
        default_adjustable(sys, a.adjustable.empty() ? fd.adjustable
                                                     : a.adjustable);
    RocofInertiaField field(sys, adjustable, observed, disturbed, max_opts(a));
    Eigen::VectorXd lo, up;
    box_of(sys, adjustable, lo, up);
    const ConservativeFit fit = conservative_fit(field, lo, up, 8);
    security = conservative_security(field, fit, lim_pu);
  } else if (a.security == "cells") {
    security.kind = SecurityModel::Kind::Cells;
    if (!a.cells_file.empty()) {
      security.cells = cells_from_json(json::parse(slurp(a.cells_file)));
    } else {
      if (!(lim_pu > 0.0)) throw ScenarioError("--rocof-lim required");
      const auto adjustable =
          default_adjustable(sys, a.adjustable.empty() ? fd.adjustable
                                                       : a.adjustable);
      RocofInertiaField field(sys, adjustable, observed, disturbed,
                              max_opts(a));
      Eigen::VectorXd lo, up;
      box_of(sys, adjustable, lo, up);
      security = SecurityModel{};
      security.kind = SecurityModel::Kind::Cells;
      DisjunctiveConstraint dc = build_secure_cells(field, lim_pu, lo, up, a.step,
                                             a.eps_s, a.seed, a.simplify)
                                     .disjunctive;
      // Sliver cells add binaries without adding usable area; any subset of
      // the certified union remains a valid (smaller) security region.
      auto area_of = [](const ConvexCell& c) {
        double s = 0.0;
        for (std::size_t i = 0; i < c.vertices.size(); ++i) {
          const auto& p = c.vertices[i];
          const auto& q = c.vertices[(i + 1) % c.vertices.size()];
          s += p.x() * q.y() - q.x() * p.y();
        }
        return 0.5 * std::abs(s);
      };
      double total = 0.0;
      for (const auto& c : dc.cells) total += area_of(c);
      std::vector<ConvexCell> kept;
      for (const auto& c : dc.cells)
        if (area_of(c) >= 0.02 * total) kept.push_back(c);
      security.cells = to_disjunctive(kept, dc.box, dc.axes);
    }
  } else {
    throw ScenarioError("--security must be none, coi, conservative or cells");
  }

  DispatchOptions opt;
  opt.pwl_segments = a.segments;
  opt.gap_abs = a.gap;
  opt.node_limit = a.node_limit;
  const DispatchProblem prob =
      build_problem(sys, fd.generators, fd.demand, security, opt);
  const Schedule sched = solve_dispatch(prob, opt);

  json j;
  j["status"] = sched.status;
  j["objective"] = sched.objective;
  j["best_bound"] = sched.best_bound;
  j["gap_abs"] = sched.gap_abs;
  j["nodes"] = sched.nodes;
  j["binaries"] = prob.binary_cols.size();
  j["rows"] = prob.lp.rows.size();
  if (!sched.infeasible_rows.empty()) j["infeasible_rows"] = sched.infeasible_rows;

  if (sched.status != "infeasible" && sched.status != "node-limit") {
    const ValidationReport rep = validate_schedule(
        sched, prob, sys, observed, disturbed, lim_pu);
    j["validation_ok"] = rep.ok;
    if (!rep.ok) j["violations"] = rep.violations;
    json peaks = json::array();
    for (double v : rep.period_peak_rocof)
      peaks.push_back(v * sys.nominal_freq_hz());
    j["period_peak_rocof_hz_per_s"] = peaks;

    const fs::path dir = ensure_out(a.out);
    {
      std::ostringstream csv;
      csv << "period,generator,on,started,stopped,power_pu,vi_inertia_s\n";
      for (int t = 0; t < prob.periods; ++t)
        for (int g = 0; g < prob.ngen; ++g) {
          const auto& r = sched.rows[t][g];
          csv << t << "," << sched.gen_ids[g] << "," << r.on << ","
              << r.started << "," << r.stopped << "," << r.power << ","
              << r.vi_inertia << "\n";
        }
      write_text(dir / "schedule.csv", csv.str());
      j["schedule_csv"] = (dir / "schedule.csv").string();
    }
    {
      std::ostringstream csv;
      csv << "period";
      for (int r = 0; r < prob.nregion; ++r) csv << ",h" << r << "_s";
      csv << ",active_cell,peak_rocof_hz_per_s\n";
      for (int t = 0; t < prob.periods; ++t) {
        csv << t;
        for (int r = 0; r < prob.nregion; ++r)
          csv << "," << sched.region_inertia[t][r];
        csv << "," << sched.active_cell[t] << ","
            << (t < static_cast<int>(rep.period_peak_rocof.size())
                    ? rep.period_peak_rocof[t] * sys.nominal_freq_hz()
                    : 0.0)
            << "\n";
      }
      write_text(dir / "inertia.csv", csv.str());
      j["inertia_csv"] = (dir / "inertia.csv").string();
    }
    write_text(ensure_out(a.out) / "dispatch.json", j.dump(2) + "\n");
  }
  std::cout << j.dump(2) << "\n";
  return 0;
}

int cmd_compare(const Args& a) {
  warn_threads(a);
  const MultiRegionSystem sys = load_scenario_file(a.scenario);
  const int disturbed = pick_disturbed(sys, a.disturbed);
  const auto adjustable = default_adjustable(sys, a.adjustable);
  if (adjustable.size() != 2)
    throw ScenarioError("compare works over exactly 2 adjustable regions");
  const double lim_pu = lim_pu_of(a, sys);

  RocofInertiaField field(sys, adjustable, a.observed, disturbed, max_opts(a));
  Eigen::VectorXd lo, up;
  box_of(sys, adjustable, lo, up);

  // Traced frontier.
  SearchContext ctx;
  ctx.field = &field;
  ctx.level = lim_pu;
  ctx.box_lo = lo;
  ctx.box_up = up;
  ctx.step = a.step;
  ctx.eps_level = a.eps_s;
  ctx.seed = a.seed;
  auto anchors = discover_anchors(field, lo, up, 9);
  const auto traces = trace_families(ctx, anchors, a.slices, a.stride);
  const FullBoundary full = assemble_full(ctx, traces);
  const auto traced_pts = full.all_points();

  const auto coi_pts = coi_polyline(sys, adjustable, lim_pu, lo, up, 200);
  const ConservativeFit fit = conservative_fit(field, lo, up, 8);
  const auto cons_pts = conservative_polyline(field, fit, lim_pu, lo, up, 200);
  const auto ref_pts =
      simulated_boundary(field, lim_pu, lo, up, a.columns, a.t_end, a.dt);

  const fs::path dir = ensure_out(a.out);
  {
    std::ostringstream csv;
    csv << "family,h" << adjustable[0] << "_s,h" << adjustable[1] << "_s\n";
    auto dump = [&csv](const char* label,
                       const std::vector<Eigen::VectorXd>& pts) {
      for (const auto& p : pts)
        csv << label << "," << p(0) << "," << p(1) << "\n";
    };
    dump("traced", traced_pts);
    dump("coi", coi_pts);
    dump("conservative", cons_pts);
    dump("reference", ref_pts);
    write_text(dir / "boundaries.csv", csv.str());
  }

  json j;
  j["reference_points"] = ref_pts.size();
  j["traced_points"] = traced_pts.size();
  j["error_pct"] = {
      {"traced", boundary_error(traced_pts, ref_pts, lo, up)},
      {"coi", boundary_error(coi_pts, ref_pts, lo, up)},
      {"conservative", boundary_error(cons_pts, ref_pts, lo, up)}};
  j["conservative_fit"] = {{"coeffs", {fit.coeffs(0), fit.coeffs(1)}},
                           {"offset", fit.offset},
                           {"rms_residual", fit.rms_residual}};
  j["boundaries_csv"] = (dir / "boundaries.csv").string();
  write_text(dir / "compare.json", j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
  return 0;
}

}  // namespace

int run_cli(int argc, char** argv) {
  CLI::App app{
      "Regional inertia security analysis: worst rate-of-change-of-frequency "
      "evaluation, security boundary tracing, convex decomposition and "
      "inertia-aware unit commitment"};
  app.require_subcommand(1);
  Args a;

  auto add_common = [&a](CLI::App* c, bool need_scenario = true) {
    auto* s = c->add_option("--scenario", a.scenario, "scenario JSON document");
    if (need_scenario) s->required()->check(CLI::ExistingFile);
    c->add_option("--out", a.out, "output directory");
    c->add_option("--observed", a.observed, "observed region id");
    c->add_option("--disturbed", a.disturbed,
                  "disturbed region id (default: the only disturbed region)");
    c->add_option("--threads", a.threads, "reserved; runs single-threaded");
    c->add_option("--seed", a.seed, "seed for boundary seeding");
  };

  auto* sim = app.add_subcommand("simulate", "integrate the swing model");
  add_common(sim);
  sim->add_option("--t-end", a.t_end, "horizon, seconds");
  sim->add_option("--dt", a.dt, "step, seconds");

  auto* modes = app.add_subcommand("modes", "eigenstructure and response terms");
  add_common(modes);

  auto* rmax = app.add_subcommand("rocof-max", "analytic worst frequency rate");
  add_common(rmax);
  rmax->add_option("--rocof-lim", a.rocof_lim_hz, "limit, Hz/s");
  rmax->add_option("--eps-t", a.eps_t, "trust window, s (0 = default)");
  rmax->add_option("--lmax", a.lmax, "swing count cap (0 = default)");

  auto* trc = app.add_subcommand("trace", "trace the security boundary");
  add_common(trc);
  trc->add_option("--rocof-lim", a.rocof_lim_hz, "limit, Hz/s")->required();
  trc->add_option("--adjustable", a.adjustable, "adjustable region ids");
  trc->add_option("--step", a.step, "arc step, seconds of inertia");
  trc->add_option("--eps-s", a.eps_s, "level tolerance, per-unit/s (0 = default)");
  trc->add_option("--eps-t", a.eps_t, "trust window, s (0 = default)");
  trc->add_option("--lmax", a.lmax, "swing count cap (0 = default)");
  trc->add_option("--anchors", a.anchors, "trough families m:l to trace");
  trc->add_option("--slices", a.slices, "slices for 3-D tracing");
  trc->add_option("--stride", a.stride, "transversal stride for 3-D tracing");

  auto* cont = app.add_subcommand("contour", "severity grid over two regions");
  add_common(cont);
  cont->add_option("--adjustable", a.adjustable, "adjustable region ids");
  cont->add_option("--grid", a.grid, "points per axis");
  cont->add_option("--eps-t", a.eps_t, "trust window, s (0 = default)");
  cont->add_option("--lmax", a.lmax, "swing count cap (0 = default)");

  auto* dec = app.add_subcommand("decompose",
                                 "boundary to convex cells and big-M data");
  add_common(dec);
  dec->add_option("--rocof-lim", a.rocof_lim_hz, "limit, Hz/s")->required();
  dec->add_option("--adjustable", a.adjustable, "adjustable region ids");
  dec->add_option("--step", a.step, "arc step, seconds of inertia");
  dec->add_option("--eps-s", a.eps_s, "level tolerance (0 = default)");
  dec->add_option("--eps-t", a.eps_t, "trust window, s (0 = default)");
  dec->add_option("--lmax", a.lmax, "swing count cap (0 = default)");
  dec->add_option("--simplify", a.simplify,
                  "polyline simplification, fraction of box diagonal");

  auto* ass = app.add_subcommand("assess", "verdict for one inertia vector");
  add_common(ass);
  ass->add_option("--rocof-lim", a.rocof_lim_hz, "limit, Hz/s")->required();
  ass->add_option("--inertia", a.inertia_csv,
                  "comma-separated inertia per region, seconds")
      ->required();

  auto* dis = app.add_subcommand("dispatch", "inertia-aware unit commitment");
  add_common(dis);
  dis->add_option("--rocof-lim", a.rocof_lim_hz,
                  "limit, Hz/s (default: scenario value)");
  dis->add_option("--adjustable", a.adjustable, "adjustable region ids");
  dis->add_option("--security", a.security,
                  "none | coi | conservative | cells");
  dis->add_option("--cells-file", a.cells_file,
                  "precomputed cells.json from decompose");
  dis->add_option("--gap", a.gap, "absolute optimality gap, $");
  dis->add_option("--segments", a.segments, "cost linearization pieces");
  dis->add_option("--node-limit", a.node_limit, "branch and bound node cap");
  dis->add_option("--step", a.step, "arc step for cell building");
  dis->add_option("--eps-s", a.eps_s, "level tolerance for cell building");
  dis->add_option("--simplify", a.simplify, "simplification for cell building");

  auto* cmp = app.add_subcommand("compare",
                                 "traced vs aggregate vs conservative vs "
                                 "time-domain reference");
  add_common(cmp);
  cmp->add_option("--rocof-lim", a.rocof_lim_hz, "limit, Hz/s")->required();
  cmp->add_option("--adjustable", a.adjustable, "adjustable region ids");
  cmp->add_option("--step", a.step, "arc step, seconds of inertia");
  cmp->add_option("--eps-s", a.eps_s, "level tolerance (0 = default)");
  cmp->add_option("--columns", a.columns, "reference grid columns");
  cmp->add_option("--t-end", a.t_end, "reference horizon, seconds");
  cmp->add_option("--dt", a.dt, "reference step, seconds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (sim->parsed()) return cmd_simulate(a);
    if (modes->parsed()) return cmd_modes(a);
    if (rmax->parsed()) return cmd_rocof_max(a);
    if (trc->parsed()) return cmd_trace(a);
    if (cont->parsed()) return cmd_contour(a);
    if (dec->parsed()) return cmd_decompose(a);
    if (ass->parsed()) return cmd_assess(a);
    if (dis->parsed()) return cmd_dispatch(a);
    if (cmp->parsed()) return cmd_compare(a);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand\n";
  return 2;
}

}  // namespace risr
