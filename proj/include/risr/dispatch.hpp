#pragma once

#include <string>
#include <vector>

#include "risr/geometry.hpp"
#include "risr/simplex.hpp"
#include "risr/system.hpp"

namespace risr {

// sg: synchronous machine with fixed inertia while committed. fast_sg: same
// physics, flagged for short cycling times. vi_ibr: inverter block whose
// virtual inertia is a decision within [0, vi_max] while committed. mixed:
// regional aggregate contributing sg_inertia_per_pu * power plus a virtual
// share.
enum class GenKind { Sg, FastSg, ViIbr, Mixed };

struct Generator {
  std::string id;
  int region = 0;
  GenKind kind = GenKind::Sg;
  double p_min = 0.0, p_max = 0.0;  // per-unit
  double cost_quad = 0.0, cost_lin = 0.0, cost_const = 0.0;
  double cost_up = 0.0, cost_down = 0.0;
  double vi_cost = 0.0;            // $ per second of virtual inertia, per period-hour
  double inertia = 0.0;            // seconds while committed (sg kinds)
  double vi_max = 0.0;             // seconds (vi_ibr / mixed)
  double sg_inertia_per_pu = 0.0;  // seconds per per-unit output (mixed)
  double min_up_h = 0.0, min_down_h = 0.0;
  double ramp = kInf;              // per-unit per period
  bool initially_on = false;
  double initial_p = 0.0;
  bool must_run = false;
};

struct DemandSeries {
  std::vector<std::vector<double>> by_region;  // [period][region], per-unit
  double period_hours = 0.5;
};

// Inertia-security side constraint: nothing, the traced cells over two
// adjustable regions, or one linear row over all regional inertias
// (coeffs . H >= rhs) for the aggregate and conservative baselines.
struct SecurityModel {
  enum class Kind { None, Cells, Linear };
  Kind kind = Kind::None;
  DisjunctiveConstraint cells;
  Eigen::VectorXd linear_coeffs;
  double linear_rhs = 0.0;
};

SecurityModel coi_security(const MultiRegionSystem& sys, double rocof_lim);
SecurityModel conservative_security(const RocofInertiaField& field,
                                    const ConservativeFit& fit,
                                    double rocof_lim);

struct DispatchOptions {
  int pwl_segments = 4;       // convex cost pieces per generator
  double gap_abs = 1.0;       // $; 0 solves to proven optimality
  long node_limit = 200000;
  int max_lp_iterations = 50000;
};

// The assembled mixed-integer program plus the column bookkeeping needed to
// read a schedule back out of a solution vector.
struct DispatchProblem {
  LinearProgram lp;
  std::vector<int> binary_cols;
  int periods = 0, ngen = 0, nregion = 0;
  std::vector<std::vector<int>> col_u, col_p, col_hvi, col_zu, col_zd;
  std::vector<std::vector<int>> col_hr;    // [period][region]
  std::vector<std::vector<int>> col_cell;  // [period][cell]
  std::vector<Generator> fleet;
  DemandSeries demand;
  SecurityModel security;
};

DispatchProblem build_problem(const MultiRegionSystem& sys,
                              const std::vector<Generator>& fleet,
                              const DemandSeries& demand,
                              const SecurityModel& security,
                              const DispatchOptions& opt);

struct ScheduleRow {
  int on = 0, started = 0, stopped = 0;
  double power = 0.0;
  double vi_inertia = 0.0;
};

struct Schedule {
  std::vector<std::string> gen_ids;
  std::vector<std::vector<ScheduleRow>> rows;       // [period][gen]
  std::vector<std::vector<double>> region_inertia;  // [period][region]
  std::vector<int> active_cell;                     // [period], -1 if none
  double objective = 0.0;
  double best_bound = 0.0;
  double gap_abs = 0.0;
  std::string status;  // optimal | gap-limit | node-limit | infeasible
  std::vector<std::string> infeasible_rows;
  long nodes = 0;
};

// Deterministic single-threaded branch and bound: depth-first diving with
// most-fractional branching, lowest column index on ties, pruning against
// the incumbent minus the absolute gap.
Schedule solve_dispatch(const DispatchProblem& prob, const DispatchOptions& opt);

struct ValidationReport {
  bool ok = true;
  std::vector<std::string> violations;
  std::vector<double> period_peak_rocof;  // analytic, per-unit/s, signed
};

// Re-derives regional inertia from the schedule and checks every modelled
// constraint plus the analytic severity against the limit.
ValidationReport validate_schedule(const Schedule& sched,
                                   const DispatchProblem& prob,
                                   const MultiRegionSystem& sys, int observed,
                                   int disturbed, double rocof_lim);

// Generator fleet and demand sections of a scenario document.
struct FleetData {
  std::vector<Generator> generators;
  DemandSeries demand;
  double rocof_lim = 0.0;  // per-unit/s, converted from Hz/s in the document
  int observed = -1, disturbed = -1;
  std::vector<int> adjustable;  // regions the security cells span
};

FleetData load_fleet(const std::string& json_text, double nominal_freq_hz);

}  // namespace risr
