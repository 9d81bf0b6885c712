#include "risr/simplex.hpp"

#include <algorithm>
#include <cmath>

#include "risr/system.hpp"

namespace risr {

namespace {
constexpr double kFeasTol = 1e-9;
constexpr double kCostTol = 1e-9;
constexpr double kPivotTol = 1e-9;
constexpr int kBlandStreak = 100;
}  // namespace

int LinearProgram::add_var(double l, double u, double c, std::string name) {
  if (l > u) throw ScenarioError("variable '" + name + "' has empty bounds");
  lo.push_back(l);
  up.push_back(u);
  cost.push_back(c);
  var_names.push_back(std::move(name));
  return num_vars() - 1;
}

void LinearProgram::add_row(std::vector<int> idx, std::vector<double> val,
                            double l, double u, std::string name) {
  if (idx.size() != val.size())
    throw ScenarioError("row '" + name + "' index/value size mismatch");
  rows.push_back({std::move(idx), std::move(val), l, u, std::move(name)});
}

std::string to_string(LpStatus s) {
  switch (s) {
    case LpStatus::Optimal: return "optimal";
    case LpStatus::Infeasible: return "infeasible";
    case LpStatus::Unbounded: return "unbounded";
    case LpStatus::IterationLimit: return "iteration-limit";
  }
  return "unknown";
}

namespace {

enum class VarState { Basic, AtLower, AtUpper, FreeZero };

struct Tableau {
  // Columns: structural, then one slack per row, then artificials.
  Eigen::MatrixXd body;      // m x ncols, current B^{-1} [A | -I | E]
  Eigen::VectorXd basic_val; // m
  std::vector<int> basis;    // column index per row
  std::vector<VarState> state;
  std::vector<double> lo, up, value;  // per column; value = resting point
  int m = 0;
  int ncols = 0;
};

double resting_value(double lo, double up) {
  if (std::isfinite(lo)) return lo;
  if (std::isfinite(up)) return up;
  return 0.0;
}

// One simplex phase: minimize cost (length ncols) from the current basis.
LpStatus run_phase(Tableau& t, const Eigen::VectorXd& cost, int max_iter,
                   int& used_iter) {
  const int m = t.m;
  int streak = 0;
  double last_obj = std::numeric_limits<double>::infinity();

  for (; used_iter < max_iter; ++used_iter) {
    // Reduced costs: c - c_B^T body.
    Eigen::VectorXd cb(m);
    for (int i = 0; i < m; ++i) cb(i) = cost(t.basis[i]);
    const Eigen::VectorXd rc = cost - t.body.transpose() * cb;

    const double obj_now = [&] {
      double o = 0.0;
      for (int i = 0; i < m; ++i) o += cost(t.basis[i]) * t.basic_val(i);
      for (int j = 0; j < t.ncols; ++j)
        if (t.state[j] != VarState::Basic) o += cost(j) * t.value[j];
      return o;
    }();
    const bool bland = streak >= kBlandStreak;
    if (obj_now < last_obj - 1e-12 * (1.0 + std::abs(last_obj))) {
      streak = 0;
      last_obj = obj_now;
    } else {
      ++streak;
    }

    // Entering variable.
    int enter = -1;
    double sigma = 1.0;
    double best = bland ? 0.0 : kCostTol;
    for (int j = 0; j < t.ncols; ++j) {
      if (t.state[j] == VarState::Basic) continue;
      if (t.lo[j] == t.up[j]) continue;  // fixed
      const double r = rc(j);
      double score = 0.0, sig = 1.0;
      if (t.state[j] == VarState::AtLower && r < -kCostTol) {
        score = -r;
        sig = 1.0;
      } else if (t.state[j] == VarState::AtUpper && r > kCostTol) {
        score = r;
        sig = -1.0;
      } else if (t.state[j] == VarState::FreeZero &&
                 std::abs(r) > kCostTol) {
        score = std::abs(r);
        sig = r < 0.0 ? 1.0 : -1.0;
      } else {
        continue;
      }
      if (bland) {
        enter = j;
        sigma = sig;
        break;
      }
      if (score > best) {
        best = score;
        enter = j;
        sigma = sig;
      }
    }
    if (enter < 0) return LpStatus::Optimal;

    // Ratio test along x_enter moving sigma * t, t >= 0.
    const Eigen::VectorXd d = t.body.col(enter);
    double t_max = kInf;
    if (std::isfinite(t.lo[enter]) && std::isfinite(t.up[enter]))
      t_max = t.up[enter] - t.lo[enter];  // bound flip distance

    int leave = -1;
    double leave_pivot = 0.0;
    for (int i = 0; i < m; ++i) {
      const double delta = -sigma * d(i);
      if (std::abs(delta) <= kPivotTol) continue;
      const int bj = t.basis[i];
      double limit;
      if (delta > 0.0) {
        if (!std::isfinite(t.up[bj])) continue;
        limit = (t.up[bj] - t.basic_val(i)) / delta;
      } else {
        if (!std::isfinite(t.lo[bj])) continue;
        limit = (t.lo[bj] - t.basic_val(i)) / delta;
      }
      limit = std::max(limit, 0.0);
      if (limit < t_max - 1e-12 ||
          (limit < t_max + 1e-12 &&
           (leave < 0 || std::abs(d(i)) > std::abs(leave_pivot)))) {
        if (limit < t_max - 1e-12) {
          t_max = limit;
          leave = i;
          leave_pivot = d(i);
        } else if (leave >= 0) {
          leave = i;
          leave_pivot = d(i);
        }
      }
    }

    if (!std::isfinite(t_max)) return LpStatus::Unbounded;

    // Apply the step.
    t.basic_val -= sigma * t_max * d;
    const double enter_val = t.value[enter] + sigma * t_max;

    if (leave < 0) {
      // Bound flip, no basis change.
      t.value[enter] = enter_val;
      t.state[enter] =
          sigma > 0.0 ? VarState::AtUpper : VarState::AtLower;
      continue;
    }

    const int out = t.basis[leave];
    // Leaving variable settles at the bound it hit.
    const double out_delta = -sigma * leave_pivot;
    t.value[out] = out_delta > 0.0 ? t.up[out] : t.lo[out];
    t.state[out] = out_delta > 0.0 ? VarState::AtUpper : VarState::AtLower;

    // Pivot.
    const double piv = t.body(leave, enter);
    t.body.row(leave) /= piv;
    for (int i = 0; i < m; ++i) {
      if (i == leave) continue;
      const double f = t.body(i, enter);
      if (f != 0.0) t.body.row(i) -= f * t.body.row(leave);
    }
    t.basis[leave] = enter;
    t.basic_val(leave) = enter_val;
    t.state[enter] = VarState::Basic;
    t.value[enter] = enter_val;
  }
  return LpStatus::IterationLimit;
}

}  // namespace

LpSolution solve_lp(const LinearProgram& lp, int max_iterations) {
  const int n = lp.num_vars();
  const int m = static_cast<int>(lp.rows.size());

  Tableau t;
  t.m = m;
  t.ncols = n + m;
  t.body = Eigen::MatrixXd::Zero(m, t.ncols);
  t.lo.resize(t.ncols);
  t.up.resize(t.ncols);
  t.value.assign(t.ncols, 0.0);
  t.state.assign(t.ncols, VarState::AtLower);
  t.basis.resize(m);
  t.basic_val = Eigen::VectorXd::Zero(m);

  for (int j = 0; j < n; ++j) {
    t.lo[j] = lp.lo[j];
    t.up[j] = lp.up[j];
    t.value[j] = resting_value(lp.lo[j], lp.up[j]);
    t.state[j] = std::isfinite(lp.lo[j])
                     ? VarState::AtLower
                     : (std::isfinite(lp.up[j]) ? VarState::AtUpper
                                                : VarState::FreeZero);
  }
  for (int i = 0; i < m; ++i) {
    const auto& row = lp.rows[i];
    for (std::size_t k = 0; k < row.idx.size(); ++k) {
      if (row.idx[k] < 0 || row.idx[k] >= n)
        throw ScenarioError("row '" + row.name + "' references unknown column");
      t.body(i, row.idx[k]) += row.val[k];
    }
    const int sj = n + i;
    t.body(i, sj) = -1.0;
    t.lo[sj] = row.lo;
    t.up[sj] = row.up;
    t.value[sj] = 0.0;
  }

  // Start with slacks basic at the row activity of the resting point.
  std::vector<int> artificial_of_row(m, -1);
  {
    Eigen::VectorXd xr = Eigen::VectorXd::Zero(t.ncols);
    for (int j = 0; j < n; ++j) xr(j) = t.value[j];
    Eigen::VectorXd act = Eigen::VectorXd::Zero(m);
    for (int i = 0; i < m; ++i) {
      const auto& row = lp.rows[i];
      for (std::size_t k = 0; k < row.idx.size(); ++k)
        act(i) += row.val[k] * xr(row.idx[k]);
    }
    std::vector<std::pair<int, double>> artificials;  // row, +/-1
    for (int i = 0; i < m; ++i) {
      const int sj = n + i;
      if (act(i) >= t.lo[sj] - kFeasTol && act(i) <= t.up[sj] + kFeasTol) {
        t.basis[i] = sj;
        t.basic_val(i) =
            std::clamp(act(i), t.lo[sj], t.up[sj]);
        t.state[sj] = VarState::Basic;
      } else {
        // Slack rests at the violated bound; an artificial absorbs the gap.
        const double bound = act(i) < t.lo[sj] ? t.lo[sj] : t.up[sj];
        t.state[sj] = act(i) < t.lo[sj] ? VarState::AtLower : VarState::AtUpper;
        t.value[sj] = bound;
        // Row balance act - s + sign a = 0 with a = |act - bound| >= 0.
        const double gap = act(i) - bound;
        artificials.push_back({i, gap > 0.0 ? -1.0 : 1.0});
      }
    }
    if (!artificials.empty()) {
      const int extra = static_cast<int>(artificials.size());
      t.body.conservativeResize(m, t.ncols + extra);
      t.body.rightCols(extra).setZero();
      for (int k = 0; k < extra; ++k) {
        const auto [ri, sign] = artificials[k];
        const int aj = t.ncols + k;
        t.body(ri, aj) = sign;
        t.lo.push_back(0.0);
        t.up.push_back(kInf);
        t.value.push_back(0.0);
        t.state.push_back(VarState::Basic);
        t.basis[ri] = aj;
        artificial_of_row[ri] = aj;
        // a = |act - bound| with the chosen sign keeps the row balanced.
        const auto& row = lp.rows[ri];
        double a = 0.0;
        for (std::size_t q = 0; q < row.idx.size(); ++q)
          a += row.val[q] * t.value[row.idx[q]];
        a -= t.value[static_cast<std::size_t>(n) + ri];
        t.basic_val(ri) = std::abs(a);
      }
      t.ncols += extra;
    }
    // Normalize so basic columns are +1 unit columns (slack basis carries -1).
    for (int i = 0; i < m; ++i) {
      const double piv = t.body(i, t.basis[i]);
      if (piv != 1.0) t.body.row(i) /= piv;
    }
  }

  LpSolution sol;
  int used_iter = 0;

  const bool need_phase1 =
      std::any_of(artificial_of_row.begin(), artificial_of_row.end(),
                  [](int a) { return a >= 0; });
  if (need_phase1) {
    Eigen::VectorXd c1 = Eigen::VectorXd::Zero(t.ncols);
    for (int i = 0; i < m; ++i)
      if (artificial_of_row[i] >= 0) c1(artificial_of_row[i]) = 1.0;
    const LpStatus st = run_phase(t, c1, max_iterations, used_iter);
    if (st == LpStatus::IterationLimit) {
      sol.status = st;
      sol.iterations = used_iter;
      return sol;
    }
    double infeas = 0.0;
    for (int i = 0; i < m; ++i)
      if (t.state[t.basis[i]] == VarState::Basic &&
          t.basis[i] >= n + m)
        infeas += t.basic_val(i);
    if (infeas > 1e-7) {
      sol.status = LpStatus::Infeasible;
      for (int i = 0; i < m; ++i)
        if (t.basis[i] >= n + m && t.basic_val(i) > 1e-7)
          sol.infeasible_rows.push_back(i);
      sol.iterations = used_iter;
      return sol;
    }
    // Freeze artificials out of the problem.
    for (int j = n + m; j < t.ncols; ++j) {
      t.lo[j] = 0.0;
      t.up[j] = 0.0;
      if (t.state[j] != VarState::Basic) {
        t.state[j] = VarState::AtLower;
        t.value[j] = 0.0;
      }
    }
  }

  Eigen::VectorXd c2 = Eigen::VectorXd::Zero(t.ncols);
  for (int j = 0; j < n; ++j) c2(j) = lp.cost[j];
  const LpStatus st = run_phase(t, c2, max_iterations, used_iter);
  sol.iterations = used_iter;
  if (st != LpStatus::Optimal) {
    sol.status = st;
    return sol;
  }

  sol.status = LpStatus::Optimal;
  sol.x = Eigen::VectorXd::Zero(n);
  for (int j = 0; j < n; ++j)
    if (t.state[j] != VarState::Basic) sol.x(j) = t.value[j];
  for (int i = 0; i < m; ++i)
    if (t.basis[i] < n) sol.x(t.basis[i]) = t.basic_val(i);
  sol.objective = 0.0;
  for (int j = 0; j < n; ++j) sol.objective += lp.cost[j] * sol.x(j);
  return sol;
}

}  // namespace risr
