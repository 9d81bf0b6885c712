#include "risr/simulate.hpp"

#include <cmath>
#include <iomanip>

namespace risr {

namespace {

Eigen::VectorXd rocof_of(const StateSpace& ss, const Eigen::VectorXd& x) {
  const int n = ss.n_regions;
  return ss.a.topRows(n) * x + ss.b.head(n);
}

Eigen::VectorXd rk4_step(const StateSpace& ss, const Eigen::VectorXd& x,
                         double dt) {
  const Eigen::VectorXd k1 = ss.a * x + ss.b;
  const Eigen::VectorXd k2 = ss.a * (x + 0.5 * dt * k1) + ss.b;
  const Eigen::VectorXd k3 = ss.a * (x + 0.5 * dt * k2) + ss.b;
  const Eigen::VectorXd k4 = ss.a * (x + dt * k3) + ss.b;
  return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

Trajectory simulate(const StateSpace& ss, double t_end, double dt) {
  if (!(dt > 0.0)) throw ScenarioError("simulate: dt must be positive");
  if (t_end < 0.0) throw ScenarioError("simulate: t_end must be non-negative");
  const int steps = static_cast<int>(std::llround(t_end / dt));
  const int n = ss.n_regions;

  Trajectory tr;
  tr.times.resize(steps + 1);
  tr.states.resize(steps + 1, 2 * n);
  tr.rocof.resize(steps + 1, n);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  for (int i = 0; i <= steps; ++i) {
    tr.times[i] = i * dt;
    tr.states.row(i) = x.transpose();
    tr.rocof.row(i) = rocof_of(ss, x).transpose();
    if (i < steps) x = rk4_step(ss, x, dt);
  }
  return tr;
}

double simulated_peak_rocof(const StateSpace& ss, int region, double t_end,
                            double dt, double* t_at, double* signed_value) {
  if (region < 0 || region >= ss.n_regions)
    throw ScenarioError("simulate: region index out of range");
  if (!(dt > 0.0)) throw ScenarioError("simulate: dt must be positive");
  const int steps = static_cast<int>(std::llround(t_end / dt));
  const int n = ss.n_regions;
  const Eigen::RowVectorXd a_row = ss.a.row(region);
  const double b_row = ss.b(region);

  Eigen::VectorXd x = Eigen::VectorXd::Zero(2 * n);
  double best = 0.0, best_t = 0.0, best_signed = 0.0;
  for (int i = 0; i <= steps; ++i) {
    const double r = a_row.dot(x) + b_row;
    if (std::abs(r) > best) {
      best = std::abs(r);
      best_t = i * dt;
      best_signed = r;
    }
    if (i < steps) x = rk4_step(ss, x, dt);
  }
  if (t_at) *t_at = best_t;
  if (signed_value) *signed_value = best_signed;
  return best;
}

void Trajectory::write_csv(std::ostream& out, double nominal_freq_hz) const {
  const int n = static_cast<int>(rocof.cols());
  out << "t_s";
  for (int j = 0; j < n; ++j) out << ",freq_dev_hz_" << j;
  for (int j = 0; j < n; ++j) out << ",angle_rad_" << j;
  for (int j = 0; j < n; ++j) out << ",rocof_hz_per_s_" << j;
  out << "\n";
  out << std::setprecision(10);
  for (size_t i = 0; i < times.size(); ++i) {
    out << times[i];
    for (int j = 0; j < n; ++j)
      out << "," << states(i, j) * nominal_freq_hz;
    for (int j = 0; j < n; ++j) out << "," << states(i, n + j);
    for (int j = 0; j < n; ++j)
      out << "," << rocof(i, j) * nominal_freq_hz;
    out << "\n";
  }
}

}  // namespace risr
