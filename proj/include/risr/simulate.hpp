#pragma once

#include <Eigen/Dense>
#include <ostream>
#include <vector>

#include "risr/system.hpp"

namespace risr {

// Fixed-step integration record. states holds [dw; dd] per step; rocof holds
// the per-region frequency derivative in per-unit/s (multiply by the nominal
// frequency for Hz/s).
struct Trajectory {
  std::vector<double> times;
  Eigen::MatrixXd states;  // rows = steps, cols = 2N
  Eigen::MatrixXd rocof;   // rows = steps, cols = N
  void write_csv(std::ostream& out, double nominal_freq_hz) const;
};

// Classical fourth-order Runge-Kutta on dx/dt = A x + b from x(0) = 0.
Trajectory simulate(const StateSpace& ss, double t_end, double dt);

// Largest |rocof| of one region over [0, t_end] without storing the
// trajectory. Optionally reports the time and signed value at the peak.
double simulated_peak_rocof(const StateSpace& ss, int region, double t_end,
                            double dt, double* t_at = nullptr,
                            double* signed_value = nullptr);

}  // namespace risr
