#pragma once

#include <Eigen/Dense>
#include <complex>
#include <vector>

#include "risr/system.hpp"

namespace risr {

// Eigenstructure of the swing state matrix in a deterministic order:
// ascending real part, then ascending |imag|, positive-imag member of each
// conjugate pair first. left_vectors rows are the dual basis (V^{-1}).
// When total damping is zero the zero eigenvalue is defective (Jordan block
// spanning the uniform-angle shift and the centre-of-inertia drift); that
// case is solved through the symmetric generalized problem on the stiffness
// Laplacian and flagged coi_jordan, with a synthesized basis whose pair
// columns are exact eigenvectors and whose first two columns span the block.
struct ModalBasis {
  Eigen::VectorXcd eigenvalues;   // 2N
  Eigen::MatrixXcd right_vectors; // columns
  Eigen::MatrixXcd left_vectors;  // rows
  int n_regions = 0;
  bool coi_jordan = false;
  double condition = 0.0;  // condition number of right_vectors
};

// One damped oscillation amplitude * e^{decay t} * cos(ang_freq t + phase)
// of the observed region's unscaled frequency-derivative response.
struct TrigComponent {
  double amplitude = 0.0;  // >= 0
  double decay = 0.0;      // <= 0 for stable systems, 1/s
  double ang_freq = 0.0;   // > 0, rad/s
  double phase = 0.0;      // (-pi, pi]
};

// Closed-form frequency-derivative response of one observed region to a step
// disturbance in one region:
//   rocof(t) = scale * (exp_amplitude e^{exp_decay t}
//              + sum_m amplitude_m e^{decay_m t} cos(ang_freq_m t + phase_m))
// with scale = dP_disturbed / (2 H_disturbed) in per-unit/s. The unscaled sum
// equals -1 at t = 0 when observed == disturbed and 0 otherwise.
struct ModalDecomposition {
  int observed = 0;
  int disturbed = 0;
  double scale = 0.0;          // dP/(2H) of the disturbed region, pu/s
  double exp_amplitude = 0.0;  // aperiodic term coefficient (unscaled)
  double exp_decay = 0.0;      // 1/s, 0 when undamped (constant COI term)
  std::vector<TrigComponent> trig;

  double sum_at(double t) const;          // unscaled waveform
  double deriv_at(double t) const;        // d/dt of the unscaled waveform
  double second_deriv_at(double t) const; // d2/dt2 of the unscaled waveform
};

ModalBasis eigendecompose(const StateSpace& ss);

// Collapse the complex expansion of [e^{At} b]_observed into the real form
// above. Throws ScenarioError when the disturbed region has no disturbance.
ModalDecomposition real_modes(const ModalBasis& basis,
                              const MultiRegionSystem& sys, int observed,
                              int disturbed);

// Convenience: state space + eigendecomposition + real collapse.
ModalDecomposition decompose(const MultiRegionSystem& sys, int observed,
                             int disturbed);

double evaluate_rocof(const ModalDecomposition& md, double t);

}  // namespace risr
