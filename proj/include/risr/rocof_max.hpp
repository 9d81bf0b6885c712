#pragma once

#include <string>
#include <vector>

#include "risr/modal.hpp"

namespace risr {

// Candidate extremum of one oscillatory component: swing-th trough of the
// component's own cosine, at t_hat = ((2 swing - 1) pi - phase) / ang_freq.
// Components and swings are numbered from 1.
struct ExtremumAnchor {
  int component = 0;
  int swing = 0;
  double t_hat = 0.0;
};

// Second-order refinement of the full waveform around one anchor. value is
// the signed rate of change of frequency in per-unit/s at the refined time.
struct LocalMax {
  ExtremumAnchor anchor;
  double t_star = 0.0;
  double value = 0.0;
  bool accepted = false;
  std::string reject_reason;  // empty when accepted
};

// Most severe (most negative) rate of change of frequency over t >= 0.
// component/swing/msn are 0 when the initial instant wins (observed region
// disturbed, or a single-region system).
struct GlobalMax {
  double value = 0.0;   // signed, per-unit/s
  double t_star = 0.0;
  int component = 0;
  int swing = 0;
  int msn = 0;          // most severe swing number = swing of the winner
  std::vector<LocalMax> candidates;  // every refined anchor, accepted or not
};

// 0 selects the per-component default: l_max stops once the envelope decays
// below 1 % (capped at 20), eps_t is 0.15 of the component period.
struct RocofMaxOptions {
  int l_max = 0;
  double eps_t = 0.0;
};

int default_l_max(const TrigComponent& tc);
double default_eps_t(const TrigComponent& tc);

// Troughs of component (1-based) up to l_max swings.
std::vector<ExtremumAnchor> extrema_times(const ModalDecomposition& md,
                                          int component, int l_max);

// Refine one anchor against the full waveform. The correction must stay
// within eps_t and the curvature must be positive (a trough of the signed
// waveform); otherwise the anchor is rejected with a reason.
LocalMax taylor_local_max(const ModalDecomposition& md,
                          const ExtremumAnchor& anchor, double eps_t);

GlobalMax global_max(const ModalDecomposition& md,
                     const RocofMaxOptions& opt = {});

}  // namespace risr
