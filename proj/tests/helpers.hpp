#pragma once

#include <random>
#include <vector>

#include "risr/modal.hpp"
#include "risr/system.hpp"

namespace risr::testing {

// Connected random interconnection: chain ties plus optional extras, one
// disturbed region. Undamped instances keep every D_n at zero so the
// defective centre-of-inertia mode is exercised.
inline MultiRegionSystem random_system(std::mt19937_64& rng, int n_min = 2,
                                       int n_max = 5,
                                       bool force_undamped = false,
                                       bool allow_undamped = true) {
  const int n = std::uniform_int_distribution<int>(n_min, n_max)(rng);
  std::uniform_real_distribution<double> h_u(8.0, 120.0), d_u(2.0, 25.0),
      t_u(0.3, 2.5), p_u(0.5, 4.0);
  const bool undamped =
      force_undamped ||
      (allow_undamped && std::bernoulli_distribution(0.25)(rng));

  std::vector<Region> regions(n);
  for (int i = 0; i < n; ++i) {
    regions[i].id = i;
    regions[i].inertia = h_u(rng);
    regions[i].damping = undamped ? 0.0 : d_u(rng);
  }
  const int disturbed = std::uniform_int_distribution<int>(0, n - 1)(rng);
  const double mag = p_u(rng);
  regions[disturbed].disturbance =
      std::bernoulli_distribution(0.85)(rng) ? mag : -mag;

  std::vector<TieLine> ties;
  for (int i = 1; i < n; ++i) ties.push_back({i - 1, i, t_u(rng)});
  if (n >= 3 && std::bernoulli_distribution(0.5)(rng))
    ties.push_back({0, n - 1, t_u(rng)});

  return MultiRegionSystem(std::move(regions), std::move(ties), 60.0, 1000.0);
}

inline int disturbed_region(const MultiRegionSystem& sys) {
  for (int i = 0; i < sys.size(); ++i)
    if (sys.region(i).disturbance != 0.0) return i;
  return -1;
}

// Two coupled regions with light damping; small enough to reason about by
// hand, oscillatory enough to have a genuine inter-area swing.
inline MultiRegionSystem two_region() {
  std::vector<Region> regions(2);
  regions[0] = {0, 30.0, 10.0, 60.0, 8.0, 0.0};
  regions[1] = {1, 50.0, 20.0, 90.0, 12.0, 1.8};
  std::vector<TieLine> ties = {{0, 1, 1.1}};
  return MultiRegionSystem(std::move(regions), std::move(ties), 60.0, 1000.0);
}

// Signed dense-grid minimum of the scaled waveform (the most severe rate of
// change of frequency) used as an oracle against the analytic search.
inline double grid_most_severe(const ModalDecomposition& md, double t_end,
                               double dt, double* t_at = nullptr) {
  double best = 0.0, t_best = 0.0;
  double worst_abs = -1.0;
  for (double t = 0.0; t <= t_end; t += dt) {
    const double v = md.scale * md.sum_at(t);
    if (std::abs(v) > worst_abs) {
      worst_abs = std::abs(v);
      best = v;
      t_best = t;
    }
  }
  if (t_at) *t_at = t_best;
  return best;
}

}  // namespace risr::testing
