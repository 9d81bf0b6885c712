#pragma once

#include <Eigen/Dense>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace risr {

// Raised for malformed or physically inconsistent scenario input.
class ScenarioError : public std::runtime_error {
 public:
  explicit ScenarioError(const std::string& msg) : std::runtime_error(msg) {}
};

// Raised when a numerical routine cannot produce a trustworthy result.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

// One aggregated area of the interconnection. Inertia and damping are the
// regional aggregates of the machines it contains; disturbance is the net
// power deficit applied at t = 0 (positive = load increase / generation loss).
struct Region {
  int id = 0;
  double inertia = 0.0;      // H_n, seconds on system base
  double inertia_lo = 0.0;   // adjustable range lower bound, seconds
  double inertia_up = 0.0;   // adjustable range upper bound, seconds
  double damping = 0.0;      // D_n, per-unit power per per-unit frequency
  double disturbance = 0.0;  // step power deficit, per-unit on system base
};

// Equivalent inter-area link. sync_coeff is the linearized synchronizing
// power coefficient T_ij in per-unit power per radian of angle difference.
struct TieLine {
  int from = 0;
  int to = 0;
  double sync_coeff = 0.0;
};

// Validated multi-region model. Region ids are dense 0..N-1 and the tie-line
// graph is connected, so every stored instance is ready for analysis.
class MultiRegionSystem {
 public:
  MultiRegionSystem(std::vector<Region> regions, std::vector<TieLine> ties,
                    double nominal_freq_hz, double base_mva,
                    bool allow_nonstandard_freq = false);

  int size() const { return static_cast<int>(regions_.size()); }
  const std::vector<Region>& regions() const { return regions_; }
  const Region& region(int id) const { return regions_.at(id); }
  const std::vector<TieLine>& tie_lines() const { return ties_; }
  double nominal_freq_hz() const { return nominal_freq_hz_; }
  double base_mva() const { return base_mva_; }
  double omega0() const;  // 2 pi f0, rad/s

  Eigen::VectorXd inertia_vector() const;
  Eigen::VectorXd damping_vector() const;
  Eigen::VectorXd disturbance_vector() const;
  double total_inertia() const;
  double total_disturbance() const;

  // Copy with region inertias replaced (boundary search varies H).
  MultiRegionSystem with_inertia(const Eigen::VectorXd& h) const;

 private:
  std::vector<Region> regions_;
  std::vector<TieLine> ties_;
  double nominal_freq_hz_ = 0.0;
  double base_mva_ = 0.0;
};

// Linear swing model d/dt [dw; dd] = A [dw; dd] + b, with dw the per-unit
// regional frequency deviations and dd the angle deviations in radians.
// Inertia and damping vectors are carried so modal analysis can exploit the
// symmetric structure of the undamped problem.
struct StateSpace {
  Eigen::MatrixXd a;        // 2N x 2N
  Eigen::VectorXd b;        // 2N
  Eigen::VectorXd inertia;  // H_n, seconds
  Eigen::VectorXd damping;  // D_n
  double omega0 = 0.0;
  int n_regions = 0;
};

// Parse a scenario document (JSON text). Throws ScenarioError with the
// offending field on any violation.
MultiRegionSystem load_scenario(const std::string& json_text);
MultiRegionSystem load_scenario_file(const std::filesystem::path& path);

// Angle-coupling block K: row i, col j (i != j) = T_ij / (2 H_i), diagonal
// the negated row sum. Annihilates uniform angle shifts; inertia-weighted
// column sums vanish.
Eigen::MatrixXd synchronizing_matrix(const MultiRegionSystem& sys);

// Graph Laplacian of tie stiffnesses (symmetric positive semidefinite).
Eigen::MatrixXd stiffness_laplacian(const MultiRegionSystem& sys);

StateSpace build_state_space(const MultiRegionSystem& sys);

// Aggregate inertia below which the instantaneous centre-of-inertia rate of
// change of frequency exceeds the limit: sum H = dP / (2 lim).
double coi_critical_inertia(double total_disturbance, double rocof_lim);

}  // namespace risr
