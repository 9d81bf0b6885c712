#include "risr/field.hpp"

#include <cmath>

namespace risr {

RocofInertiaField::RocofInertiaField(MultiRegionSystem base,
                                     std::vector<int> adjustable, int observed,
                                     int disturbed, RocofMaxOptions opt)
    : base_(std::move(base)),
      adjustable_(std::move(adjustable)),
      observed_(observed),
      disturbed_(disturbed),
      opt_(opt) {
  if (adjustable_.empty())
    throw ScenarioError("adjustable region list must be non-empty");
  for (int id : adjustable_)
    if (id < 0 || id >= base_.size())
      throw ScenarioError("adjustable region id out of range");
}

int RocofInertiaField::dimension() const {
  return static_cast<int>(adjustable_.size());
}

MultiRegionSystem RocofInertiaField::system_at(const Eigen::VectorXd& h) const {
  if (h.size() != dimension())
    throw ScenarioError("field point dimension mismatch");
  Eigen::VectorXd full = base_.inertia_vector();
  for (int i = 0; i < dimension(); ++i) full(adjustable_[i]) = h(i);
  return base_.with_inertia(full);
}

ModalDecomposition RocofInertiaField::decompose_at(
    const Eigen::VectorXd& h) const {
  return decompose(system_at(h), observed_, disturbed_);
}

namespace {

// Newton-polish a refined trough time to the exact local minimum of the
// pre-scale waveform, constrained to the anchor's trust window. Returns
// nothing when the iteration leaves the window or the curvature flips, which
// mirrors the anchor-existence filter.
std::optional<double> polish_trough(const ModalDecomposition& md, double t_hat,
                                    double t_start, double eps_t) {
  double t = t_start;
  for (int it = 0; it < 30; ++it) {
    const double g = md.deriv_at(t);
    const double h = md.second_deriv_at(t);
    if (h <= 0.0) return std::nullopt;
    const double next = t - g / h;
    if (next < 0.0 || std::abs(next - t_hat) > eps_t) return std::nullopt;
    if (std::abs(next - t) < 1e-13 * (1.0 + std::abs(t))) return next;
    t = next;
  }
  return t;
}

}  // namespace

std::optional<double> RocofInertiaField::anchored_level(
    const Eigen::VectorXd& h, const AnchorId& anchor) const {
  const ModalDecomposition md = decompose_at(h);
  if (anchor.component == 0) return std::abs(evaluate_rocof(md, 0.0));
  if (anchor.component > static_cast<int>(md.trig.size())) return std::nullopt;
  const TrigComponent& tc = md.trig[anchor.component - 1];
  const double eps_t = opt_.eps_t > 0.0 ? opt_.eps_t : default_eps_t(tc);
  for (const auto& a : extrema_times(md, anchor.component,
                                     std::max(anchor.swing, 1))) {
    if (a.swing != anchor.swing) continue;
    const LocalMax lm = taylor_local_max(md, a, eps_t);
    if (!lm.accepted) return std::nullopt;
    // The quadratic refinement brings the time into the trough's basin; the
    // returned level is the exact waveform value there so that traced level
    // sets agree with time-domain verification.
    const auto t_star = polish_trough(md, a.t_hat, lm.t_star, eps_t);
    if (!t_star) return std::nullopt;
    return std::abs(md.sum_at(*t_star) * md.scale);
  }
  return std::nullopt;
}

double RocofInertiaField::global_level(const Eigen::VectorXd& h) const {
  return std::abs(global_max(decompose_at(h), opt_).value);
}

GlobalMax RocofInertiaField::global_detail(const Eigen::VectorXd& h) const {
  return global_max(decompose_at(h), opt_);
}

}  // namespace risr
