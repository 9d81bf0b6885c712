#pragma once

#include <Eigen/Dense>
#include <memory>
#include <optional>
#include <vector>

#include "risr/rocof_max.hpp"
#include "risr/system.hpp"

namespace risr {

// Identifies one oscillatory trough family: (component, swing), 1-based.
// component 0 stands for the initial-instant candidate.
struct AnchorId {
  int component = 0;
  int swing = 0;
  bool operator==(const AnchorId&) const = default;
};

// Scalar severity levels over a low-dimensional inertia search space.
// Points are vectors of the adjustable coordinates only. anchored_level
// returns the |value| of one trough family if the Taylor refinement accepts
// it at that point, nullopt if the family has vanished there; global_level
// is the overall severity |global max|.
class InertiaField {
 public:
  virtual ~InertiaField() = default;
  virtual int dimension() const = 0;
  virtual std::optional<double> anchored_level(const Eigen::VectorXd& h,
                                               const AnchorId& anchor) const = 0;
  virtual double global_level(const Eigen::VectorXd& h) const = 0;
  virtual GlobalMax global_detail(const Eigen::VectorXd& h) const = 0;
};

// Severity of the observed region's frequency derivative as the adjustable
// region inertias move, everything else held at the base system's values.
class RocofInertiaField : public InertiaField {
 public:
  RocofInertiaField(MultiRegionSystem base, std::vector<int> adjustable,
                    int observed, int disturbed, RocofMaxOptions opt = {});

  int dimension() const override;
  std::optional<double> anchored_level(const Eigen::VectorXd& h,
                                       const AnchorId& anchor) const override;
  double global_level(const Eigen::VectorXd& h) const override;
  GlobalMax global_detail(const Eigen::VectorXd& h) const override;

  ModalDecomposition decompose_at(const Eigen::VectorXd& h) const;
  const std::vector<int>& adjustable() const { return adjustable_; }
  const MultiRegionSystem& base() const { return base_; }
  int observed() const { return observed_; }
  int disturbed() const { return disturbed_; }
  MultiRegionSystem system_at(const Eigen::VectorXd& h) const;

 private:
  MultiRegionSystem base_;
  std::vector<int> adjustable_;
  int observed_;
  int disturbed_;
  RocofMaxOptions opt_;
};

// Analytic sphere |h - center| = level; exercises the tracing kernel against
// a surface whose geometry is known exactly.
class SphereField : public InertiaField {
 public:
  SphereField(Eigen::VectorXd center) : center_(std::move(center)) {}
  int dimension() const override { return static_cast<int>(center_.size()); }
  std::optional<double> anchored_level(const Eigen::VectorXd& h,
                                       const AnchorId&) const override {
    return (h - center_).norm();
  }
  double global_level(const Eigen::VectorXd& h) const override {
    return (h - center_).norm();
  }
  GlobalMax global_detail(const Eigen::VectorXd& h) const override {
    GlobalMax gm;
    gm.value = -(h - center_).norm();
    gm.component = 1;
    gm.swing = 1;
    gm.msn = 1;
    return gm;
  }

 private:
  Eigen::VectorXd center_;
};

}  // namespace risr
