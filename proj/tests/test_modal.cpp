#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "helpers.hpp"
#include "risr/modal.hpp"
#include "risr/simulate.hpp"

using namespace risr;
using risr::testing::random_system;

TEST_CASE("closed form matches Runge-Kutta everywhere") {
  std::mt19937_64 rng(2024);
  for (int rep = 0; rep < 12; ++rep) {
    const MultiRegionSystem sys = random_system(rng);
    const int n = sys.size();
    const StateSpace ss = build_state_space(sys);
    const Trajectory tr = simulate(ss, 10.0, 1e-3);
    const int disturbed = testing::disturbed_region(sys);

    for (int observed = 0; observed < n; ++observed) {
      const ModalDecomposition md = decompose(sys, observed, disturbed);
      double worst = 0.0;
      for (std::size_t i = 0; i < tr.times.size(); i += 7) {
        const double diff = std::abs(evaluate_rocof(md, tr.times[i]) -
                                     tr.rocof(static_cast<int>(i), observed));
        worst = std::max(worst, diff);
      }
      CAPTURE(rep);
      CAPTURE(observed);
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("initial instant identities") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 10; ++rep) {
    const MultiRegionSystem sys = random_system(rng);
    const int disturbed = testing::disturbed_region(sys);
    const Region& d = sys.region(disturbed);
    for (int observed = 0; observed < sys.size(); ++observed) {
      const ModalDecomposition md = decompose(sys, observed, disturbed);
      const double expect =
          observed == disturbed ? -d.disturbance / (2.0 * d.inertia) : 0.0;
      CHECK(std::abs(evaluate_rocof(md, 0.0) - expect) < 1e-9);
      // Unscaled: the residues sum to minus the Kronecker delta.
      CHECK(std::abs(md.sum_at(0.0) -
                     (observed == disturbed ? -1.0 : 0.0)) < 1e-9);
    }
  }
}

TEST_CASE("undamped centre of inertia is conserved") {
  std::mt19937_64 rng(31);
  for (int rep = 0; rep < 6; ++rep) {
    const MultiRegionSystem sys = random_system(rng, 2, 5, true);
    const int n = sys.size();
    const int disturbed = testing::disturbed_region(sys);
    const Eigen::VectorXd h = sys.inertia_vector();
    const double expect = -sys.total_disturbance();

    std::vector<ModalDecomposition> mds;
    for (int observed = 0; observed < n; ++observed)
      mds.push_back(decompose(sys, observed, disturbed));
    for (double t = 0.0; t <= 8.0; t += 0.37) {
      double agg = 0.0;
      for (int i = 0; i < n; ++i)
        agg += 2.0 * h(i) * evaluate_rocof(mds[i], t);
      CHECK(std::abs(agg - expect) < 1e-8);
    }

    const StateSpace ss = build_state_space(sys);
    const Trajectory tr = simulate(ss, 8.0, 1e-3);
    for (std::size_t s = 0; s < tr.times.size(); s += 501) {
      double agg = 0.0;
      for (int i = 0; i < n; ++i)
        agg += 2.0 * h(i) * tr.rocof(static_cast<int>(s), i);
      CHECK(std::abs(agg - expect) < 1e-8);
    }
  }
}

TEST_CASE("eigendecomposition invariants") {
  std::mt19937_64 rng(55);
  for (int rep = 0; rep < 8; ++rep) {
    const MultiRegionSystem sys = random_system(rng);
    const StateSpace ss = build_state_space(sys);
    const ModalBasis basis = eigendecompose(ss);
    const int m = 2 * sys.size();
    REQUIRE(basis.eigenvalues.size() == m);

    // Deterministic order: ascending real part, then ascending |imag|.
    for (int i = 1; i < m; ++i) {
      const auto a = basis.eigenvalues(i - 1), b = basis.eigenvalues(i);
      const bool ordered =
          a.real() < b.real() + 1e-9 ||
          (std::abs(a.real() - b.real()) <= 1e-9 &&
           std::abs(a.imag()) <= std::abs(b.imag()) + 1e-9);
      CHECK(ordered);
    }

    if (!basis.coi_jordan) {
      // V Lambda V^{-1} reproduces A and the left rows are the dual basis.
      const Eigen::MatrixXcd recon = basis.right_vectors *
                                     basis.eigenvalues.asDiagonal() *
                                     basis.left_vectors;
      CHECK((recon - ss.a.cast<std::complex<double>>()).norm() <
            1e-7 * std::max(1.0, ss.a.norm()));
    }
    const Eigen::MatrixXcd prod = basis.left_vectors * basis.right_vectors;
    CHECK((prod - Eigen::MatrixXcd::Identity(m, m)).norm() < 1e-7);
  }
}

TEST_CASE("undamped systems take the defective-mode path") {
  std::mt19937_64 rng(70);
  const MultiRegionSystem sys = random_system(rng, 3, 3, true);
  const ModalBasis basis = eigendecompose(build_state_space(sys));
  CHECK(basis.coi_jordan);

  const MultiRegionSystem damped = random_system(rng, 3, 3, false, false);
  CHECK_FALSE(eigendecompose(build_state_space(damped)).coi_jordan);
}

TEST_CASE("real collapse produces N-1 oscillatory components") {
  std::mt19937_64 rng(81);
  for (int rep = 0; rep < 6; ++rep) {
    const MultiRegionSystem sys = random_system(rng, 2, 5);
    const int disturbed = testing::disturbed_region(sys);
    const ModalDecomposition md = decompose(sys, 0, disturbed);
    CHECK(static_cast<int>(md.trig.size()) == sys.size() - 1);
    CHECK(md.scale == doctest::Approx(sys.region(disturbed).disturbance /
                                      (2.0 * sys.region(disturbed).inertia)));
    for (const auto& tc : md.trig) {
      CHECK(tc.amplitude >= 0.0);
      CHECK(tc.ang_freq > 0.0);
      CHECK(tc.decay <= 1e-12);
      CHECK(tc.phase > -3.14159265358979323846 - 1e-12);
      CHECK(tc.phase <= 3.14159265358979323846 + 1e-12);
    }
  }
}

TEST_CASE("single region has no oscillatory component") {
  std::vector<Region> r(1);
  r[0] = {0, 45.0, 0.0, 0.0, 9.0, 1.5};
  const MultiRegionSystem sys(std::move(r), {}, 60.0, 1000.0);
  const ModalDecomposition md = decompose(sys, 0, 0);
  CHECK(md.trig.empty());
  // First-order response: rocof(0) = -dP/(2H), decaying at D/(2H).
  CHECK(evaluate_rocof(md, 0.0) ==
        doctest::Approx(-1.5 / (2.0 * 45.0)).epsilon(1e-9));
  const double tau = 9.0 / (2.0 * 45.0);
  CHECK(evaluate_rocof(md, 1.0) ==
        doctest::Approx(-1.5 / (2.0 * 45.0) * std::exp(-tau)).epsilon(1e-7));
}

TEST_CASE("decompose rejects an undisturbed source region") {
  const MultiRegionSystem sys = testing::two_region();
  CHECK_THROWS_AS(decompose(sys, 0, 0), ScenarioError);  // region 0 quiet
  CHECK_NOTHROW(decompose(sys, 0, 1));
}

TEST_CASE("waveform derivatives are consistent") {
  const MultiRegionSystem sys = testing::two_region();
  const ModalDecomposition md = decompose(sys, 0, 1);
  const double dt = 1e-6;
  for (double t : {0.3, 1.1, 2.9}) {
    const double num1 = (md.sum_at(t + dt) - md.sum_at(t - dt)) / (2.0 * dt);
    CHECK(md.deriv_at(t) == doctest::Approx(num1).epsilon(1e-5));
    const double num2 =
        (md.sum_at(t + dt) - 2.0 * md.sum_at(t) + md.sum_at(t - dt)) /
        (dt * dt);
    CHECK(md.second_deriv_at(t) == doctest::Approx(num2).epsilon(1e-3));
  }
}
