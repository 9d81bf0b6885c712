#include <Eigen/Dense>

#include "doctest.h"
#include "helpers.hpp"
#include "risr/system.hpp"

using namespace risr;

namespace {

std::vector<Region> three_regions() {
  std::vector<Region> r(3);
  r[0] = {0, 40.0, 10.0, 70.0, 10.0, 0.0};
  r[1] = {1, 70.0, 40.0, 100.0, 14.0, 2.4};
  r[2] = {2, 90.0, 0.0, 0.0, 16.0, 0.0};
  return r;
}

std::vector<TieLine> three_ties() {
  return {{0, 1, 1.2}, {1, 2, 1.0}, {0, 2, 0.6}};
}

}  // namespace

TEST_CASE("scenario JSON round trip") {
  const char* text = R"({
    "nominal_freq_hz": 60.0, "base_mva": 1000.0,
    "regions": [
      {"id": 0, "inertia_s": 40.0, "damping_pu": 10.0},
      {"id": 1, "inertia_s": 70.0, "damping_pu": 14.0, "disturbance_pu": 2.4}
    ],
    "tie_lines": [{"from": 0, "to": 1, "sync_coeff_pu_per_rad": 1.2}]
  })";
  const MultiRegionSystem sys = load_scenario(text);
  CHECK(sys.size() == 2);
  CHECK(sys.nominal_freq_hz() == 60.0);
  CHECK(sys.base_mva() == 1000.0);
  CHECK(sys.region(1).disturbance == doctest::Approx(2.4));
  CHECK(sys.total_inertia() == doctest::Approx(110.0));
  CHECK(sys.total_disturbance() == doctest::Approx(2.4));
  CHECK(sys.omega0() == doctest::Approx(2.0 * 3.14159265358979323846 * 60.0));
}

TEST_CASE("scenario validation rejects bad input") {
  auto sys_with = [](std::vector<Region> r, std::vector<TieLine> t,
                     double f = 60.0, bool allow = false) {
    return MultiRegionSystem(std::move(r), std::move(t), f, 1000.0, allow);
  };

  SUBCASE("non-dense region ids") {
    auto r = three_regions();
    r[2].id = 7;
    CHECK_THROWS_AS(sys_with(r, three_ties()), ScenarioError);
  }
  SUBCASE("non-positive inertia") {
    auto r = three_regions();
    r[0].inertia = 0.0;
    CHECK_THROWS_AS(sys_with(r, three_ties()), ScenarioError);
  }
  SUBCASE("negative damping") {
    auto r = three_regions();
    r[1].damping = -1.0;
    CHECK_THROWS_AS(sys_with(r, three_ties()), ScenarioError);
  }
  SUBCASE("non-positive tie stiffness") {
    auto t = three_ties();
    t[0].sync_coeff = 0.0;
    CHECK_THROWS_AS(sys_with(three_regions(), t), ScenarioError);
  }
  SUBCASE("tie endpoint out of range") {
    auto t = three_ties();
    t[0].to = 9;
    CHECK_THROWS_AS(sys_with(three_regions(), t), ScenarioError);
  }
  SUBCASE("self tie") {
    auto t = three_ties();
    t[0].to = t[0].from;
    CHECK_THROWS_AS(sys_with(three_regions(), t), ScenarioError);
  }
  SUBCASE("disconnected graph") {
    std::vector<Region> r(4);
    for (int i = 0; i < 4; ++i) r[i] = {i, 30.0, 0.0, 0.0, 5.0, 0.0};
    r[0].disturbance = 1.0;
    std::vector<TieLine> t = {{0, 1, 1.0}, {2, 3, 1.0}};
    CHECK_THROWS_AS(sys_with(r, t), ScenarioError);
  }
  SUBCASE("off-nominal frequency needs the explicit flag") {
    CHECK_THROWS_AS(sys_with(three_regions(), three_ties(), 42.0),
                    ScenarioError);
    CHECK_NOTHROW(sys_with(three_regions(), three_ties(), 42.0, true));
    CHECK_NOTHROW(sys_with(three_regions(), three_ties(), 50.0));
  }
  SUBCASE("inverted adjustable range") {
    auto r = three_regions();
    r[0].inertia_lo = 80.0;  // above inertia_up = 70
    CHECK_THROWS_AS(sys_with(r, three_ties()), ScenarioError);
  }
  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(load_scenario("{nope"), ScenarioError);
    CHECK_THROWS_AS(load_scenario("{}"), ScenarioError);
  }
}

TEST_CASE("synchronizing matrix structure") {
  const MultiRegionSystem sys(three_regions(), three_ties(), 60.0, 1000.0);
  const Eigen::MatrixXd k = synchronizing_matrix(sys);
  const Eigen::VectorXd h = sys.inertia_vector();

  CHECK(k.rows() == 3);
  CHECK(k(0, 1) == doctest::Approx(1.2 / (2.0 * 40.0)));
  CHECK(k(1, 0) == doctest::Approx(1.2 / (2.0 * 70.0)));
  CHECK(k(2, 0) == doctest::Approx(0.6 / (2.0 * 90.0)));

  // Uniform angle shifts produce no accelerating power.
  const Eigen::VectorXd shift = k * Eigen::VectorXd::Ones(3);
  CHECK(shift.norm() == doctest::Approx(0.0).epsilon(1e-14));

  // Inter-area flows cancel in the inertia-weighted aggregate.
  const Eigen::RowVectorXd weighted = (2.0 * h).transpose() * k;
  CHECK(weighted.norm() == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("stiffness Laplacian is symmetric PSD with zero row sums") {
  std::mt19937_64 rng(99);
  for (int rep = 0; rep < 5; ++rep) {
    const MultiRegionSystem sys = testing::random_system(rng, 2, 5);
    const Eigen::MatrixXd l = stiffness_laplacian(sys);
    CHECK((l - l.transpose()).norm() == doctest::Approx(0.0).epsilon(1e-14));
    CHECK((l * Eigen::VectorXd::Ones(sys.size())).norm() ==
          doctest::Approx(0.0).epsilon(1e-13));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(l);
    CHECK(es.eigenvalues().minCoeff() >= -1e-12);
  }
}

TEST_CASE("state space blocks") {
  const MultiRegionSystem sys(three_regions(), three_ties(), 60.0, 1000.0);
  const StateSpace ss = build_state_space(sys);
  const int n = 3;
  CHECK(ss.a.rows() == 2 * n);
  CHECK(ss.n_regions == n);
  CHECK(ss.omega0 == doctest::Approx(sys.omega0()));

  const Eigen::MatrixXd k = synchronizing_matrix(sys);
  for (int i = 0; i < n; ++i) {
    const Region& r = sys.region(i);
    // The disturbance enters as a deceleration of the disturbed region only.
    CHECK(ss.b(i) == doctest::Approx(-r.disturbance / (2.0 * r.inertia)));
    CHECK(ss.b(n + i) == 0.0);
    for (int j = 0; j < n; ++j) {
      const double damp = i == j ? -r.damping / (2.0 * r.inertia) : 0.0;
      CHECK(ss.a(i, j) == doctest::Approx(damp));
      CHECK(ss.a(i, n + j) == doctest::Approx(k(i, j)));
      CHECK(ss.a(n + i, j) == doctest::Approx(i == j ? sys.omega0() : 0.0));
      CHECK(ss.a(n + i, n + j) == 0.0);
    }
  }
}

TEST_CASE("with_inertia swaps only the inertias") {
  const MultiRegionSystem sys(three_regions(), three_ties(), 60.0, 1000.0);
  Eigen::Vector3d h(55.0, 66.0, 77.0);
  const MultiRegionSystem other = sys.with_inertia(h);
  CHECK(other.inertia_vector().isApprox(h));
  CHECK(other.damping_vector().isApprox(sys.damping_vector()));
  CHECK(other.disturbance_vector().isApprox(sys.disturbance_vector()));
  CHECK(other.tie_lines().size() == sys.tie_lines().size());
  CHECK_THROWS_AS(sys.with_inertia(Eigen::Vector2d(1.0, 2.0)), ScenarioError);
  CHECK_THROWS_AS(sys.with_inertia(Eigen::Vector3d(0.0, 66.0, 77.0)),
                  ScenarioError);
}

TEST_CASE("aggregate critical inertia") {
  CHECK(coi_critical_inertia(2.4, 0.8 / 60.0) ==
        doctest::Approx(2.4 / (2.0 * 0.8 / 60.0)));
  CHECK(coi_critical_inertia(-2.4, 0.8 / 60.0) ==
        doctest::Approx(2.4 / (2.0 * 0.8 / 60.0)));
}
