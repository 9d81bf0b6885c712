#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "risr/cells.hpp"
#include "risr/field.hpp"
#include "risr/geometry.hpp"
#include "risr/modal.hpp"
#include "risr/rocof_max.hpp"
#include "risr/simulate.hpp"
#include "risr/system.hpp"

namespace py = pybind11;
using namespace risr;

namespace {

// Flattened view of the cells pipeline: plain vectors, no Eigen internals.
struct CellsResult {
  std::vector<Eigen::Vector2d> polygon;
  std::vector<std::vector<Eigen::Vector2d>> cells;
  std::vector<Eigen::VectorXd> boundary_points;
  std::vector<int> axes;
};

}  // namespace

PYBIND11_MODULE(_risr, m) {
  m.doc() =
      "Inertia security regions: analytic worst-case frequency derivative, "
      "boundary tracing and convex decomposition over adjustable regional "
      "inertia.";

  py::register_exception<ScenarioError>(m, "ScenarioError");
  py::register_exception<NumericalError>(m, "NumericalError");

  py::class_<MultiRegionSystem>(m, "System")
      .def_property_readonly("size", &MultiRegionSystem::size)
      .def_property_readonly("nominal_freq_hz",
                             &MultiRegionSystem::nominal_freq_hz)
      .def_property_readonly("inertia", &MultiRegionSystem::inertia_vector)
      .def_property_readonly("total_disturbance",
                             &MultiRegionSystem::total_disturbance)
      .def("with_inertia", &MultiRegionSystem::with_inertia, py::arg("inertia"),
           "Copy of the system with the regional inertias replaced.");

  m.def("load_scenario", &load_scenario, py::arg("json_text"),
        "Parse a scenario document from a JSON string.");
  m.def(
      "load_scenario_file",
      [](const std::string& path) { return load_scenario_file(path); },
      py::arg("path"), "Parse a scenario document from a file.");

  py::class_<GlobalMax>(m, "GlobalMax")
      .def_readonly("value", &GlobalMax::value)
      .def_readonly("t_star", &GlobalMax::t_star)
      .def_readonly("component", &GlobalMax::component)
      .def_readonly("swing", &GlobalMax::swing)
      .def_readonly("msn", &GlobalMax::msn)
      .def("__repr__", [](const GlobalMax& g) {
        return "GlobalMax(value=" + std::to_string(g.value) +
               ", t_star=" + std::to_string(g.t_star) +
               ", msn=" + std::to_string(g.msn) + ")";
      });

  m.def(
      "global_rocof_max",
      [](const MultiRegionSystem& sys, int observed, int disturbed) {
        return global_max(decompose(sys, observed, disturbed));
      },
      py::arg("system"), py::arg("observed"), py::arg("disturbed"),
      "Most severe rate of change of frequency of the observed region, "
      "signed, in per-unit/s.");

  m.def(
      "rocof_at",
      [](const MultiRegionSystem& sys, int observed, int disturbed,
         const std::vector<double>& times) {
        const ModalDecomposition md = decompose(sys, observed, disturbed);
        std::vector<double> out;
        out.reserve(times.size());
        for (double t : times) out.push_back(evaluate_rocof(md, t));
        return out;
      },
      py::arg("system"), py::arg("observed"), py::arg("disturbed"),
      py::arg("times"),
      "Closed-form rate of change of frequency at the given times.");

  m.def(
      "simulated_peak",
      [](const MultiRegionSystem& sys, int observed, double t_end, double dt) {
        double t_at = 0.0, signed_v = 0.0;
        simulated_peak_rocof(build_state_space(sys), observed, t_end, dt,
                             &t_at, &signed_v);
        return py::make_tuple(signed_v, t_at);
      },
      py::arg("system"), py::arg("observed"), py::arg("t_end") = 12.0,
      py::arg("dt") = 1e-3,
      "Runge-Kutta worst rate of the observed region: (signed value, time).");

  py::class_<Assessment>(m, "Assessment")
      .def_property_readonly(
          "verdict", [](const Assessment& a) { return to_string(a.verdict); })
      .def_readonly("max_rocof", &Assessment::max_rocof)
      .def_readonly("t_star", &Assessment::t_star)
      .def_readonly("msn", &Assessment::msn)
      .def_readonly("detail", &Assessment::detail);

  m.def(
      "assess",
      [](const MultiRegionSystem& sys, const Eigen::VectorXd& inertia,
         int observed, int disturbed, double rocof_lim) {
        return assess(sys, inertia, observed, disturbed, rocof_lim);
      },
      py::arg("system"), py::arg("inertia"), py::arg("observed"),
      py::arg("disturbed"), py::arg("rocof_lim"),
      "Point check of an inertia vector against a per-unit/s limit.");

  py::class_<CellsResult>(m, "SecureCells")
      .def_readonly("polygon", &CellsResult::polygon)
      .def_readonly("cells", &CellsResult::cells)
      .def_readonly("boundary_points", &CellsResult::boundary_points)
      .def_readonly("axes", &CellsResult::axes);

  m.def(
      "secure_cells",
      [](const MultiRegionSystem& sys, const std::vector<int>& adjustable,
         int observed, int disturbed, double level,
         const Eigen::VectorXd& lo, const Eigen::VectorXd& up, double step,
         double eps_level, std::uint64_t seed, double simplify) {
        const RocofInertiaField field(sys, adjustable, observed, disturbed);
        const SecureRegionCells r = build_secure_cells(
            field, level, lo, up, step, eps_level, seed, simplify);
        CellsResult out;
        out.polygon = r.polygon.vertices;
        for (const auto& c : r.cells) out.cells.push_back(c.vertices);
        out.boundary_points = r.full.all_points();
        out.axes = r.axes;
        return out;
      },
      py::arg("system"), py::arg("adjustable"), py::arg("observed"),
      py::arg("disturbed"), py::arg("level"), py::arg("lo"), py::arg("up"),
      py::arg("step") = 1.0, py::arg("eps_level") = 0.0,
      py::arg("seed") = 1234, py::arg("simplify") = 0.005,
      "Trace the severity level set over two adjustable regions and "
      "decompose the secure side into convex cells.");

  m.def("coi_critical_inertia", &coi_critical_inertia, py::arg("disturbance"),
        py::arg("rocof_lim"),
        "Aggregate inertia at which the uniform-frequency model hits the "
        "limit.");
}
