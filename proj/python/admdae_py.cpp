#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "admdae/config.hpp"
#include "admdae/error.hpp"
#include "admdae/report.hpp"
#include "admdae/robot.hpp"
#include "admdae/solver.hpp"

namespace py = pybind11;
using namespace admdae;

namespace {

using Coefficients = std::vector<std::vector<double>>;

Coefficients coefficients(const PolyVector& v) {
  Coefficients out;
  for (const auto& p : v) out.emplace_back(p.coefficients().begin(), p.coefficients().end());
  return out;
}

std::vector<Coefficients> coefficients(const std::vector<PolyVector>& history) {
  std::vector<Coefficients> out;
  for (const auto& v : history) out.push_back(coefficients(v));
  return out;
}

py::dict residual_dict(const ResidualReport& r) {
  py::dict d;
  d["t"] = r.t;
  d["g_res"] = r.position;
  d["gv_res"] = r.velocity;
  d["defect"] = r.defect;
  d["err_p"] = r.err_p ? py::cast(*r.err_p) : py::none();
  d["err_v"] = r.err_v ? py::cast(*r.err_v) : py::none();
  d["err_lambda"] = r.err_lambda ? py::cast(*r.err_lambda) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_admdae, m) {
  m.doc() = "Adomian decomposition solver for index-3 Euler-Lagrange equations";

  // Kept alive for the life of the interpreter; instances carry the error
  // code name in `code`.
  static PyObject* error_type = py::exception<Error>(m, "AdmdaeError").release().ptr();
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object instance = py::reinterpret_borrow<py::object>(error_type)(e.what());
      instance.attr("code") = errc_name(e.code());
      PyErr_SetObject(error_type, instance.ptr());
    }
  });

  py::class_<ConsistencyReport>(m, "ConsistencyReport")
      .def_readonly("position_residual", &ConsistencyReport::position_residual)
      .def_readonly("velocity_residual", &ConsistencyReport::velocity_residual)
      .def_readonly("tolerance", &ConsistencyReport::tolerance)
      .def_property_readonly("passed", &ConsistencyReport::passed);

  py::class_<MechanicalSystem>(m, "MechanicalSystem")
      .def_property_readonly("name", &MechanicalSystem::name)
      .def_property_readonly("coordinate_count", &MechanicalSystem::coordinate_count)
      .def_property_readonly("constraint_count", &MechanicalSystem::constraint_count)
      .def_property_readonly("initial_position", &MechanicalSystem::initial_position)
      .def_property_readonly("initial_velocity", &MechanicalSystem::initial_velocity)
      .def_property_readonly("time_origin", &MechanicalSystem::time_origin)
      .def("with_initial_state", &MechanicalSystem::with_initial_state, py::arg("p0"), py::arg("v0"),
           py::arg("time_origin") = 0.0)
      .def(
          "constraints_at",
          [](const MechanicalSystem& s, std::vector<double> p) {
            const DenseVector g = s.constraints_at(p);
            return std::vector<double>(g.data(), g.data() + g.size());
          },
          py::arg("p"));

  py::class_<ReferenceSolution>(m, "ReferenceSolution")
      .def("position", &ReferenceSolution::position, py::arg("t"), py::arg("parameters"))
      .def("velocity", &ReferenceSolution::velocity, py::arg("t"), py::arg("parameters"))
      .def("multiplier", &ReferenceSolution::multiplier, py::arg("t"), py::arg("parameters"));

  py::class_<LoadedSystem>(m, "LoadedSystem")
      .def_readonly("system", &LoadedSystem::system)
      .def_readonly("reference", &LoadedSystem::reference);

  m.def("load_system", &load_system, py::arg("path"), "Read and validate a JSON system description.");
  m.def("robot", &robot::load, "The built-in two-link robot with its exact solution.");
  m.def(
      "robot_config_json", [] { return config_to_json(robot::config()).dump(2); },
      "JSON text of the built-in robot description.");
  m.def("check_consistency", &check_consistency, py::arg("system"), py::arg("tol") = kConsistencyTolerance);

  py::class_<SeriesSolution>(m, "SeriesSolution")
      .def_readonly("order", &SeriesSolution::order)
      .def_readonly("origin", &SeriesSolution::origin)
      .def_readonly("balance_residual", &SeriesSolution::balance_residual)
      .def_readonly("constraint_residual", &SeriesSolution::constraint_residual)
      .def_property_readonly("p", [](const SeriesSolution& s) { return coefficients(s.p); })
      .def_property_readonly("v", [](const SeriesSolution& s) { return coefficients(s.v); })
      .def_property_readonly("lambda_", [](const SeriesSolution& s) { return coefficients(s.lambda); })
      .def_property_readonly("p_components", [](const SeriesSolution& s) { return coefficients(s.history.p); })
      .def_property_readonly("v_components", [](const SeriesSolution& s) { return coefficients(s.history.v); })
      .def_property_readonly("lambda_components",
                             [](const SeriesSolution& s) { return coefficients(s.history.lambda); })
      .def("position", &SeriesSolution::position, py::arg("tau"))
      .def("velocity", &SeriesSolution::velocity, py::arg("tau"))
      .def("multiplier", &SeriesSolution::multiplier, py::arg("tau"));

  m.def("solve_series", &solve_series, py::arg("system"), py::arg("order") = kDefaultOrder,
        py::call_guard<py::gil_scoped_release>());
  m.def(
      "structural_residuals",
      [](const MechanicalSystem& s, const SeriesSolution& sol) {
        const StructuralResiduals r = structural_residuals(s, sol);
        return py::make_tuple(r.constraint_series, r.ode_defect);
      },
      py::arg("system"), py::arg("solution"), "(constraint series, ODE defect) largest coefficients.");

  py::class_<Stage>(m, "Stage")
      .def_readonly("begin", &Stage::begin)
      .def_readonly("end", &Stage::end)
      .def_readonly("series", &Stage::series)
      .def_readonly("before_projection", &Stage::before_projection)
      .def_readonly("after_projection", &Stage::after_projection)
      .def_readonly("projection_iterations", &Stage::projection_iterations);

  py::class_<StagedSolution>(m, "StagedSolution")
      .def_readonly("stages", &StagedSolution::stages)
      .def_property_readonly("t_begin", &StagedSolution::t_begin)
      .def_property_readonly("t_end", &StagedSolution::t_end)
      .def("position", &StagedSolution::position, py::arg("t"))
      .def("velocity", &StagedSolution::velocity, py::arg("t"))
      .def("multiplier", &StagedSolution::multiplier, py::arg("t"))
      .def(
          "to_csv",
          [](const StagedSolution& s, std::size_t samples) {
            std::ostringstream out;
            write_solution_csv(s, samples, out);
            return out.str();
          },
          py::arg("samples") = 101)
      .def("export", &sample_and_export, py::arg("samples"), py::arg("path"));

  m.def("multistage_solve", &multistage_solve, py::arg("system"), py::arg("t_end"), py::arg("h"),
        py::arg("order") = kDefaultOrder, py::call_guard<py::gil_scoped_release>());
  m.def("single_stage", &single_stage, py::arg("system"), py::arg("t_end"), py::arg("order") = kDefaultOrder,
        py::call_guard<py::gil_scoped_release>());
  m.def("default_stage_length", &default_stage_length, py::arg("system"), py::arg("t_end"));

  m.def(
      "residual_report",
      [](const MechanicalSystem& s, const StagedSolution& sol, std::size_t samples,
         const std::optional<ReferenceSolution>& reference, unsigned jobs) {
        ResidualReport r;
        {
          py::gil_scoped_release release;
          r = residual_report(s, sol, samples, reference ? &*reference : nullptr, jobs);
        }
        return residual_dict(r);
      },
      py::arg("system"), py::arg("solution"), py::arg("samples") = 101, py::arg("reference") = py::none(),
      py::arg("jobs") = 1u, "Per-sample residuals as a dict of lists; error columns are None without a reference.");

  m.def(
      "format_series",
      [](const std::vector<double>& c, double zero_tol) {
        const int cap = c.empty() ? 0 : static_cast<int>(c.size()) - 1;
        return format_series(TimePoly(c, cap), zero_tol);
      },
      py::arg("coefficients"), py::arg("zero_tol") = 1e-14);

  m.attr("DEFAULT_ORDER") = kDefaultOrder;
  m.attr("CONSISTENCY_TOLERANCE") = kConsistencyTolerance;
}
