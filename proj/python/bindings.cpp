#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "geotomo/adjoint.hpp"
#include "geotomo/csv_io.hpp"
#include "geotomo/errors.hpp"
#include "geotomo/experiments.hpp"
#include "geotomo/inner.hpp"
#include "geotomo/transport_pde.hpp"

namespace py = pybind11;
using namespace geotomo;

PYBIND11_MODULE(_geotomo, mod) {
  mod.doc() = "Geodesic ray transforms of tensor fields on the unit disc";

  py::register_exception<OutsideDomain>(mod, "OutsideDomain");
  py::register_exception<NoIntersection>(mod, "NoIntersection");
  py::register_exception<BoundaryNonzero>(mod, "BoundaryNonzero");
  py::register_exception<NonConvergence>(mod, "NonConvergence");
  py::register_exception<DivergenceDetected>(mod, "DivergenceDetected");
  py::register_exception<ZeroField>(mod, "ZeroField");
  py::register_exception<UnknownPhantom>(mod, "UnknownPhantom");
  py::register_exception<BadConfig>(mod, "BadConfig");

  py::class_<Vec2>(mod, "Vec2")
      .def(py::init<double, double>(), py::arg("x"), py::arg("y"))
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("y", &Vec2::y)
      .def("__repr__", [](const Vec2& v) {
        return "Vec2(" + std::to_string(v.x) + ", " + std::to_string(v.y) + ")";
      });

  py::class_<PolarGrid>(mod, "PolarGrid")
      .def(py::init<int, int, int>(), py::arg("R"), py::arg("P"), py::arg("Q"))
      .def_readonly("R", &PolarGrid::R)
      .def_readonly("P", &PolarGrid::P)
      .def_readonly("Q", &PolarGrid::Q)
      .def("rho", &PolarGrid::rho)
      .def("mu", &PolarGrid::mu)
      .def("phi", &PolarGrid::phi)
      .def("node", &PolarGrid::node)
      .def("direction", &PolarGrid::direction);

  py::class_<TensorField>(mod, "TensorField")
      .def(py::init<int, int, int>(), py::arg("R"), py::arg("P"), py::arg("m"))
      .def_readonly("R", &TensorField::R)
      .def_readonly("P", &TensorField::P)
      .def_readonly("m", &TensorField::m)
      .def_readwrite("values", &TensorField::values)
      .def("at", [](const TensorField& f, int r, int p, int k) {
        return f.at(r, p, k);
      })
      .def("set", [](TensorField& f, int r, int p, int k, double v) {
        f.at(r, p, k) = v;
      });

  py::class_<BoundaryData>(mod, "BoundaryData")
      .def(py::init<int, int>(), py::arg("P"), py::arg("Q"))
      .def_readonly("P", &BoundaryData::P)
      .def_readonly("Q", &BoundaryData::Q)
      .def_readwrite("values", &BoundaryData::values)
      .def("at", [](const BoundaryData& d, int p, int q) { return d.at(p, q); })
      .def("set", [](BoundaryData& d, int p, int q, double v) {
        d.at(p, q) = v;
      });

  py::class_<RefractiveMedium>(mod, "RefractiveMedium")
      .def_readonly("name", &RefractiveMedium::name)
      .def_readwrite("alpha0", &RefractiveMedium::alpha0)
      .def("n", [](const RefractiveMedium& m, const Vec2& x) {
        return m.eval_n(x);
      });
  mod.def("make_medium", &make_medium, py::arg("name"),
          py::arg("alpha0") = 0.0);

  py::enum_<QuadratureMode>(mod, "QuadratureMode")
      .value("Trapezoid", QuadratureMode::Trapezoid)
      .value("PaperAverage", QuadratureMode::PaperAverage);

  py::enum_<DenominatorMode>(mod, "DenominatorMode")
      .value("GeometricExit", DenominatorMode::GeometricExit)
      .value("PaperStartNode", DenominatorMode::PaperStartNode);

  mod.def("phantom_value", &phantom_value, py::arg("name"), py::arg("x"));
  mod.def("phantom_field", &phantom_field, py::arg("name"), py::arg("grid"));

  mod.def("ray_transform_euclid", &ray_transform_euclid, py::arg("field"),
          py::arg("alpha0"), py::arg("grid"), py::arg("T") = 200,
          py::arg("mode") = QuadratureMode::Trapezoid);
  mod.def("ray_transform_geodesic", &ray_transform_geodesic, py::arg("field"),
          py::arg("medium"), py::arg("grid"), py::arg("dtau") = 0.005);

  mod.def("backproject_euclid", &backproject_euclid, py::arg("data"),
          py::arg("grid"), py::arg("alpha0"), py::arg("m") = 1);
  mod.def("backproject_geodesic", &backproject_geodesic, py::arg("data"),
          py::arg("grid"), py::arg("medium"), py::arg("m") = 1,
          py::arg("dtau") = 0.005,
          py::arg("mode") = DenominatorMode::GeometricExit);
  mod.def("pde_adjoint", &pde_adjoint, py::arg("data"), py::arg("grid"),
          py::arg("alpha0"), py::arg("epsilon"), py::arg("m") = 1);

  py::enum_<AdjointKind>(mod, "AdjointKind")
      .value("Integral", AdjointKind::Integral)
      .value("Pde", AdjointKind::Pde);
  mod.def("duality_defect",
          py::overload_cast<const TensorField&, AdjointKind, const PolarGrid&,
                            double, double, int>(&duality_defect),
          py::arg("f"), py::arg("kind"), py::arg("grid"), py::arg("alpha0"),
          py::arg("epsilon") = 0.0, py::arg("T") = 200);

  mod.def("duality_defect_pair",
          py::overload_cast<const TensorField&, const PolarGrid&,
                            const RefractiveMedium&,
                            const std::function<BoundaryData(const TensorField&)>&,
                            const std::function<TensorField(const BoundaryData&)>&>(
              &duality_defect),
          py::arg("f"), py::arg("grid"), py::arg("medium"), py::arg("forward"),
          py::arg("adjoint"));

  mod.def("field_norm",
          py::overload_cast<const TensorField&, const PolarGrid&>(&field_norm),
          py::arg("field"), py::arg("grid"));
  mod.def("field_norm",
          py::overload_cast<const TensorField&, const PolarGrid&,
                            const RefractiveMedium&>(&field_norm),
          py::arg("field"), py::arg("grid"), py::arg("medium"));
  mod.def("field_inner",
          py::overload_cast<const TensorField&, const TensorField&,
                            const PolarGrid&, const RefractiveMedium&>(
              &field_inner),
          py::arg("a"), py::arg("b"), py::arg("grid"), py::arg("medium"));
  mod.def("data_inner",
          py::overload_cast<const BoundaryData&, const BoundaryData&,
                            const PolarGrid&, const RefractiveMedium&>(
              &data_inner),
          py::arg("a"), py::arg("b"), py::arg("grid"), py::arg("medium"));
  mod.def("data_norm",
          py::overload_cast<const BoundaryData&, const PolarGrid&>(&data_norm),
          py::arg("data"), py::arg("grid"));
  mod.def("relative_l2_error", &relative_l2_error, py::arg("f_approx"),
          py::arg("f_exact"), py::arg("grid"));
  mod.def("add_relative_uniform_noise", &add_relative_uniform_noise,
          py::arg("data"), py::arg("delta"), py::arg("seed"), py::arg("grid"));

  py::class_<LinearOperator>(mod, "LinearOperator")
      .def(py::init<>())
      .def_readwrite("apply", &LinearOperator::apply)
      .def_readwrite("adjoint", &LinearOperator::adjoint);
  mod.def("make_euclid_operator", &make_euclid_operator, py::arg("grid"),
          py::arg("alpha0"), py::arg("T") = 200, py::arg("m") = 1);
  mod.def("make_geodesic_operator", &make_geodesic_operator, py::arg("grid"),
          py::arg("medium"), py::arg("dtau") = 0.005, py::arg("m") = 1,
          py::arg("mode") = DenominatorMode::GeometricExit);

  py::class_<ReconConfig>(mod, "ReconConfig")
      .def(py::init<>())
      .def_readwrite("omega", &ReconConfig::omega)
      .def_readwrite("max_iters", &ReconConfig::max_iters)
      .def_readwrite("nesterov", &ReconConfig::nesterov)
      .def_readwrite("oracle_stop_tol", &ReconConfig::oracle_stop_tol)
      .def_readwrite("stagnation_tol", &ReconConfig::stagnation_tol)
      .def_readwrite("stagnation_window", &ReconConfig::stagnation_window)
      .def_readwrite("divergence_factor", &ReconConfig::divergence_factor);

  py::enum_<StopReason>(mod, "StopReason")
      .value("OracleTol", StopReason::OracleTol)
      .value("Stagnation", StopReason::Stagnation)
      .value("MaxIters", StopReason::MaxIters);

  py::class_<IterationRecord>(mod, "IterationRecord")
      .def_readonly("k", &IterationRecord::k)
      .def_readonly("residual", &IterationRecord::residual)
      .def_readonly("rel_error", &IterationRecord::rel_error);

  py::class_<ReconResult>(mod, "ReconResult")
      .def_readonly("f", &ReconResult::f)
      .def_readonly("history", &ReconResult::history)
      .def_readonly("reason", &ReconResult::reason);

  mod.def(
      "landweber",
      [](const BoundaryData& g, const LinearOperator& op,
         const ReconConfig& config, const PolarGrid& grid, int m,
         const TensorField* f_exact) {
        return landweber(g, op, config, grid, m, f_exact);
      },
      py::arg("g"), py::arg("op"), py::arg("config"), py::arg("grid"),
      py::arg("m") = 1, py::arg("f_exact") = nullptr);

  py::class_<NoiseCase>(mod, "NoiseCase")
      .def(py::init<>())
      .def_readwrite("delta", &NoiseCase::delta)
      .def_readwrite("seed", &NoiseCase::seed);

  py::class_<TableResult>(mod, "TableResult")
      .def_readonly("name", &TableResult::name)
      .def_readonly("header", &TableResult::header)
      .def_readonly("rows", &TableResult::rows);

  py::class_<ExperimentSpec>(mod, "ExperimentSpec")
      .def(py::init<>())
      .def_readwrite("name", &ExperimentSpec::name)
      .def_readwrite("phantom", &ExperimentSpec::phantom)
      .def_readwrite("medium", &ExperimentSpec::medium)
      .def_readwrite("alphas", &ExperimentSpec::alphas)
      .def_readwrite("grids", &ExperimentSpec::grids)
      .def_readwrite("qs", &ExperimentSpec::qs)
      .def_readwrite("epsilons", &ExperimentSpec::epsilons)
      .def_readwrite("noise", &ExperimentSpec::noise)
      .def_readwrite("recon", &ExperimentSpec::recon)
      .def_readwrite("recon_set", &ExperimentSpec::recon_set)
      .def_readwrite("T", &ExperimentSpec::T)
      .def_readwrite("dtau", &ExperimentSpec::dtau)
      .def_readwrite("out_dir", &ExperimentSpec::out_dir)
      .def_readwrite("seed", &ExperimentSpec::seed);

  mod.def("run_experiment", &run_experiment, py::arg("name"),
          py::arg("overrides") = ExperimentSpec{});

  mod.attr("__version__") = "0.1.0";
  mod.attr("build_commit") = build_commit();
}
