#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "ccgeod/asymptotics.hpp"
#include "ccgeod/checks.hpp"
#include "ccgeod/errors.hpp"
#include "ccgeod/figures.hpp"
#include "ccgeod/io.hpp"
#include "ccgeod/model_charts.hpp"
#include "ccgeod/shoot.hpp"
#include "ccgeod/systems.hpp"

namespace py = pybind11;
using namespace ccgeod;

namespace {

std::vector<std::vector<double>> mat_to_rows(const Mat& m) {
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < m.rows(); i++) {
    std::vector<double> row;
    for (int j = 0; j < m.cols(); j++) row.push_back(m(i, j));
    rows.push_back(row);
  }
  return rows;
}

py::dict trajectory_to_dict(const Trajectory& t) {
  py::dict d;
  d["parameter_kind"] = to_string(t.parameter_kind);
  d["params"] = t.params;
  d["states"] = t.states;
  d["termination"] = to_string(t.termination);
  d["chart_id"] = t.chart_id;
  d["boundary_dim"] = t.boundary_dim;
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "geodesics of conformally compact metrics up to the conformal infinity";

  py::register_exception<domain_error>(m, "DomainError", PyExc_ValueError);
  py::register_exception<chart_integrity_error>(m, "ChartIntegrityError", PyExc_RuntimeError);
  py::register_exception<numeric_error>(m, "NumericError", PyExc_RuntimeError);
  py::register_exception<fit_error>(m, "FitError", PyExc_RuntimeError);

  py::class_<FermiChart, std::shared_ptr<FermiChart>>(m, "FermiChart")
      .def_property_readonly("dim", &FermiChart::dim)
      .def_property_readonly("boundary_dim", &FermiChart::boundary_dim)
      .def_property_readonly("delta", &FermiChart::delta)
      .def_property_readonly("id", &FermiChart::id)
      .def("rho", [](const FermiChart& c, const Vec& x) { return c.rho(x); })
      .def("h", [](const FermiChart& c, const Vec& x) { return mat_to_rows(c.h(x)); });

  py::class_<IntegratorConfig>(m, "IntegratorConfig")
      .def(py::init<>())
      .def_readwrite("rel_tol", &IntegratorConfig::rel_tol)
      .def_readwrite("abs_tol", &IntegratorConfig::abs_tol)
      .def_readwrite("max_steps", &IntegratorConfig::max_steps)
      .def_readwrite("tau_min", &IntegratorConfig::tau_min)
      .def_readwrite("initial_step", &IntegratorConfig::initial_step)
      .def_readwrite("record_stride", &IntegratorConfig::record_stride)
      .def_readwrite("max_step", &IntegratorConfig::max_step)
      .def_readwrite("x_stop_fraction", &IntegratorConfig::x_stop_fraction)
      .def_readwrite("w0_min", &IntegratorConfig::w0_min);

  // charts are immutable; the const is shed only for the python holder
  auto shed_const = [](ChartPtr c) { return std::const_pointer_cast<FermiChart>(c); };
  m.def("load_chart",
        [shed_const](const std::string& spec) { return shed_const(load_chart(spec)); },
        py::arg("spec"), "Build a chart from a JSON document or the epsilon:<v> shorthand");
  m.def("make_epsilon_chart",
        [shed_const](double epsilon, double delta) {
          return shed_const(make_epsilon_chart({epsilon, delta}));
        },
        py::arg("epsilon"), py::arg("delta") = 0.9);
  m.def("make_warped_ah_chart", [shed_const]() { return shed_const(make_warped_ah_chart()); });
  m.def("hyperbolic_endpoint_oracle", &hyperbolic_endpoint_oracle, py::arg("x0"), py::arg("y0"),
        py::arg("theta"));

  m.def("kappa", [](const ChartPtr& c, const Vec& q) { return kappa(*c, q); });
  m.def("obstruction",
        [](const ChartPtr& c, const Vec& q) { return obstruction(*c, BoundaryPoint{q}); });
  m.def(
      "is_asymptotically_hyperbolic",
      [](const ChartPtr& c, const std::vector<Vec>& points, double tol) {
        std::vector<BoundaryPoint> qs;
        for (const auto& q : points) qs.push_back({q});
        const AhReport r = is_asymptotically_hyperbolic(*c, qs, tol);
        return py::make_tuple(r.asymptotically_hyperbolic, r.sup_obstruction);
      },
      py::arg("chart"), py::arg("points"), py::arg("tol") = 1e-8);

  m.def(
      "endpoint_map",
      [](const ChartPtr& c, const Vec& p, const Vec& v, const IntegratorConfig& cfg) {
        const ShootResult r = endpoint_map(*c, p, v, cfg);
        py::dict d;
        d["ok"] = r.ok();
        d["termination"] = to_string(r.termination);
        if (r.ok()) d["endpoint"] = r.endpoint.x_prime;
        d["diagnostics"] = r.diagnostics;
        d["trajectory"] = trajectory_to_dict(r.trajectory);
        d["arclength_trajectory"] = trajectory_to_dict(r.arclength_trajectory);
        return d;
      },
      py::arg("chart"), py::arg("p"), py::arg("v"), py::arg("cfg") = IntegratorConfig());

  m.def(
      "endpoint_jacobian",
      [](const ChartPtr& c, const Vec& p, const Vec& v, const IntegratorConfig& cfg,
         double fd_step) {
        const EndpointJacobian j = endpoint_jacobian(*c, p, v, cfg, fd_step);
        py::dict d;
        d["jacobian"] = mat_to_rows(j.jacobian);
        d["smallest_singular_value"] = j.smallest_singular_value;
        d["fd_step"] = j.fd_step;
        return d;
      },
      py::arg("chart"), py::arg("p"), py::arg("v"), py::arg("cfg") = IntegratorConfig(),
      py::arg("fd_step") = 1e-4);

  m.def(
      "boundary_shoot",
      [](const ChartPtr& c, const Vec& q, const Vec& u, double tau_end,
         const IntegratorConfig& cfg) {
        if (tau_end == 0.0) tau_end = -c->delta();
        return trajectory_to_dict(boundary_shoot(*c, BoundaryPoint{q}, u, tau_end, cfg));
      },
      py::arg("chart"), py::arg("q"), py::arg("u"), py::arg("tau_end") = 0.0,
      py::arg("cfg") = IntegratorConfig());

  m.def(
      "boundary_shoot_fit",
      [](const ChartPtr& c, const Vec& q, const Vec& u, std::pair<double, double> window,
         bool nuisance, const IntegratorConfig& cfg_in) {
        IntegratorConfig cfg = cfg_in;
        if (cfg.max_step == 0.0) cfg.max_step = 2.5e-4;
        const Trajectory t = boundary_shoot(*c, BoundaryPoint{q}, u, -c->delta(), cfg);
        const ExpansionFit f = fit_expansion(t, window, nuisance);
        py::dict d;
        d["obstruction_fit"] = f.obstruction;
        d["u_fit"] = f.quadratic;
        d["residual_rms"] = f.residual_rms;
        d["condition"] = f.condition;
        return d;
      },
      py::arg("chart"), py::arg("q"), py::arg("u"),
      py::arg("window") = default_fit_window(), py::arg("nuisance") = true,
      py::arg("cfg") = IntegratorConfig());

  m.def(
      "figure_data",
      [](int figure_id, const std::vector<double>& eps, const std::string& out_dir,
         const IntegratorConfig& cfg) {
        FigureOptions opts;
        opts.epsilon_list = eps;
        opts.out_dir = out_dir;
        opts.cfg = cfg;
        return figure_data(figure_id, opts);
      },
      py::arg("figure_id"), py::arg("epsilon_list") = std::vector<double>{0.0, 0.5, 1.0},
      py::arg("out_dir") = std::string("."), py::arg("cfg") = IntegratorConfig());

  m.def(
      "run_checks",
      [](unsigned seed) {
        const auto results = run_invariant_battery(seed, IntegratorConfig());
        py::list rows;
        for (const auto& r : results) {
          py::dict d;
          d["name"] = r.name;
          d["measured"] = r.measured;
          d["tolerance"] = r.tolerance;
          d["pass"] = r.pass;
          rows.append(d);
        }
        return rows;
      },
      py::arg("seed") = 1u);

#ifdef CCGEOD_VERSION
  m.attr("__version__") = CCGEOD_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
