#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "phasemem/config.hpp"
#include "phasemem/errors.hpp"
#include "phasemem/kernel.hpp"
#include "phasemem/limitstudy.hpp"
#include "phasemem/mms.hpp"
#include "phasemem/nonlinear.hpp"
#include "phasemem/solver.hpp"

namespace py = pybind11;
using namespace phasemem;

namespace {

py::list rows_of(const std::vector<Field>& fields) {
  py::list out;
  for (const auto& f : fields) out.append(py::cast(f.values));
  return out;
}

py::dict solution_dict(const ProblemConfig& cfg, const TrajectorySolution& sol) {
  const auto res = entropy_residual(cfg, sol);
  py::dict d;
  d["times"] = sol.times;
  std::vector<double> x(cfg.mesh.n_nodes());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = cfg.mesh.node(i);
  d["x"] = x;
  d["theta"] = rows_of(sol.theta);
  d["chi"] = rows_of(sol.chi);
  d["xi"] = rows_of(sol.xi);
  d["entropy_residual"] = res.entropy_residual;
  d["phase_residual"] = res.phase_residual;
  d["energy_identity_gap"] = res.energy_identity_gap;
  d["kernel_form"] = res.kernel_form;
  return d;
}

py::dict sweep_dict(const RateReport& rep) {
  py::list rows;
  for (const auto& r : rep.rows) {
    py::dict row;
    row["epsilon"] = r.epsilon;
    row["l1_deviation"] = r.l1_deviation;
    row["sup_V_accum"] = r.error.sup_V_accum;
    row["sup_H_chi"] = r.error.sup_H_chi;
    row["l2_V_chi"] = r.error.l2_V_chi;
    row["log_duality"] = r.error.log_duality;
    row["xi_duality"] = r.error.xi_duality;
    row["error_total"] = r.error.total;
    row["ratio"] = r.ratio;
    row["theta_l2"] = r.theta_l2;
    rows.append(row);
  }
  py::dict d;
  d["rows"] = rows;
  d["fitted_slope"] = rep.fitted_slope;
  d["ratio_max"] = rep.ratio_max;
  d["degenerate"] = rep.degenerate;
  d["theta_min"] = rep.theta_min;
  d["error_decreasing"] = rep.error_decreasing();
  d["ratio_bounded"] = rep.ratio_bounded();
  d["slope_ok"] = rep.slope_ok();
  d["dualities_nonnegative"] = rep.dualities_nonnegative();
  return d;
}

py::dict mms_dict(const ManufacturedStudy& st, const ManufacturedOptions& o) {
  py::dict d;
  d["temporal_order"] = st.temporal_order;
  d["spatial_order"] = st.spatial_order;
  d["temporal_orders_theta"] = st.temporal_orders_theta;
  d["spatial_orders_theta"] = st.spatial_orders_theta;
  d["theta_min"] = st.theta_min;
  d["passed"] = st.passed(o);
  return d;
}

}  // namespace

PYBIND11_MODULE(_phasemem, m) {
  m.doc() = "Phase-field solver with thermal memory";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<PreconditionError>(m, "PreconditionError", PyExc_ValueError);
  py::register_exception<StepFailure>(m, "StepFailure", PyExc_RuntimeError);
  py::register_exception<SweepFailure>(m, "SweepFailure", PyExc_RuntimeError);
  py::register_exception<NumericError>(m, "NumericError", PyExc_ArithmeticError);

  py::class_<MemoryKernel>(m, "MemoryKernel")
      .def_static("zero", &MemoryKernel::zero)
      .def_static("exponential", &MemoryKernel::exponential, py::arg("amplitude"), py::arg("timescale"))
      .def_static("tabulated", &MemoryKernel::tabulated, py::arg("times"), py::arg("values"))
      .def_property_readonly("is_zero", &MemoryKernel::is_zero)
      .def_property_readonly("is_exponential", &MemoryKernel::is_exponential)
      .def_property_readonly("is_tabulated", &MemoryKernel::is_tabulated);

  m.def("eval_kernel", &eval_kernel, py::arg("kernel"), py::arg("t"));
  m.def("cumulative_kernel", &cumulative_kernel, py::arg("kernel"), py::arg("t"));
  m.def("l1_deviation", &l1_deviation, py::arg("kernel"), py::arg("kappa0_prime"), py::arg("T"),
        py::arg("n_points") = 10000);
  m.def("check_positive_type_sufficient", &check_positive_type_sufficient, py::arg("kernel"));
  m.def(
      "estimate_coercivity_constant",
      [](const MemoryKernel& k, double kappa0, double T, int n_grid) {
        return estimate_coercivity_constant(k, kappa0, T, n_grid);
      },
      py::arg("kernel"), py::arg("kappa0"), py::arg("T"), py::arg("n_grid") = 128);

  py::class_<MonotoneGraph>(m, "MonotoneGraph")
      .def_static("zero", &MonotoneGraph::zero)
      .def_static("box", &MonotoneGraph::box, py::arg("lo"), py::arg("hi"))
      .def_static("odd_polynomial", &MonotoneGraph::odd_polynomial, py::arg("coefficients"));

  m.def("resolvent", &resolvent, py::arg("graph"), py::arg("mu"), py::arg("r"));
  m.def("yosida", &yosida, py::arg("graph"), py::arg("mu"), py::arg("r"));
  m.def("solve_scalar_log", &solve_scalar_log, py::arg("a"), py::arg("c"), py::arg("b"), py::arg("max_iters") = 200);

  py::class_<RunSettings>(m, "RunSettings")
      .def_property_readonly("resolved", [](const RunSettings& s) { return s.resolved; })
      .def_property_readonly("epsilons", [](const RunSettings& s) { return s.epsilons; })
      .def_property_readonly("T", [](const RunSettings& s) { return s.problem.T; })
      .def_property_readonly("dt", [](const RunSettings& s) { return s.problem.dt; });

  m.def("parse_config", &parse_config, py::arg("text"));
  m.def(
      "load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));

  m.def(
      "run",
      [](const RunSettings& s) {
        TrajectorySolution sol;
        {
          py::gil_scoped_release release;
          sol = run(s.problem);
        }
        return solution_dict(s.problem, sol);
      },
      py::arg("settings"));

  m.def(
      "kernel_report",
      [](const RunSettings& s) {
        const auto rep = make_kernel_report(s.problem.kernel, s.problem.kappa0, s.problem.kappa0_prime, s.problem.T,
                                            s.coercivity_grid);
        py::dict d;
        d["l1_norm"] = rep.l1_norm;
        d["l1_deviation"] = rep.l1_deviation;
        d["positive_type_sufficient"] = rep.positive_type_sufficient;
        d["coercivity_estimate"] = rep.coercivity_estimate;
        return d;
      },
      py::arg("settings"));

  m.def(
      "sweep",
      [](const RunSettings& s) {
        RateReport rep;
        {
          py::gil_scoped_release release;
          rep = run_sweep(make_sweep_plan(s));
        }
        return sweep_dict(rep);
      },
      py::arg("settings"));

  m.def(
      "mms",
      [](const RunSettings& s) {
        ManufacturedStudy st;
        {
          py::gil_scoped_release release;
          st = run_manufactured_study(s.mms);
        }
        return mms_dict(st, s.mms);
      },
      py::arg("settings"));
}
