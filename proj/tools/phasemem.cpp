#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <string>

#include "CLI11.hpp"
#include "json.hpp"
#include "phasemem/config.hpp"
#include "phasemem/errors.hpp"
#include "run_io.hpp"

#ifndef PHASEMEM_VERSION
#define PHASEMEM_VERSION "0.0.0"
#endif

namespace {

using namespace phasemem;
using nlohmann::json;

enum ExitCode : int { kOk = 0, kInternal = 1, kConfig = 2, kSolver = 3, kAcceptance = 4 };

struct Options {
  std::string config;
  std::string out = "runs";
  int parallel = 0;
};

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

void write_trajectory(cli::RunDirectory& dir, const std::string& name, const TrajectorySolution& sol,
                      const std::vector<Field>& frames, int every) {
  std::vector<std::vector<double>> rows;
  const std::size_t last = sol.n_steps();
  for (std::size_t n = 0; n <= last; ++n) {
    if (n % static_cast<std::size_t>(every) != 0 && n != last) continue;
    const Field& f = frames[n];
    for (std::size_t i = 0; i < f.size(); ++i) rows.push_back({sol.times[n], f.mesh.node(i), f[i]});
  }
  dir.write_csv(name, {"t", "x", "value"}, rows);
}

int cmd_run(const Options& opt) {
  const RunSettings rs = load_config(opt.config);
  const TrajectorySolution sol = run(rs.problem);
  const ResidualReport res = entropy_residual(rs.problem, sol);

  cli::RunDirectory dir(opt.out, "run");
  write_trajectory(dir, "theta.csv", sol, sol.theta, rs.output_every);
  write_trajectory(dir, "chi.csv", sol, sol.chi, rs.output_every);
  write_trajectory(dir, "xi.csv", sol, sol.xi, rs.output_every);

  double theta_min = std::numeric_limits<double>::infinity();
  long phase_its = 0, temp_its = 0, halvings = 0;
  for (const auto& f : sol.theta)
    for (double v : f.values) theta_min = std::min(theta_min, v);
  for (const auto& s : sol.newton) {
    phase_its += s.phase_iterations;
    temp_its += s.temperature_iterations;
    halvings += s.halvings;
  }
  dir.write_json("residuals.json", {{"entropy_residual", res.entropy_residual},
                                    {"phase_residual", res.phase_residual},
                                    {"energy_identity_gap", res.energy_identity_gap},
                                    {"kernel_form", res.kernel_form}});
  dir.write_json("summary.json", {{"steps", sol.n_steps()},
                                  {"theta_min", theta_min},
                                  {"phase_newton_iterations", phase_its},
                                  {"temperature_newton_iterations", temp_its},
                                  {"line_search_halvings", halvings}});
  dir.finalize(json::parse(rs.resolved), PHASEMEM_VERSION);
  std::cout << "run written to " << dir.path().string() << "\n";
  return kOk;
}

int cmd_kernel(const Options& opt) {
  const RunSettings rs = load_config(opt.config);
  const auto& p = rs.problem;
  const KernelReport rep = make_kernel_report(p.kernel, p.kappa0, p.kappa0_prime, p.T, rs.coercivity_grid);
  const json doc{{"l1_norm", rep.l1_norm},
                 {"l1_deviation", rep.l1_deviation},
                 {"positive_type_sufficient", rep.positive_type_sufficient},
                 {"coercivity_estimate", rep.coercivity_estimate},
                 {"n_grid", rs.coercivity_grid}};
  cli::RunDirectory dir(opt.out, "kernel");
  dir.write_json("kernel_report.json", doc);
  dir.finalize(json::parse(rs.resolved), PHASEMEM_VERSION);
  std::cout << doc.dump(2) << "\n";
  return kOk;
}

int cmd_sweep(const Options& opt) {
  const RunSettings rs = load_config(opt.config);
  SweepPlan plan = make_sweep_plan(rs);
  if (opt.parallel > 0) plan.parallelism = opt.parallel;
  try {
    validate(plan);
  } catch (const PreconditionError& e) {
    throw ConfigError("sweep.epsilons", e.what());
  }
  const RateReport rep = run_sweep(plan);

  cli::RunDirectory dir(opt.out, "sweep");
  std::vector<std::vector<double>> rows;
  for (const auto& r : rep.rows) {
    rows.push_back({r.epsilon, r.l1_deviation, r.error.sup_V_accum, r.error.sup_H_chi, r.error.l2_V_chi,
                    r.error.log_duality, r.error.xi_duality, r.error.total, r.ratio});
  }
  dir.write_csv("rate_report.csv",
                {"epsilon", "l1_deviation", "sup_V_accum", "sup_H_chi", "l2_V_chi", "log_duality", "xi_duality",
                 "error_total", "ratio"},
                rows);
  std::vector<std::vector<double>> l2rows;
  for (const auto& r : rep.rows) l2rows.push_back({r.epsilon, r.theta_l2});
  dir.write_csv("theta_l2.csv", {"epsilon", "theta_l2_distance"}, l2rows);

  const bool ratio_ok = rep.ratio_bounded();
  const bool slope_ok = rep.slope_ok();
  dir.write_json("summary.json", {{"fitted_slope", finite_or_null(rep.fitted_slope)},
                                  {"ratio_max", rep.ratio_max},
                                  {"degenerate", rep.degenerate},
                                  {"flags",
                                   {{"ratio_bounded", ratio_ok},
                                    {"slope_ok", slope_ok},
                                    {"error_decreasing", rep.error_decreasing()},
                                    {"dualities_nonnegative", rep.dualities_nonnegative()}}}});
  dir.finalize(json::parse(rs.resolved), PHASEMEM_VERSION);

  char line[160];
  std::snprintf(line, sizeof line, "slope=%.4f ratio_max=%.4e ratio_bounded=%s slope_ok=%s", rep.fitted_slope,
                rep.ratio_max, ratio_ok ? "yes" : "no", slope_ok ? "yes" : "no");
  std::cout << line << "\nreport written to " << dir.path().string() << "\n";
  return ratio_ok && slope_ok ? kOk : kAcceptance;
}

int cmd_mms(const Options& opt) {
  const RunSettings rs = load_config(opt.config);
  const ManufacturedStudy st = run_manufactured_study(rs.mms);

  cli::RunDirectory dir(opt.out, "mms");
  std::vector<std::vector<double>> rows;
  for (const auto& l : st.time_levels) rows.push_back({l.dt, double(l.n_cells), l.theta_error, l.chi_error});
  for (const auto& l : st.space_levels) rows.push_back({l.dt, double(l.n_cells), l.theta_error, l.chi_error});
  dir.write_csv("mms_levels.csv", {"dt", "n_cells", "theta_error", "chi_error"}, rows);
  const bool ok = st.passed(rs.mms);
  dir.write_json("mms_orders.json", {{"temporal_orders_theta", st.temporal_orders_theta},
                                     {"temporal_orders_chi", st.temporal_orders_chi},
                                     {"spatial_orders_theta", st.spatial_orders_theta},
                                     {"spatial_orders_chi", st.spatial_orders_chi},
                                     {"temporal_order", st.temporal_order},
                                     {"spatial_order", st.spatial_order},
                                     {"passed", ok}});
  dir.finalize(json::parse(rs.resolved), PHASEMEM_VERSION);

  char line[128];
  std::snprintf(line, sizeof line, "temporal_order=%.4f spatial_order=%.4f", st.temporal_order, st.spatial_order);
  std::cout << line << "\nreport written to " << dir.path().string() << "\n";
  return ok ? kOk : kAcceptance;
}

int guarded(int (*cmd)(const Options&), const Options& opt) {
  try {
    return cmd(opt);
  } catch (const ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kConfig;
  } catch (const StepFailure& e) {
    std::cerr << "solver failure at step " << e.step() << ": " << e.what() << "\n";
    return kSolver;
  } catch (const SweepFailure& e) {
    std::cerr << e.what() << "\n";
    return kSolver;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return kSolver;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kInternal;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Entropy-balance phase-field solver with thermal memory"};
  app.set_version_flag("--version", PHASEMEM_VERSION);
  app.require_subcommand(1);

  Options opt;
  int (*selected)(const Options&) = nullptr;
  auto add = [&](const char* name, const char* help, int (*fn)(const Options&)) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opt.config, "configuration file (JSON)")->required()->check(CLI::ExistingFile);
    sub->add_option("--out", opt.out, "root directory for run outputs")->capture_default_str();
    sub->add_option("--parallel", opt.parallel, "concurrent solver runs (sweep only)")->check(CLI::PositiveNumber);
    sub->callback([&selected, fn] { selected = fn; });
  };
  add("run", "single trajectory with residual report", cmd_run);
  add("kernel", "kernel hypothesis checks and coercivity estimate", cmd_kernel);
  add("sweep", "epsilon sweep against the memory-free limit", cmd_sweep);
  add("mms", "manufactured-solution refinement study", cmd_mms);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfig;
  }
  return guarded(selected, opt);
}
