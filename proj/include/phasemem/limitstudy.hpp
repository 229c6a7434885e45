#pragma once

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasemem/solver.hpp"

namespace phasemem {

/// Components of the singular-limit error functional between a memory run and the limit run.
struct ErrorFunctional {
  double sup_V_accum = 0.0;  // max_n |(1*(theta_eps - theta))(t_n)|_V^2
  double sup_H_chi = 0.0;    // max_n |chi_eps - chi|_H^2
  double l2_V_chi = 0.0;     // sum_n dt |chi_eps - chi|_V^2
  double log_duality = 0.0;  // sum_n dt (ln theta_eps - ln theta, theta_eps - theta)_H
  double xi_duality = 0.0;   // sum_n dt (xi_eps - xi, chi_eps - chi)_H
  double total = 0.0;
};

/// Both trajectories must share mesh and time grid (PreconditionError otherwise).
ErrorFunctional compute_error_functional(const TrajectorySolution& sol_eps, const TrajectorySolution& sol_limit);

/// L2(Q) distance of the two temperature histories.
double theta_l2_distance(const TrajectorySolution& a, const TrajectorySolution& b);

struct SweepPlan {
  ProblemConfig base_config;               // kernel slot is overwritten per epsilon
  std::vector<double> epsilons{0.4, 0.2, 0.1, 0.05, 0.025};
  int parallelism = 1;
};

struct RateRow {
  double epsilon = 0.0;
  double l1_deviation = 0.0;
  ErrorFunctional error;
  double ratio = 0.0;
  double theta_l2 = 0.0;
};

struct RateReport {
  std::vector<RateRow> rows;
  double fitted_slope = 0.0;  // NaN when the sweep is degenerate (all errors zero)
  double ratio_max = 0.0;
  bool degenerate = false;
  double theta_min = 0.0;  // smallest temperature over the limit run and every epsilon run

  bool error_decreasing() const;
  bool ratio_bounded(double factor = 10.0) const;
  bool slope_ok(double threshold = 0.8) const;
  bool dualities_nonnegative() const;
};

/// Thrown when one run of a sweep fails; names the epsilon (0 for the limit run).
class SweepFailure : public std::runtime_error {
 public:
  SweepFailure(double epsilon, const std::string& what)
      : std::runtime_error(epsilon > 0.0 ? "sweep run at epsilon = " + std::to_string(epsilon) + " failed: " + what
                                         : "sweep limit run failed: " + what),
        epsilon_(epsilon) {}
  double epsilon() const noexcept { return epsilon_; }

 private:
  double epsilon_;
};

/// Throws PreconditionError unless epsilons are positive and strictly decreasing.
void validate(const SweepPlan& plan);

/// Limit run once, then one exponential-kernel run per epsilon (in parallel up to
/// plan.parallelism), error functionals and the log-log rate fit.
RateReport run_sweep(const SweepPlan& plan);

/// Least-squares slope of ln(error_total) against ln(l1_deviation). Needs >= 3 positive rows.
double fit_rate(std::span<const RateRow> rows);

}  // namespace phasemem
