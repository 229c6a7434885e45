#pragma once

#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "phasemem/grid.hpp"
#include "phasemem/kernel.hpp"
#include "phasemem/nonlinear.hpp"

namespace phasemem {

/// Space-time source f(x, t).
class SourceTerm {
 public:
  using Fn = std::function<double(double x, double t)>;

  SourceTerm() = default;
  static SourceTerm zero();
  static SourceTerm separable(ScalarFunction space, ScalarFunction time);
  /// Bilinear interpolation of values[it][ix] on the (times, xs) grid, clamped outside it.
  static SourceTerm tabulated(std::vector<double> times, std::vector<double> xs,
                              std::vector<std::vector<double>> values);
  static SourceTerm custom(Fn fn, std::string label = "custom");

  double operator()(double x, double t) const { return fn_ ? fn_(x, t) : 0.0; }
  bool is_zero() const noexcept { return !fn_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  Fn fn_;
  std::string kind_ = "zero";
};

struct NewtonSettings {
  int max_iters = 50;
  double tol = 1e-10;  // max-norm of the nodal residual
  int max_halvings = 40;
};

struct ProblemConfig {
  Mesh1D mesh;
  double T = 1.0;
  double dt = 1e-3;
  double kappa0 = 1.0;
  double kappa0_prime = 0.0;
  MemoryKernel kernel;
  SmoothNonlinearity lambda;
  SmoothNonlinearity sigma;
  MonotoneGraph beta;
  double mu = 1e-3;
  SourceTerm source;
  /// Extra right-hand side of the phase equation. Zero except in manufactured-solution runs.
  SourceTerm phase_source;
  BoundaryTrace theta_bc;
  Field theta0;
  Field chi0;
  NewtonSettings newton;

  int n_steps() const;
  double kappa() const noexcept { return kappa0 + kappa0_prime; }
};

/// A violated structural or data hypothesis, tagged with the hypothesis label and the
/// offending configuration field.
class HypothesisViolation : public std::invalid_argument {
 public:
  HypothesisViolation(std::string label, std::string field, const std::string& detail)
      : std::invalid_argument(field + ": (" + label + "): " + detail),
        label_(std::move(label)),
        field_(std::move(field)) {}

  const std::string& label() const noexcept { return label_; }
  const std::string& field() const noexcept { return field_; }

 private:
  std::string label_;
  std::string field_;
};

/// Throws HypothesisViolation (or PreconditionError for discretization parameters).
void validate(const ProblemConfig& cfg);

/// Memory-free problem with diffusivity kappa0 + kappa0_prime, solved by the same code path.
ProblemConfig limit_config(const ProblemConfig& cfg);

struct StepStats {
  int phase_iterations = 0;
  int temperature_iterations = 0;
  int halvings = 0;
};

struct TrajectorySolution {
  std::vector<double> times;
  std::vector<Field> theta;
  std::vector<Field> chi;
  std::vector<Field> xi;
  MemoryState memory;
  std::vector<StepStats> newton;

  std::size_t n_steps() const noexcept { return times.empty() ? 0 : times.size() - 1; }
};

struct PhaseStepResult {
  Field chi;
  Field xi;
  int iterations = 0;
};

struct TemperatureStepResult {
  Field theta;
  MemoryState memory;
  int iterations = 0;
  int halvings = 0;
};

/// Implicit phase step with the temperature and smooth couplings lagged at t_n.
PhaseStepResult step_phase(const ProblemConfig& cfg, const Field& theta_n, const Field& chi_n, double t_next,
                           int step_index = 0);

/// Implicit temperature step (ln theta kept as the primal nonlinearity), with the current
/// convolution weight treated implicitly; advances the memory state.
TemperatureStepResult step_temperature(const ProblemConfig& cfg, const Field& theta_n, const Field& chi_n,
                                       const Field& chi_next, const MemoryState& memory, double t_next,
                                       int step_index = 0);

/// Phase step then temperature step, for T/dt steps. Propagates StepFailure with the step index.
TrajectorySolution run(const ProblemConfig& cfg);

struct ResidualReport {
  double entropy_residual = 0.0;
  double phase_residual = 0.0;
  double energy_identity_gap = 0.0;
  /// Sum over steps of dt * integral of (kappa0 |grad u|^2 + grad(k*u) . grad u), u = theta - theta_H.
  double kernel_form = 0.0;
};

/// Re-evaluates every stepped equation against the stored fields and the discrete energy identity.
ResidualReport entropy_residual(const ProblemConfig& cfg, const TrajectorySolution& sol);

/// Solves the tridiagonal system (sub, diag, sup) x = rhs in place; rhs becomes x.
void solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                       std::vector<double>& rhs);

}  // namespace phasemem
