#pragma once

#include <span>
#include <variant>
#include <vector>

namespace phasemem {

struct ZeroKernel {};

/// k(t) = (amplitude / timescale) * exp(-t / timescale).
struct ExponentialKernel {
  double amplitude;
  double timescale;
};

/// Piecewise-linear kernel through (times[i], values[i]); held constant past the last sample.
struct TabulatedKernel {
  std::vector<double> times;
  std::vector<double> values;
};

/// Memory kernel of the heat-flux convolution term. Immutable once built.
class MemoryKernel {
 public:
  using Variant = std::variant<ZeroKernel, ExponentialKernel, TabulatedKernel>;

  MemoryKernel() = default;

  static MemoryKernel zero();
  /// Throws DomainError unless amplitude > 0 and timescale > 0.
  static MemoryKernel exponential(double amplitude, double timescale);
  /// Throws DomainError unless times start at 0, increase strictly and all samples are finite.
  static MemoryKernel tabulated(std::vector<double> times, std::vector<double> values);

  const Variant& variant() const noexcept { return kernel_; }
  bool is_zero() const noexcept { return std::holds_alternative<ZeroKernel>(kernel_); }
  bool is_exponential() const noexcept { return std::holds_alternative<ExponentialKernel>(kernel_); }
  bool is_tabulated() const noexcept { return std::holds_alternative<TabulatedKernel>(kernel_); }
  const ExponentialKernel& as_exponential() const;
  const TabulatedKernel& as_tabulated() const;

 private:
  explicit MemoryKernel(Variant v) : kernel_(std::move(v)) {}
  Variant kernel_{ZeroKernel{}};
};

struct KernelReport {
  double l1_norm = 0.0;
  double l1_deviation = 0.0;
  bool positive_type_sufficient = false;
  double coercivity_estimate = 0.0;
};

double eval_kernel(const MemoryKernel& k, double t);

/// (1*k)(t), the integral of k over [0, t].
double cumulative_kernel(const MemoryKernel& k, double t);

/// Integral over [0, T] of |(1*k)(t) - kappa0_prime|. Closed form for an exponential
/// kernel whose amplitude equals kappa0_prime, trapezoid quadrature on n_points otherwise.
double l1_deviation(const MemoryKernel& k, double kappa0_prime, double T, int n_points = 10000);

/// Integral over [0, T] of |k(t)|.
double l1_norm(const MemoryKernel& k, double T, int n_points = 10000);

/// Nonnegative, non-increasing and convex. Exact for Zero/Exponential, sampled for Tabulated.
bool check_positive_type_sufficient(const MemoryKernel& k);

struct CoercivityOptions {
  double rel_tol = 1e-8;
  int max_sweeps = 100;
};

/// Smallest eigenvalue of kappa0*I + (K + K^T)/2 where K is the trapezoid convolution
/// matrix on t_i = i*T/n_grid, i = 1..n_grid (v(0) = 0). Cyclic Jacobi eigen-iteration;
/// throws NumericError when max_sweeps is exhausted.
double estimate_coercivity_constant(const MemoryKernel& k, double kappa0, double T, int n_grid,
                                    const CoercivityOptions& opts = {});

/// Symmetric matrix whose smallest eigenvalue is the discrete coercivity constant (row-major).
std::vector<double> coercivity_matrix(const MemoryKernel& k, double kappa0, double T, int n_grid);

KernelReport make_kernel_report(const MemoryKernel& k, double kappa0, double kappa0_prime, double T,
                                int n_grid = 128);

// ---------------------------------------------------------------------------
// Convolution state

/// Running (k*theta)(t_n) per node for exponential kernels, advanced in O(N) per step.
struct ExponentialRecursion {
  std::vector<double> weights;
};

/// Every nodal snapshot theta^0..theta^n, for general kernels.
struct FullHistory {
  std::vector<std::vector<double>> snapshots;
};

struct MemoryState {
  std::variant<ExponentialRecursion, FullHistory> mode;
  double last_time = 0.0;

  static MemoryState exponential(std::size_t n_nodes);
  static MemoryState full_history(std::span<const double> theta0);
  static MemoryState for_kernel(const MemoryKernel& k, std::span<const double> theta0);

  bool is_recursion() const noexcept { return std::holds_alternative<ExponentialRecursion>(mode); }
};

/// Composite-trapezoid (k*theta)(t_n) from the stored snapshots spaced dt apart.
std::vector<double> convolve_history(const MemoryKernel& k, const FullHistory& history, double dt);

/// Coefficients of one exact step of the exponential recursion:
///   w_new = decay * w_old + weight_new * theta_new + weight_old * theta_old
/// for theta linear across the step.
struct ExponentialStepWeights {
  double decay;
  double weight_new;
  double weight_old;
};

ExponentialStepWeights exponential_step_weights(const ExponentialKernel& k, double dt);

/// Throws PreconditionError if the state is not a recursion or the kernel is not exponential.
MemoryState advance_exponential_memory(const MemoryState& state, const MemoryKernel& k,
                                       std::span<const double> theta_old,
                                       std::span<const double> theta_new, double dt);

/// (k*theta)(t_{n+1}) split as implicit * theta_{n+1} + explicit_part, given the state at t_n.
struct ConvolutionSplit {
  double implicit = 0.0;
  std::vector<double> explicit_part;

  std::vector<double> value(std::span<const double> theta_next) const;
};

ConvolutionSplit split_convolution(const MemoryKernel& k, const MemoryState& state,
                                   std::span<const double> theta_n, double dt);

/// Advances either memory mode by one step (a no-op on the weights for the zero kernel).
MemoryState advance_memory(const MemoryKernel& k, const MemoryState& state, std::span<const double> theta_n,
                           std::span<const double> theta_next, double dt);

}  // namespace phasemem
