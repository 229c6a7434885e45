#pragma once

#include <string>
#include <variant>
#include <vector>

namespace phasemem {

struct ZeroGraph {};

/// Subdifferential of the indicator of [lo, hi]; requires lo <= 0 <= hi.
struct BoxIndicator {
  double lo;
  double hi;
};

/// beta(x) = sum_k coefficients[k] * x^k with only odd powers and nonnegative coefficients.
struct OddPolynomial {
  std::vector<double> coefficients;
};

/// Maximal monotone graph beta = d(beta_hat) with beta_hat >= 0 and beta_hat(0) = 0.
class MonotoneGraph {
 public:
  using Variant = std::variant<ZeroGraph, BoxIndicator, OddPolynomial>;

  MonotoneGraph() = default;

  static MonotoneGraph zero();
  /// Throws DomainError unless lo < hi and lo <= 0 <= hi.
  static MonotoneGraph box(double lo, double hi);
  /// Throws DomainError for even powers, negative coefficients or an all-zero polynomial.
  static MonotoneGraph odd_polynomial(std::vector<double> coefficients);

  const Variant& variant() const noexcept { return graph_; }
  std::string kind() const;

 private:
  explicit MonotoneGraph(Variant v) : graph_(std::move(v)) {}
  Variant graph_{ZeroGraph{}};
};

/// Polynomial of degree <= 3, ascending coefficients. Used for lambda and sigma.
class SmoothNonlinearity {
 public:
  SmoothNonlinearity() = default;
  explicit SmoothNonlinearity(std::vector<double> coefficients);

  static SmoothNonlinearity zero() { return SmoothNonlinearity(); }

  double value(double r) const;
  double derivative(double r) const;
  double second_derivative(double r) const;
  /// Lipschitz constant of the derivative on [-radius, radius].
  double lipschitz_of_derivative(double radius) const;

  const std::vector<double>& coefficients() const noexcept { return coeffs_; }

 private:
  std::vector<double> coeffs_;
};

/// beta_hat(r); +infinity outside the box.
double beta_hat_value(const MonotoneGraph& g, double r);

/// (I + mu*beta)^{-1}(r).
double resolvent(const MonotoneGraph& g, double mu, double r);

/// beta_mu(r) = (r - resolvent(r)) / mu.
double yosida(const MonotoneGraph& g, double mu, double r);

/// d/dr beta_mu(r), the Newton Jacobian entry of the phase step.
double yosida_derivative(const MonotoneGraph& g, double mu, double r);

/// Moreau envelope beta_hat(J r) + (r - J r)^2 / (2 mu) with J the resolvent; the
/// potential whose derivative is beta_mu.
double yosida_potential(const MonotoneGraph& g, double mu, double r);

/// psi(r) = r (ln r - 1), psi(0) = 0, +infinity for r < 0.
double psi_value(double r);

/// Unique theta > 0 with a ln(theta) + c theta = b. Throws NumericError on overflow or
/// when the iteration cap is exhausted.
double solve_scalar_log(double a, double c, double b, int max_iters = 200);

}  // namespace phasemem
