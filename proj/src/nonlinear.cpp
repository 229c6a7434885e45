#include "phasemem/nonlinear.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "phasemem/errors.hpp"

namespace phasemem {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double poly_value(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * x + *it;
  return acc;
}

double poly_derivative(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 1;) acc = acc * x + static_cast<double>(k) * c[k];
  return acc;
}

// Antiderivative vanishing at 0.
double poly_antiderivative(const std::vector<double>& c, double x) {
  double acc = 0.0;
  for (std::size_t k = c.size(); k-- > 0;) acc = acc * x + c[k] / static_cast<double>(k + 1);
  return acc * x;
}

// Solves x + mu p(x) = r for an odd polynomial with nonnegative coefficients.
// The root lies between 0 and r; Newton steps that leave the bracket fall back to bisection.
double odd_poly_resolvent(const OddPolynomial& p, double mu, double r) {
  if (r == 0.0) return 0.0;
  double lo = std::min(0.0, r);
  double hi = std::max(0.0, r);
  double x = r / (1.0 + mu * std::max(poly_derivative(p.coefficients, 0.0), 0.0));
  const double tol = 1e-12 * (1.0 + std::abs(r));
  for (int it = 0; it < 200; ++it) {
    const double f = x + mu * poly_value(p.coefficients, x) - r;
    if (std::abs(f) <= tol) return x;
    if (f > 0.0) hi = x; else lo = x;
    const double df = 1.0 + mu * poly_derivative(p.coefficients, x);
    double next = x - f / df;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (next == x) return x;
    x = next;
  }
  throw NumericError("odd polynomial resolvent did not converge");
}

}  // namespace

MonotoneGraph MonotoneGraph::zero() { return MonotoneGraph(ZeroGraph{}); }

MonotoneGraph MonotoneGraph::box(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(lo < hi)) {
    throw DomainError("box graph needs finite lo < hi");
  }
  if (lo > 0.0 || hi < 0.0) throw DomainError("box graph needs lo <= 0 <= hi");
  return MonotoneGraph(BoxIndicator{lo, hi});
}

MonotoneGraph MonotoneGraph::odd_polynomial(std::vector<double> coefficients) {
  bool any = false;
  for (std::size_t k = 0; k < coefficients.size(); ++k) {
    const double c = coefficients[k];
    if (!std::isfinite(c)) throw DomainError("odd polynomial coefficients must be finite");
    if (k % 2 == 0 && c != 0.0) throw DomainError("odd polynomial may only contain odd powers");
    if (c < 0.0) throw DomainError("odd polynomial coefficients must be nonnegative");
    any = any || c > 0.0;
  }
  if (!any) throw DomainError("odd polynomial must have a positive coefficient");
  while (coefficients.back() == 0.0) coefficients.pop_back();
  return MonotoneGraph(OddPolynomial{std::move(coefficients)});
}

std::string MonotoneGraph::kind() const {
  switch (graph_.index()) {
    case 0: return "zero";
    case 1: return "box";
    default: return "odd_poly";
  }
}

SmoothNonlinearity::SmoothNonlinearity(std::vector<double> coefficients) : coeffs_(std::move(coefficients)) {
  if (coeffs_.size() > 4) throw DomainError("smooth nonlinearities are limited to degree 3");
  for (double c : coeffs_) {
    if (!std::isfinite(c)) throw DomainError("nonlinearity coefficients must be finite");
  }
}

double SmoothNonlinearity::value(double r) const { return poly_value(coeffs_, r); }

double SmoothNonlinearity::derivative(double r) const { return poly_derivative(coeffs_, r); }

double SmoothNonlinearity::second_derivative(double r) const {
  double acc = 0.0;
  for (std::size_t k = coeffs_.size(); k-- > 2;) acc = acc * r + static_cast<double>(k * (k - 1)) * coeffs_[k];
  return acc;
}

double SmoothNonlinearity::lipschitz_of_derivative(double radius) const {
  // p'' is affine, so its maximum modulus on a symmetric interval sits at an endpoint.
  return std::max(std::abs(second_derivative(-radius)), std::abs(second_derivative(radius)));
}

double beta_hat_value(const MonotoneGraph& g, double r) {
  return std::visit(
      [r](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ZeroGraph>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, BoxIndicator>) {
          return (r >= v.lo && r <= v.hi) ? 0.0 : kInf;
        } else {
          return poly_antiderivative(v.coefficients, r);
        }
      },
      g.variant());
}

double resolvent(const MonotoneGraph& g, double mu, double r) {
  if (!(mu > 0.0)) throw DomainError("resolvent needs mu > 0");
  return std::visit(
      [mu, r](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ZeroGraph>) {
          return r;
        } else if constexpr (std::is_same_v<T, BoxIndicator>) {
          return std::clamp(r, v.lo, v.hi);
        } else {
          return odd_poly_resolvent(v, mu, r);
        }
      },
      g.variant());
}

double yosida(const MonotoneGraph& g, double mu, double r) {
  return (r - resolvent(g, mu, r)) / mu;
}

double yosida_derivative(const MonotoneGraph& g, double mu, double r) {
  if (!(mu > 0.0)) throw DomainError("yosida_derivative needs mu > 0");
  return std::visit(
      [mu, r](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ZeroGraph>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, BoxIndicator>) {
          return (r < v.lo || r > v.hi) ? 1.0 / mu : 0.0;
        } else {
          const double x = odd_poly_resolvent(v, mu, r);
          const double dp = poly_derivative(v.coefficients, x);
          return dp / (1.0 + mu * dp);
        }
      },
      g.variant());
}

double yosida_potential(const MonotoneGraph& g, double mu, double r) {
  const double j = resolvent(g, mu, r);
  return beta_hat_value(g, j) + (r - j) * (r - j) / (2.0 * mu);
}

double psi_value(double r) {
  if (r < 0.0) return kInf;
  if (r == 0.0) return 0.0;
  return r * (std::log(r) - 1.0);
}

double solve_scalar_log(double a, double c, double b, int max_iters) {
  if (!(a > 0.0) || !std::isfinite(a)) throw DomainError("solve_scalar_log needs a > 0");
  if (!(c >= 0.0) || !std::isfinite(c)) throw DomainError("solve_scalar_log needs c >= 0");
  if (!std::isfinite(b)) throw DomainError("solve_scalar_log needs finite b");

  // The root satisfies ln(theta) <= b/a, and theta <= max(1, b/c).
  double log_hi = b / a;
  if (c > 0.0 && b > 0.0) log_hi = std::min(log_hi, std::max(0.0, std::log(b / c)));
  if (log_hi > 709.0) throw NumericError("solve_scalar_log: root overflows");
  if (c == 0.0) {
    const double theta = std::exp(log_hi);
    if (!(theta > 0.0)) throw NumericError("solve_scalar_log: root underflows");
    return theta;
  }

  const auto g = [&](double th) { return a * std::log(th) + c * th - b; };
  const double tol = 1e-12 * (1.0 + std::abs(b));
  double hi = std::exp(log_hi);
  if (!(hi > 0.0)) throw NumericError("solve_scalar_log: root underflows");
  double lo = 0.0;  // g(lo) < 0 whenever lo > 0
  double theta = hi;
  for (int it = 0; it < max_iters; ++it) {
    const double r = g(theta);
    if (std::abs(r) <= tol) return theta;
    if (r > 0.0) hi = theta; else lo = theta;
    const double step = -r / (a / theta + c);
    double next = theta + step;
    // Positivity line search: halve the step until the iterate stays positive.
    for (int h = 0; h < 60 && !(next > 0.0); ++h) next = theta + step * std::ldexp(1.0, -(h + 1));
    if (!(next > lo && next < hi)) {
      next = lo > 0.0 ? std::sqrt(lo * hi) : 0.5 * hi;
    }
    if (next == theta) return theta;
    theta = next;
  }
  throw NumericError("solve_scalar_log did not converge");
}

}  // namespace phasemem
