#include "phasemem/grid.hpp"

#include <cmath>
#include <string>

#include "phasemem/errors.hpp"

namespace phasemem {

double evaluate(const ScalarFunction& fn, double s) {
  return std::visit(
      [s](const auto& f) -> double {
        using T = std::decay_t<decltype(f)>;
        if constexpr (std::is_same_v<T, ConstantFn>) {
          return f.value;
        } else if constexpr (std::is_same_v<T, LinearFn>) {
          return f.a + f.b * s;
        } else if constexpr (std::is_same_v<T, PolynomialFn>) {
          double acc = 0.0;
          for (auto it = f.coefficients.rbegin(); it != f.coefficients.rend(); ++it) acc = acc * s + *it;
          return acc;
        } else {
          return f.offset + f.amplitude * std::sin(f.wavenumber * s + f.phase);
        }
      },
      fn);
}

Mesh1D::Mesh1D(double x_lo, double x_hi, int n_cells) : x_lo_(x_lo), x_hi_(x_hi), n_cells_(n_cells) {
  if (!std::isfinite(x_lo) || !std::isfinite(x_hi) || !(x_lo < x_hi)) {
    throw DomainError("mesh needs finite x_lo < x_hi");
  }
  if (n_cells < 4) throw DomainError("mesh needs at least 4 cells, got " + std::to_string(n_cells));
}

std::vector<double> Mesh1D::nodes() const {
  std::vector<double> x(n_nodes());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = node(i);
  return x;
}

Field::Field(const Mesh1D& m, std::vector<double> v) : mesh(m), values(std::move(v)) {
  if (values.size() != mesh.n_nodes()) {
    throw PreconditionError("field length " + std::to_string(values.size()) + " does not match mesh (" +
                            std::to_string(mesh.n_nodes()) + " nodes)");
  }
}

Field Field::constant(const Mesh1D& m, double c) { return Field(m, std::vector<double>(m.n_nodes(), c)); }

Field Field::sample(const Mesh1D& m, const ScalarFunction& fn) {
  return from(m, [&fn](double x) { return evaluate(fn, x); });
}

bool BoundaryTrace::within_bounds(double T, int n_samples) const {
  for (int k = 0; k <= n_samples; ++k) {
    const double t = T * k / n_samples;
    const double l = left_at(t);
    const double r = right_at(t);
    if (!(l >= theta_min && l <= theta_max && r >= theta_min && r <= theta_max)) return false;
  }
  return true;
}

Field laplacian_dirichlet(const Field& field, double bc_left, double bc_right) {
  const auto& v = field.values;
  const std::size_t n = v.size();
  const double inv_h2 = 1.0 / (field.mesh.h() * field.mesh.h());
  std::vector<double> out(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double left = (i == 1) ? bc_left : v[i - 1];
    const double right = (i + 2 == n) ? bc_right : v[i + 1];
    out[i] = (left - 2.0 * v[i] + right) * inv_h2;
  }
  return Field(field.mesh, std::move(out));
}

Field laplacian_neumann(const Field& field) {
  const auto& v = field.values;
  const std::size_t n = v.size();
  const double inv_h2 = 1.0 / (field.mesh.h() * field.mesh.h());
  std::vector<double> out(n);
  out[0] = 2.0 * (v[1] - v[0]) * inv_h2;
  out[n - 1] = 2.0 * (v[n - 2] - v[n - 1]) * inv_h2;
  for (std::size_t i = 1; i + 1 < n; ++i) out[i] = (v[i - 1] - 2.0 * v[i] + v[i + 1]) * inv_h2;
  return Field(field.mesh, std::move(out));
}

Field harmonic_extension(const Mesh1D& mesh, double bc_left, double bc_right) {
  const double len = mesh.length();
  return Field::from(mesh, [&](double x) {
    const double s = (x - mesh.x_lo()) / len;
    return (1.0 - s) * bc_left + s * bc_right;
  });
}

std::vector<double> trapezoid_weights(const Mesh1D& mesh) {
  std::vector<double> w(mesh.n_nodes(), mesh.h());
  w.front() *= 0.5;
  w.back() *= 0.5;
  return w;
}

std::vector<double> gradient(const Field& field) {
  const double h = field.mesh.h();
  std::vector<double> g(field.size() - 1);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = (field[i + 1] - field[i]) / h;
  return g;
}

namespace {
void require_same_mesh(const Field& f, const Field& g) {
  if (!(f.mesh == g.mesh) || f.size() != g.size()) throw PreconditionError("fields live on different meshes");
}
}  // namespace

double inner_H(const Field& f, const Field& g) {
  require_same_mesh(f, g);
  const double h = f.mesh.h();
  const std::size_t n = f.size();
  double acc = 0.5 * (f[0] * g[0] + f[n - 1] * g[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) acc += f[i] * g[i];
  return acc * h;
}

double norm_H(const Field& f) { return std::sqrt(inner_H(f, f)); }

double gradient_norm2(const Field& f) {
  const double h = f.mesh.h();
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < f.size(); ++i) {
    const double d = f[i + 1] - f[i];
    acc += d * d;
  }
  return acc / h;
}

double norm_V(const Field& f) { return std::sqrt(inner_H(f, f) + gradient_norm2(f)); }

double integrate(const Field& f) {
  const std::size_t n = f.size();
  double acc = 0.5 * (f[0] + f[n - 1]);
  for (std::size_t i = 1; i + 1 < n; ++i) acc += f[i];
  return acc * f.mesh.h();
}

}  // namespace phasemem
