#pragma once

#include <span>
#include <vector>

#include "phasemem/functions.hpp"

namespace phasemem {

/// Uniform mesh of [x_lo, x_hi] with n_cells cells and n_cells + 1 nodes.
class Mesh1D {
 public:
  Mesh1D() = default;
  /// Throws DomainError unless x_lo < x_hi and n_cells >= 4.
  Mesh1D(double x_lo, double x_hi, int n_cells);

  double x_lo() const noexcept { return x_lo_; }
  double x_hi() const noexcept { return x_hi_; }
  int n_cells() const noexcept { return n_cells_; }
  std::size_t n_nodes() const noexcept { return static_cast<std::size_t>(n_cells_) + 1; }
  double h() const noexcept { return (x_hi_ - x_lo_) / n_cells_; }
  double length() const noexcept { return x_hi_ - x_lo_; }
  double node(std::size_t i) const noexcept {
    return i == n_nodes() - 1 ? x_hi_ : x_lo_ + static_cast<double>(i) * h();
  }
  std::vector<double> nodes() const;

  bool operator==(const Mesh1D&) const = default;

 private:
  double x_lo_ = 0.0;
  double x_hi_ = 1.0;
  int n_cells_ = 4;
};

/// Nodal samples on a mesh.
struct Field {
  Mesh1D mesh;
  std::vector<double> values;

  Field() = default;
  Field(const Mesh1D& m, std::vector<double> v);
  static Field constant(const Mesh1D& m, double c);
  static Field sample(const Mesh1D& m, const ScalarFunction& fn);
  template <class F>
  static Field from(const Mesh1D& m, F&& fn) {
    std::vector<double> v(m.n_nodes());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = fn(m.node(i));
    return Field(m, std::move(v));
  }

  std::size_t size() const noexcept { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// Dirichlet temperature trace at both ends of the interval, with its admissible band.
struct BoundaryTrace {
  ScalarFunction left = ConstantFn{1.0};
  ScalarFunction right = ConstantFn{1.0};
  double theta_min = 1.0;
  double theta_max = 1.0;

  double left_at(double t) const { return evaluate(left, t); }
  double right_at(double t) const { return evaluate(right, t); }
  /// Samples n_samples + 1 uniform times on [0, T]; true if every sample lies in the band.
  bool within_bounds(double T, int n_samples = 1000) const;
};

/// Interior second difference with boundary values replaced by bc_left / bc_right.
/// Boundary entries of the result are zero.
Field laplacian_dirichlet(const Field& field, double bc_left, double bc_right);

/// Second difference with reflecting ghost nodes (homogeneous Neumann).
Field laplacian_neumann(const Field& field);

/// Affine interpolant of the boundary values: the 1D harmonic extension.
Field harmonic_extension(const Mesh1D& mesh, double bc_left, double bc_right);

/// Trapezoid nodal weights.
std::vector<double> trapezoid_weights(const Mesh1D& mesh);

/// Forward-difference gradient, one value per cell.
std::vector<double> gradient(const Field& field);

double inner_H(const Field& f, const Field& g);
double norm_H(const Field& f);
/// Squared L2 norm of the cell gradient (sum over cells of h * g^2).
double gradient_norm2(const Field& f);
double norm_V(const Field& f);

/// Trapezoid integral of a field.
double integrate(const Field& f);

}  // namespace phasemem
