#pragma once

#include <vector>

#include "phasemem/solver.hpp"

namespace phasemem {

/// Manufactured pair on [0, 1]:
///   theta(x, t) = 2 + theta_amplitude * sin(pi x) * (1 + t^2)
///   chi(x, t)   = 0.5 + chi_amplitude * cos(pi x) * cos(t)
/// The entropy source f and a phase-equation source are obtained by substitution.
struct ManufacturedOptions {
  double T = 0.5;
  double kappa0 = 1.0;
  /// Exponential kernel amplitude; 0 selects the memory-free problem.
  double kappa0_prime = 0.5;
  double timescale = 0.1;
  std::vector<double> lambda{0.0, 0.5};         // linear
  std::vector<double> sigma{0.0, -0.25, 0.5};   // quadratic
  double theta_amplitude = 0.5;
  double chi_amplitude = 0.25;

  std::vector<double> dt_levels{4e-3, 2e-3, 1e-3};
  int n_cells_for_time = 100;
  std::vector<int> n_cells_levels{50, 100, 200};
  double dt_for_space = 1e-3;

  double temporal_threshold = 0.9;
  double spatial_threshold = 1.9;
};

double manufactured_theta(const ManufacturedOptions& o, double x, double t);
double manufactured_chi(const ManufacturedOptions& o, double x, double t);

/// Configuration whose exact solution is the manufactured pair.
ProblemConfig manufactured_config(const ManufacturedOptions& o, int n_cells, double dt);

struct RefinementLevel {
  double dt = 0.0;
  int n_cells = 0;
  double theta_error = 0.0;  // max-norm error against the exact solution at T
  double chi_error = 0.0;
};

struct ManufacturedStudy {
  std::vector<RefinementLevel> time_levels;
  std::vector<RefinementLevel> space_levels;
  /// Richardson orders from differences of consecutive refinements.
  std::vector<double> temporal_orders_theta, temporal_orders_chi;
  std::vector<double> spatial_orders_theta, spatial_orders_chi;
  double temporal_order = 0.0;  // smallest of the above
  double spatial_order = 0.0;
  double theta_min = 0.0;  // smallest temperature over every run of the study

  bool passed(const ManufacturedOptions& o) const {
    return temporal_order >= o.temporal_threshold && spatial_order >= o.spatial_threshold;
  }
};

ManufacturedStudy run_manufactured_study(const ManufacturedOptions& o);

}  // namespace phasemem
