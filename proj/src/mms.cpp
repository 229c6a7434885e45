#include "phasemem/mms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "phasemem/errors.hpp"

namespace phasemem {

namespace {

constexpr double kPi = std::numbers::pi;

double q(double t) { return 1.0 + t * t; }
double dq(double t) { return 2.0 * t; }

// (k*q)(t) for k(u) = (a/eps) exp(-u/eps), from the moments of the kernel.
double kernel_conv_q(double a, double eps, double t) {
  if (a == 0.0) return 0.0;
  const double e = std::exp(-t / eps);
  const double i0 = -std::expm1(-t / eps);
  const double i1 = eps * i0 - t * e;
  const double i2 = 2.0 * eps * i1 - t * t * e;
  return a * ((1.0 + t * t) * i0 - 2.0 * t * i1 + i2);
}

double max_diff(const Field& a, const Field& b, std::size_t stride_a, std::size_t stride_b) {
  double m = 0.0;
  const std::size_t n = (a.size() - 1) / stride_a + 1;
  for (std::size_t k = 0; k < n; ++k) m = std::max(m, std::abs(a[k * stride_a] - b[k * stride_b]));
  return m;
}

double min_theta(const TrajectorySolution& s) {
  double m = s.theta.front()[0];
  for (const auto& f : s.theta)
    for (double v : f.values) m = std::min(m, v);
  return m;
}

double exact_error(const ManufacturedOptions& o, const Field& f, bool theta) {
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const double x = f.mesh.node(i);
    const double ex = theta ? manufactured_theta(o, x, o.T) : manufactured_chi(o, x, o.T);
    m = std::max(m, std::abs(f[i] - ex));
  }
  return m;
}

}  // namespace

double manufactured_theta(const ManufacturedOptions& o, double x, double t) {
  return 2.0 + o.theta_amplitude * std::sin(kPi * x) * q(t);
}

double manufactured_chi(const ManufacturedOptions& o, double x, double t) {
  return 0.5 + o.chi_amplitude * std::cos(kPi * x) * std::cos(t);
}

ProblemConfig manufactured_config(const ManufacturedOptions& o, int n_cells, double dt) {
  ProblemConfig cfg;
  cfg.mesh = Mesh1D(0.0, 1.0, n_cells);
  cfg.T = o.T;
  cfg.dt = dt;
  cfg.kappa0 = o.kappa0;
  cfg.kappa0_prime = o.kappa0_prime;
  cfg.kernel = o.kappa0_prime > 0.0 ? MemoryKernel::exponential(o.kappa0_prime, o.timescale) : MemoryKernel::zero();
  cfg.lambda = SmoothNonlinearity(o.lambda);
  cfg.sigma = SmoothNonlinearity(o.sigma);
  cfg.beta = MonotoneGraph::zero();
  cfg.mu = dt;

  const double a = o.kappa0_prime;
  const double eps = o.timescale;
  const double A = o.theta_amplitude;
  const double B = o.chi_amplitude;
  const SmoothNonlinearity lambda(o.lambda);
  const SmoothNonlinearity sigma(o.sigma);
  const double kappa0 = o.kappa0;

  cfg.source = SourceTerm::custom(
      [=](double x, double t) {
        const double s = std::sin(kPi * x);
        const double theta = 2.0 + A * s * q(t);
        const double theta_t = A * s * dq(t);
        const double chi = 0.5 + B * std::cos(kPi * x) * std::cos(t);
        const double chi_t = -B * std::cos(kPi * x) * std::sin(t);
        const double lap_theta = -A * kPi * kPi * s * q(t);
        const double lap_memory = -A * kPi * kPi * s * kernel_conv_q(a, eps, t);
        return theta_t / theta + lambda.derivative(chi) * chi_t - kappa0 * lap_theta - lap_memory;
      },
      "manufactured");
  cfg.phase_source = SourceTerm::custom(
      [=](double x, double t) {
        const double c = std::cos(kPi * x);
        const double theta = 2.0 + A * std::sin(kPi * x) * q(t);
        const double chi = 0.5 + B * c * std::cos(t);
        const double chi_t = -B * c * std::sin(t);
        const double lap_chi = -B * kPi * kPi * c * std::cos(t);
        return chi_t - lap_chi + sigma.derivative(chi) - lambda.derivative(chi) * theta;
      },
      "manufactured");

  cfg.theta_bc.left = ConstantFn{2.0};
  cfg.theta_bc.right = ConstantFn{2.0};
  cfg.theta_bc.theta_min = 1.0;
  cfg.theta_bc.theta_max = 2.0 + 2.0 * std::abs(A) * q(o.T);
  cfg.theta0 = Field::from(cfg.mesh, [&](double x) { return manufactured_theta(o, x, 0.0); });
  cfg.chi0 = Field::from(cfg.mesh, [&](double x) { return manufactured_chi(o, x, 0.0); });
  return cfg;
}

ManufacturedStudy run_manufactured_study(const ManufacturedOptions& o) {
  if (o.dt_levels.size() < 3 || o.n_cells_levels.size() < 3) {
    throw PreconditionError("manufactured study needs at least three refinement levels per direction");
  }
  ManufacturedStudy st;

  std::vector<TrajectorySolution> tsols;
  for (double dt : o.dt_levels) {
    tsols.push_back(run(manufactured_config(o, o.n_cells_for_time, dt)));
    const auto& s = tsols.back();
    st.time_levels.push_back({dt, o.n_cells_for_time, exact_error(o, s.theta.back(), true),
                              exact_error(o, s.chi.back(), false)});
  }
  for (std::size_t k = 0; k + 2 < tsols.size(); ++k) {
    const double r = std::log(o.dt_levels[k] / o.dt_levels[k + 1]);
    const auto order = [&](auto get) {
      const double d1 = max_diff(get(tsols[k]), get(tsols[k + 1]), 1, 1);
      const double d2 = max_diff(get(tsols[k + 1]), get(tsols[k + 2]), 1, 1);
      return std::log(d1 / d2) / r;
    };
    st.temporal_orders_theta.push_back(order([](const TrajectorySolution& s) -> const Field& { return s.theta.back(); }));
    st.temporal_orders_chi.push_back(order([](const TrajectorySolution& s) -> const Field& { return s.chi.back(); }));
  }

  std::vector<TrajectorySolution> xsols;
  for (int nc : o.n_cells_levels) {
    xsols.push_back(run(manufactured_config(o, nc, o.dt_for_space)));
    const auto& s = xsols.back();
    st.space_levels.push_back({o.dt_for_space, nc, exact_error(o, s.theta.back(), true),
                               exact_error(o, s.chi.back(), false)});
  }
  for (std::size_t k = 0; k + 2 < xsols.size(); ++k) {
    const int n0 = o.n_cells_levels[k], n1 = o.n_cells_levels[k + 1], n2 = o.n_cells_levels[k + 2];
    if (n1 % n0 != 0 || n2 % n0 != 0) throw PreconditionError("spatial levels must be nested");
    const double r = std::log(static_cast<double>(n1) / n0);
    const auto order = [&](auto get) {
      const double d1 = max_diff(get(xsols[k]), get(xsols[k + 1]), 1, n1 / n0);
      const double d2 = max_diff(get(xsols[k + 1]), get(xsols[k + 2]), n1 / n0, n2 / n0);
      return std::log(d1 / d2) / r;
    };
    st.spatial_orders_theta.push_back(order([](const TrajectorySolution& s) -> const Field& { return s.theta.back(); }));
    st.spatial_orders_chi.push_back(order([](const TrajectorySolution& s) -> const Field& { return s.chi.back(); }));
  }

  auto min_of = [](const std::vector<double>& a, const std::vector<double>& b) {
    return std::min(*std::min_element(a.begin(), a.end()), *std::min_element(b.begin(), b.end()));
  };
  st.theta_min = min_theta(tsols.front());
  for (const auto& s : tsols) st.theta_min = std::min(st.theta_min, min_theta(s));
  for (const auto& s : xsols) st.theta_min = std::min(st.theta_min, min_theta(s));
  st.temporal_order = min_of(st.temporal_orders_theta, st.temporal_orders_chi);
  st.spatial_order = min_of(st.spatial_orders_theta, st.spatial_orders_chi);
  return st;
}

}  // namespace phasemem
