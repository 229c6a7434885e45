#include "phasemem/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <string>

#include "phasemem/errors.hpp"

namespace phasemem {

// ---------------------------------------------------------------------------
// Source terms

SourceTerm SourceTerm::zero() { return SourceTerm(); }

SourceTerm SourceTerm::separable(ScalarFunction space, ScalarFunction time) {
  SourceTerm s;
  s.fn_ = [space = std::move(space), time = std::move(time)](double x, double t) {
    return evaluate(space, x) * evaluate(time, t);
  };
  s.kind_ = "separable";
  return s;
}

SourceTerm SourceTerm::tabulated(std::vector<double> times, std::vector<double> xs,
                                 std::vector<std::vector<double>> values) {
  if (times.empty() || xs.empty() || values.size() != times.size()) {
    throw PreconditionError("tabulated source needs one row of values per time");
  }
  for (const auto& row : values) {
    if (row.size() != xs.size()) throw PreconditionError("tabulated source rows must match the x grid");
  }
  if (!std::is_sorted(times.begin(), times.end()) || !std::is_sorted(xs.begin(), xs.end())) {
    throw PreconditionError("tabulated source grids must be increasing");
  }
  SourceTerm s;
  s.fn_ = [times = std::move(times), xs = std::move(xs), values = std::move(values)](double x, double t) {
    auto locate = [](const std::vector<double>& g, double v, std::size_t& i, double& w) {
      if (g.size() == 1 || v <= g.front()) { i = 0; w = 0.0; return; }
      if (v >= g.back()) { i = g.size() - 2; w = 1.0; return; }
      i = static_cast<std::size_t>(std::upper_bound(g.begin(), g.end(), v) - g.begin()) - 1;
      w = (v - g[i]) / (g[i + 1] - g[i]);
    };
    std::size_t it = 0, ix = 0;
    double wt = 0.0, wx = 0.0;
    locate(times, t, it, wt);
    locate(xs, x, ix, wx);
    const std::size_t it1 = std::min(it + 1, times.size() - 1);
    const std::size_t ix1 = std::min(ix + 1, xs.size() - 1);
    const double a = (1 - wx) * values[it][ix] + wx * values[it][ix1];
    const double b = (1 - wx) * values[it1][ix] + wx * values[it1][ix1];
    return (1 - wt) * a + wt * b;
  };
  s.kind_ = "tabulated";
  return s;
}

SourceTerm SourceTerm::custom(Fn fn, std::string label) {
  SourceTerm s;
  s.fn_ = std::move(fn);
  s.kind_ = std::move(label);
  return s;
}

// ---------------------------------------------------------------------------
// Configuration checks

int ProblemConfig::n_steps() const { return static_cast<int>(std::llround(T / dt)); }

void validate(const ProblemConfig& cfg) {
  if (!(cfg.T > 0.0) || !std::isfinite(cfg.T)) throw PreconditionError("time.T: final time must be positive");
  if (!(cfg.dt > 0.0) || !std::isfinite(cfg.dt)) throw PreconditionError("time.dt: step must be positive");
  const double steps = cfg.T / cfg.dt;
  if (std::abs(steps - std::round(steps)) > 1e-9 * std::max(1.0, steps)) {
    throw PreconditionError("time: T/dt must be an integer number of steps");
  }
  if (!(cfg.mu > 0.0)) throw PreconditionError("mu: Yosida parameter must be positive");
  if (cfg.newton.max_iters < 1 || !(cfg.newton.tol > 0.0) || cfg.newton.max_halvings < 0) {
    throw PreconditionError("newton: need max_iters >= 1, tol > 0, max_halvings >= 0");
  }

  if (!(cfg.kappa0 > 0.0)) {
    throw HypothesisViolation("hpregk", "kappa0", "κ₀ > 0 required, got " + std::to_string(cfg.kappa0));
  }
  if (!std::isfinite(cfg.kappa0_prime) || !(cfg.kappa() > 0.0)) {
    throw HypothesisViolation("defka", "kappa0_prime", "κ = κ₀ + κ₀' > 0 required");
  }

  const auto& bc = cfg.theta_bc;
  if (!(bc.theta_min > 0.0) || !(bc.theta_min <= bc.theta_max) || !std::isfinite(bc.theta_max)) {
    throw HypothesisViolation("hpthetaminmax", "theta_bc", "0 < θ_* ≤ θ^* < +∞ required");
  }
  if (!bc.within_bounds(cfg.T)) {
    throw HypothesisViolation("hpthetaG", "theta_bc", "θ_* ≤ θ_Γ ≤ θ^* violated on [0, T]");
  }

  if (!(cfg.theta0.mesh == cfg.mesh) || cfg.theta0.size() != cfg.mesh.n_nodes()) {
    throw PreconditionError("theta0: field does not match the mesh");
  }
  for (std::size_t i = 0; i < cfg.theta0.size(); ++i) {
    const double v = cfg.theta0[i];
    if (!(v >= bc.theta_min && v <= bc.theta_max)) {
      throw HypothesisViolation("hpthetaz", "theta0",
                                "θ_* ≤ θ₀ ≤ θ^* violated at node " + std::to_string(i) + " (θ₀ = " +
                                    std::to_string(v) + ")");
    }
  }

  if (!(cfg.chi0.mesh == cfg.mesh) || cfg.chi0.size() != cfg.mesh.n_nodes()) {
    throw PreconditionError("chi0: field does not match the mesh");
  }
  for (std::size_t i = 0; i < cfg.chi0.size(); ++i) {
    const double v = cfg.chi0[i];
    if (!std::isfinite(v) || !std::isfinite(beta_hat_value(cfg.beta, v))) {
      throw HypothesisViolation("hpchiz", "chi0",
                                "β̂(χ₀) must be finite, violated at node " + std::to_string(i) + " (χ₀ = " +
                                    std::to_string(v) + ")");
    }
  }

  for (int k = 0; k <= 16; ++k) {
    const double t = cfg.T * k / 16.0;
    for (std::size_t i = 0; i < cfg.mesh.n_nodes(); ++i) {
      if (!std::isfinite(cfg.source(cfg.mesh.node(i), t))) {
        throw HypothesisViolation("hpf", "source", "f must be finite (square integrable)");
      }
    }
  }
}

ProblemConfig limit_config(const ProblemConfig& cfg) {
  ProblemConfig lim = cfg;
  lim.kappa0 = cfg.kappa();
  lim.kappa0_prime = 0.0;
  lim.kernel = MemoryKernel::zero();
  return lim;
}

// ---------------------------------------------------------------------------
// Linear algebra

void solve_tridiagonal(std::vector<double> sub, std::vector<double> diag, std::vector<double> sup,
                       std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * sup[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - sup[i] * rhs[i + 1]) / diag[i];
}

namespace {

double max_abs(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

// Right-hand side of the phase equation, lagged at t_n.
std::vector<double> phase_forcing(const ProblemConfig& cfg, const Field& theta_n, const Field& chi_n,
                                  double t_next) {
  std::vector<double> r(chi_n.size());
  for (std::size_t i = 0; i < r.size(); ++i) {
    r[i] = cfg.lambda.derivative(chi_n[i]) * theta_n[i] - cfg.sigma.derivative(chi_n[i]) +
           cfg.phase_source(cfg.mesh.node(i), t_next);
  }
  return r;
}

std::vector<double> phase_residual_vector(const ProblemConfig& cfg, const Field& chi_n,
                                          const std::vector<double>& forcing, const std::vector<double>& chi) {
  const std::size_t n = chi.size();
  const double inv_h2 = 1.0 / (cfg.mesh.h() * cfg.mesh.h());
  std::vector<double> f(n);
  for (std::size_t i = 0; i < n; ++i) {
    double lap = 0.0;
    if (i == 0) lap = 2.0 * (chi[1] - chi[0]) * inv_h2;
    else if (i == n - 1) lap = 2.0 * (chi[n - 2] - chi[n - 1]) * inv_h2;
    else lap = (chi[i - 1] - 2.0 * chi[i] + chi[i + 1]) * inv_h2;
    f[i] = (chi[i] - chi_n[i]) / cfg.dt - lap + yosida(cfg.beta, cfg.mu, chi[i]) - forcing[i];
  }
  return f;
}

// Interior temperature equation: ln(theta)/dt - D * lap(theta) + constant_i, with D the
// effective diffusivity including the implicit convolution weight.
struct TemperatureSystem {
  double diffusivity = 0.0;
  std::vector<double> constant;  // interior nodes only meaningful
  double bc_left = 0.0;
  double bc_right = 0.0;
};

TemperatureSystem temperature_system(const ProblemConfig& cfg, const Field& theta_n, const Field& chi_n,
                                     const Field& chi_next, const ConvolutionSplit& split, double t_next) {
  TemperatureSystem sys;
  const std::size_t n = theta_n.size();
  const double inv_h2 = 1.0 / (cfg.mesh.h() * cfg.mesh.h());
  sys.diffusivity = cfg.kappa0 + split.implicit;
  sys.bc_left = cfg.theta_bc.left_at(t_next);
  sys.bc_right = cfg.theta_bc.right_at(t_next);
  sys.constant.assign(n, 0.0);
  const auto& e = split.explicit_part;
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double lap_e = (e[i - 1] - 2.0 * e[i] + e[i + 1]) * inv_h2;
    sys.constant[i] = (-std::log(theta_n[i]) + cfg.lambda.value(chi_next[i]) - cfg.lambda.value(chi_n[i])) / cfg.dt -
                      lap_e - cfg.source(cfg.mesh.node(i), t_next);
  }
  return sys;
}

std::vector<double> temperature_residual_vector(const ProblemConfig& cfg, const TemperatureSystem& sys,
                                                const std::vector<double>& theta) {
  const std::size_t n = theta.size();
  const double inv_h2 = 1.0 / (cfg.mesh.h() * cfg.mesh.h());
  std::vector<double> f(n, 0.0);
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double lap = (theta[i - 1] - 2.0 * theta[i] + theta[i + 1]) * inv_h2;
    f[i] = std::log(theta[i]) / cfg.dt - sys.diffusivity * lap + sys.constant[i];
  }
  return f;
}

// Residual level reachable in floating point: a few ulps of the largest term.
double temperature_floor(const ProblemConfig& cfg, const TemperatureSystem& sys, const std::vector<double>& theta) {
  const double inv_h2 = 1.0 / (cfg.mesh.h() * cfg.mesh.h());
  double scale = 0.0;
  for (std::size_t i = 1; i + 1 < theta.size(); ++i) {
    scale = std::max(scale, std::abs(std::log(theta[i])) / cfg.dt + std::abs(sys.constant[i]) +
                                4.0 * sys.diffusivity * inv_h2 * std::max({theta[i - 1], theta[i], theta[i + 1]}));
  }
  return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

double phase_floor(const ProblemConfig& cfg, const Field& chi_n, const std::vector<double>& forcing,
                   const std::vector<double>& chi) {
  const double inv_h2 = 1.0 / (cfg.mesh.h() * cfg.mesh.h());
  double scale = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    scale = std::max(scale, (std::abs(chi[i]) + std::abs(chi_n[i])) / cfg.dt + 4.0 * inv_h2 * std::abs(chi[i]) +
                                std::abs(yosida(cfg.beta, cfg.mu, chi[i])) + std::abs(forcing[i]));
  }
  return 64.0 * std::numeric_limits<double>::epsilon() * scale;
}

std::string format_residual(double r) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", r);
  return buf;
}

}  // namespace

// ---------------------------------------------------------------------------
// Steps

PhaseStepResult step_phase(const ProblemConfig& cfg, const Field& theta_n, const Field& chi_n, double t_next,
                           int step_index) {
  const std::size_t n = chi_n.size();
  const double inv_h2 = 1.0 / (cfg.mesh.h() * cfg.mesh.h());
  const auto forcing = phase_forcing(cfg, theta_n, chi_n, t_next);

  std::vector<double> chi = chi_n.values;
  double res = 0.0;
  for (int it = 0; it <= cfg.newton.max_iters; ++it) {
    auto f = phase_residual_vector(cfg, chi_n, forcing, chi);
    res = max_abs(f);
    if (!std::isfinite(res)) break;
    if (res <= std::max(cfg.newton.tol, phase_floor(cfg, chi_n, forcing, chi))) {
      std::vector<double> xi(n);
      for (std::size_t i = 0; i < n; ++i) xi[i] = yosida(cfg.beta, cfg.mu, chi[i]);
      return {Field(cfg.mesh, std::move(chi)), Field(cfg.mesh, std::move(xi)), it};
    }
    if (it == cfg.newton.max_iters) break;

    std::vector<double> sub(n, -inv_h2), diag(n), sup(n, -inv_h2);
    for (std::size_t i = 0; i < n; ++i) {
      diag[i] = 1.0 / cfg.dt + 2.0 * inv_h2 + yosida_derivative(cfg.beta, cfg.mu, chi[i]);
      f[i] = -f[i];
    }
    sup[0] = -2.0 * inv_h2;
    sub[n - 1] = -2.0 * inv_h2;
    solve_tridiagonal(std::move(sub), std::move(diag), std::move(sup), f);
    for (std::size_t i = 0; i < n; ++i) chi[i] += f[i];
  }
  throw StepFailure("phase Newton did not converge at step " + std::to_string(step_index) +
                        " (residual " + format_residual(res) + ")",
                    step_index, res);
}

TemperatureStepResult step_temperature(const ProblemConfig& cfg, const Field& theta_n, const Field& chi_n,
                                       const Field& chi_next, const MemoryState& memory, double t_next,
                                       int step_index) {
  const std::size_t n = theta_n.size();
  const double inv_h2 = 1.0 / (cfg.mesh.h() * cfg.mesh.h());
  const auto split = split_convolution(cfg.kernel, memory, theta_n.values, cfg.dt);
  const auto sys = temperature_system(cfg, theta_n, chi_n, chi_next, split, t_next);
  if (!(sys.diffusivity > 0.0)) {
    throw StepFailure("effective diffusivity is not positive", step_index, 0.0);
  }

  std::vector<double> theta = theta_n.values;
  theta.front() = sys.bc_left;
  theta.back() = sys.bc_right;

  const std::size_t m = n - 2;  // interior unknowns
  int halvings = 0;
  double res = 0.0;
  for (int it = 0; it <= cfg.newton.max_iters; ++it) {
    const auto f = temperature_residual_vector(cfg, sys, theta);
    res = max_abs(f);
    if (!std::isfinite(res)) break;
    if (res <= std::max(cfg.newton.tol, temperature_floor(cfg, sys, theta))) {
      Field next(cfg.mesh, std::move(theta));
      auto mem = advance_memory(cfg.kernel, memory, theta_n.values, next.values, cfg.dt);
      return {std::move(next), std::move(mem), it, halvings};
    }
    if (it == cfg.newton.max_iters) break;

    std::vector<double> sub(m, -sys.diffusivity * inv_h2), diag(m), sup(m, -sys.diffusivity * inv_h2);
    std::vector<double> delta(m);
    for (std::size_t k = 0; k < m; ++k) {
      diag[k] = 1.0 / (cfg.dt * theta[k + 1]) + 2.0 * sys.diffusivity * inv_h2;
      delta[k] = -f[k + 1];
    }
    solve_tridiagonal(std::move(sub), std::move(diag), std::move(sup), delta);

    double s = 1.0;
    int h = 0;
    auto positive = [&] {
      for (std::size_t k = 0; k < m; ++k) {
        if (!(theta[k + 1] + s * delta[k] > 0.0)) return false;
      }
      return true;
    };
    while (!positive()) {
      if (h == cfg.newton.max_halvings) {
        throw PositivityFailure("temperature iterate left the positive cone at step " +
                                    std::to_string(step_index),
                                step_index, res);
      }
      s *= 0.5;
      ++h;
    }
    halvings += h;
    for (std::size_t k = 0; k < m; ++k) theta[k + 1] += s * delta[k];
  }
  throw StepFailure("temperature Newton did not converge at step " + std::to_string(step_index) +
                        " (residual " + format_residual(res) + ")",
                    step_index, res);
}

TrajectorySolution run(const ProblemConfig& cfg) {
  validate(cfg);
  const int steps = cfg.n_steps();

  TrajectorySolution sol;
  sol.times.reserve(steps + 1);
  sol.theta.reserve(steps + 1);
  sol.chi.reserve(steps + 1);
  sol.xi.reserve(steps + 1);
  sol.newton.reserve(steps);

  sol.times.push_back(0.0);
  sol.theta.push_back(cfg.theta0);
  sol.chi.push_back(cfg.chi0);
  std::vector<double> xi0(cfg.chi0.size());
  for (std::size_t i = 0; i < xi0.size(); ++i) xi0[i] = yosida(cfg.beta, cfg.mu, cfg.chi0[i]);
  sol.xi.emplace_back(cfg.mesh, std::move(xi0));
  sol.memory = MemoryState::for_kernel(cfg.kernel, cfg.theta0.values);

  for (int n = 0; n < steps; ++n) {
    const double t_next = (n + 1 == steps) ? cfg.T : (n + 1) * cfg.dt;
    auto phase = step_phase(cfg, sol.theta.back(), sol.chi.back(), t_next, n + 1);
    auto temp = step_temperature(cfg, sol.theta.back(), sol.chi.back(), phase.chi, sol.memory, t_next, n + 1);
    sol.newton.push_back({phase.iterations, temp.iterations, temp.halvings});
    sol.memory = std::move(temp.memory);
    sol.times.push_back(t_next);
    sol.theta.push_back(std::move(temp.theta));
    sol.chi.push_back(std::move(phase.chi));
    sol.xi.push_back(std::move(phase.xi));
  }
  return sol;
}

// ---------------------------------------------------------------------------
// Diagnostics

namespace {

double cell_dot(const std::vector<double>& a, const std::vector<double>& b, double h) {
  // Sum over cells of h * (grad a)(grad b) with forward differences.
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < a.size(); ++i) acc += (a[i + 1] - a[i]) * (b[i + 1] - b[i]);
  return acc / h;
}

double weighted_sum(const std::vector<double>& w, const std::vector<double>& a) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += w[i] * a[i];
  return acc;
}

}  // namespace

ResidualReport entropy_residual(const ProblemConfig& cfg, const TrajectorySolution& sol) {
  ResidualReport rep;
  const std::size_t steps = sol.n_steps();
  const std::size_t n = cfg.mesh.n_nodes();
  const double h = cfg.mesh.h();
  const double dt = cfg.dt;
  const auto w = trapezoid_weights(cfg.mesh);

  auto harmonic = [&](double t) {
    return harmonic_extension(cfg.mesh, cfg.theta_bc.left_at(t), cfg.theta_bc.right_at(t)).values;
  };

  // theta = u + theta_H; the convolution is linear so both parts carry their own memory.
  MemoryState mem = MemoryState::for_kernel(cfg.kernel, sol.theta[0].values);
  std::vector<double> h_prev = harmonic(0.0);
  std::vector<double> u_prev(n);
  for (std::size_t i = 0; i < n; ++i) u_prev[i] = sol.theta[0][i] - h_prev[i];
  MemoryState mem_u = MemoryState::for_kernel(cfg.kernel, u_prev);
  MemoryState mem_h = MemoryState::for_kernel(cfg.kernel, h_prev);

  auto energy_chi = [&](const Field& chi) {
    double e = 0.5 * gradient_norm2(chi);
    std::vector<double> pot(n);
    for (std::size_t i = 0; i < n; ++i) pot[i] = yosida_potential(cfg.beta, cfg.mu, chi[i]);
    return e + weighted_sum(w, pot);
  };
  auto sigma_integral = [&](const Field& chi) {
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) s[i] = cfg.sigma.value(chi[i]);
    return weighted_sum(w, s);
  };

  const double theta0_int = integrate(sol.theta[0]);
  const double chi0_terms = energy_chi(sol.chi[0]) + sigma_integral(sol.chi[0]);
  double lhs_acc = 0.0;  // telescoped sums on the left
  double rhs_acc = 0.0;  // telescoped sums on the right

  for (std::size_t s = 0; s < steps; ++s) {
    const Field& th_n = sol.theta[s];
    const Field& th_next = sol.theta[s + 1];
    const Field& chi_n = sol.chi[s];
    const Field& chi_next = sol.chi[s + 1];
    const double t_next = sol.times[s + 1];

    // Stepped equations.
    const auto forcing = phase_forcing(cfg, th_n, chi_n, t_next);
    rep.phase_residual = std::max(rep.phase_residual, max_abs(phase_residual_vector(cfg, chi_n, forcing, chi_next.values)));

    const auto split = split_convolution(cfg.kernel, mem, th_n.values, dt);
    const auto sys = temperature_system(cfg, th_n, chi_n, chi_next, split, t_next);
    rep.entropy_residual =
        std::max(rep.entropy_residual, max_abs(temperature_residual_vector(cfg, sys, th_next.values)));
    mem = advance_memory(cfg.kernel, mem, th_n.values, th_next.values, dt);

    // Energy identity increments.
    const auto h_next = harmonic(t_next);
    std::vector<double> u_next(n);
    for (std::size_t i = 0; i < n; ++i) u_next[i] = th_next[i] - h_next[i];
    const auto g_u = split_convolution(cfg.kernel, mem_u, u_prev, dt).value(u_next);
    const auto g_h = split_convolution(cfg.kernel, mem_h, h_prev, dt).value(h_next);
    mem_u = advance_memory(cfg.kernel, mem_u, u_prev, u_next, dt);
    mem_h = advance_memory(cfg.kernel, mem_h, h_prev, h_next, dt);

    double log_theta_h = 0.0, lambda_theta_h = 0.0, dchi2 = 0.0, f_u = 0.0, g_dchi = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double dlog = std::log(th_next[i]) - std::log(th_n[i]);
      const double dlam = cfg.lambda.value(chi_next[i]) - cfg.lambda.value(chi_n[i]);
      const double dchi = chi_next[i] - chi_n[i];
      log_theta_h += w[i] * dlog * h_next[i];
      lambda_theta_h += w[i] * dlam * h_next[i];
      dchi2 += w[i] * dchi * dchi / dt;
      g_dchi += w[i] * cfg.phase_source(cfg.mesh.node(i), t_next) * dchi;
      if (i > 0 && i + 1 < n) f_u += h * cfg.source(cfg.mesh.node(i), t_next) * u_next[i];
    }
    const double form_u = dt * (cfg.kappa0 * cell_dot(u_next, u_next, h) + cell_dot(g_u, u_next, h));
    const double form_h = dt * (cfg.kappa0 * cell_dot(h_next, u_next, h) + cell_dot(g_h, u_next, h));
    rep.kernel_form += form_u;

    lhs_acc += -log_theta_h + form_u + dchi2;
    rhs_acc += lambda_theta_h - form_h + dt * f_u + g_dchi;

    const double lhs = integrate(th_next) + lhs_acc + energy_chi(chi_next);
    const double rhs = rhs_acc - sigma_integral(chi_next) + theta0_int + chi0_terms;
    rep.energy_identity_gap = std::max(rep.energy_identity_gap, std::abs(lhs - rhs));

    h_prev = h_next;
    u_prev = std::move(u_next);
  }
  return rep;
}

}  // namespace phasemem
