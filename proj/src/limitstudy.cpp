#include "phasemem/limitstudy.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>

#include "phasemem/errors.hpp"

namespace phasemem {

namespace {

double min_theta(const TrajectorySolution& s) {
  double m = std::numeric_limits<double>::infinity();
  for (const auto& f : s.theta)
    for (double v : f.values) m = std::min(m, v);
  return m;
}

void require_same_grid(const TrajectorySolution& a, const TrajectorySolution& b) {
  if (a.times.size() != b.times.size() || a.theta.empty()) {
    throw PreconditionError("trajectories have different time grids");
  }
  for (std::size_t n = 0; n < a.times.size(); ++n) {
    if (std::abs(a.times[n] - b.times[n]) > 1e-12 * std::max(1.0, std::abs(a.times[n]))) {
      throw PreconditionError("trajectories have different time grids");
    }
  }
  if (!(a.theta.front().mesh == b.theta.front().mesh)) throw PreconditionError("trajectories live on different meshes");
}

Field difference(const Field& a, const Field& b) {
  Field d = a;
  for (std::size_t i = 0; i < d.size(); ++i) d[i] -= b[i];
  return d;
}

}  // namespace

ErrorFunctional compute_error_functional(const TrajectorySolution& sol_eps, const TrajectorySolution& sol_limit) {
  require_same_grid(sol_eps, sol_limit);
  ErrorFunctional e;
  const std::size_t steps = sol_eps.n_steps();
  const Mesh1D& mesh = sol_eps.theta.front().mesh;
  const auto w = trapezoid_weights(mesh);

  Field accum = Field::constant(mesh, 0.0);
  for (std::size_t n = 1; n <= steps; ++n) {
    const double dt = sol_eps.times[n] - sol_eps.times[n - 1];
    const Field& te = sol_eps.theta[n];
    const Field& tl = sol_limit.theta[n];

    for (std::size_t i = 0; i < accum.size(); ++i) accum[i] += dt * (te[i] - tl[i]);
    const double nv = inner_H(accum, accum) + gradient_norm2(accum);
    e.sup_V_accum = std::max(e.sup_V_accum, nv);

    const Field dchi = difference(sol_eps.chi[n], sol_limit.chi[n]);
    const double h2 = inner_H(dchi, dchi);
    e.sup_H_chi = std::max(e.sup_H_chi, h2);
    e.l2_V_chi += dt * (h2 + gradient_norm2(dchi));

    double logd = 0.0, xid = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      logd += w[i] * (std::log(te[i]) - std::log(tl[i])) * (te[i] - tl[i]);
      xid += w[i] * (sol_eps.xi[n][i] - sol_limit.xi[n][i]) * dchi[i];
    }
    e.log_duality += dt * logd;
    e.xi_duality += dt * xid;
  }
  e.total = e.sup_V_accum + e.sup_H_chi + e.l2_V_chi + e.log_duality + e.xi_duality;
  return e;
}

double theta_l2_distance(const TrajectorySolution& a, const TrajectorySolution& b) {
  require_same_grid(a, b);
  double acc = 0.0;
  for (std::size_t n = 1; n < a.times.size(); ++n) {
    const Field d = difference(a.theta[n], b.theta[n]);
    acc += (a.times[n] - a.times[n - 1]) * inner_H(d, d);
  }
  return std::sqrt(acc);
}

bool RateReport::error_decreasing() const {
  if (degenerate) return true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!(rows[i].error.total < rows[i - 1].error.total)) return false;
  }
  return true;
}

bool RateReport::ratio_bounded(double factor) const {
  if (degenerate) return true;
  return !rows.empty() && ratio_max <= factor * rows.front().ratio;
}

bool RateReport::slope_ok(double threshold) const { return degenerate || fitted_slope >= threshold; }

bool RateReport::dualities_nonnegative() const {
  return std::all_of(rows.begin(), rows.end(),
                     [](const RateRow& r) { return r.error.log_duality >= 0.0 && r.error.xi_duality >= 0.0; });
}

void validate(const SweepPlan& plan) {
  if (plan.epsilons.size() < 3) throw PreconditionError("sweep: the rate fit needs at least 3 epsilons");
  for (std::size_t i = 0; i < plan.epsilons.size(); ++i) {
    if (!(plan.epsilons[i] > 0.0)) throw PreconditionError("sweep: epsilons must be positive");
    if (i > 0 && !(plan.epsilons[i] < plan.epsilons[i - 1])) {
      throw PreconditionError("sweep: epsilons must be strictly decreasing");
    }
  }
  if (plan.parallelism < 1) throw PreconditionError("sweep: parallelism must be >= 1");
}

double fit_rate(std::span<const RateRow> rows) {
  if (rows.size() < 3) throw PreconditionError("fit_rate needs at least 3 rows");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (const auto& r : rows) {
    if (!(r.error.total > 0.0) || !(r.l1_deviation > 0.0)) {
      throw PreconditionError("fit_rate needs positive error_total and l1_deviation");
    }
    const double x = std::log(r.l1_deviation);
    const double y = std::log(r.error.total);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double n = static_cast<double>(rows.size());
  const double denom = n * sxx - sx * sx;
  if (!(std::abs(denom) > 0.0)) throw PreconditionError("fit_rate needs distinct l1_deviation values");
  return (n * sxy - sx * sy) / denom;
}

RateReport run_sweep(const SweepPlan& plan) {
  validate(plan);
  validate(plan.base_config);
  const ProblemConfig& base = plan.base_config;
  const double kp = base.kappa0_prime;

  TrajectorySolution limit;
  try {
    limit = run(limit_config(base));
  } catch (const std::exception& ex) {
    throw SweepFailure(0.0, ex.what());
  }

  const std::size_t m = plan.epsilons.size();
  std::vector<RateRow> rows(m);
  std::vector<double> minima(m);
  std::vector<std::exception_ptr> failures(m);
  std::atomic<std::size_t> next{0};

  auto worker = [&] {
    for (std::size_t i = next++; i < m; i = next++) {
      const double eps = plan.epsilons[i];
      try {
        ProblemConfig cfg = base;
        cfg.kernel = kp > 0.0 ? MemoryKernel::exponential(kp, eps) : MemoryKernel::zero();
        if (kp <= 0.0) {
          cfg.kappa0 = base.kappa();
          cfg.kappa0_prime = 0.0;
        }
        const TrajectorySolution sol = run(cfg);
        minima[i] = min_theta(sol);
        RateRow& row = rows[i];
        row.epsilon = eps;
        row.l1_deviation = l1_deviation(cfg.kernel, kp, base.T);
        row.error = compute_error_functional(sol, limit);
        row.theta_l2 = theta_l2_distance(sol, limit);
        row.ratio = row.l1_deviation > 0.0 ? row.error.total / row.l1_deviation : 0.0;
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };

  const int nthreads = std::max(1, std::min<int>(plan.parallelism, static_cast<int>(m)));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < nthreads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (std::size_t i = 0; i < m; ++i) {
    if (!failures[i]) continue;
    try {
      std::rethrow_exception(failures[i]);
    } catch (const std::exception& ex) {
      throw SweepFailure(plan.epsilons[i], ex.what());
    }
  }

  RateReport rep;
  rep.rows = std::move(rows);
  rep.degenerate = std::all_of(rep.rows.begin(), rep.rows.end(), [](const RateRow& r) { return r.error.total == 0.0; });
  rep.theta_min = min_theta(limit);
  for (double v : minima) rep.theta_min = std::min(rep.theta_min, v);
  for (const auto& r : rep.rows) rep.ratio_max = std::max(rep.ratio_max, r.ratio);
  rep.fitted_slope = rep.degenerate ? std::numeric_limits<double>::quiet_NaN() : fit_rate(rep.rows);
  return rep;
}

}  // namespace phasemem
