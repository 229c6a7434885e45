#include "phasemem/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "phasemem/errors.hpp"

namespace phasemem {

namespace {

void check_time(double t) {
  if (!std::isfinite(t) || t < 0.0) {
    throw DomainError("kernel evaluated at invalid time t = " + std::to_string(t));
  }
}

// Index of the segment [times[i], times[i+1]] containing t; size()-1 past the last sample.
std::size_t segment_of(const TabulatedKernel& k, double t) {
  auto it = std::upper_bound(k.times.begin(), k.times.end(), t);
  return static_cast<std::size_t>(std::distance(k.times.begin(), it)) - 1;
}

double tabulated_value(const TabulatedKernel& k, double t) {
  const std::size_t i = segment_of(k, t);
  if (i + 1 >= k.times.size()) return k.values.back();
  const double s = (t - k.times[i]) / (k.times[i + 1] - k.times[i]);
  return (1.0 - s) * k.values[i] + s * k.values[i + 1];
}

double tabulated_integral(const TabulatedKernel& k, double t) {
  double acc = 0.0;
  const std::size_t last = k.times.size() - 1;
  for (std::size_t i = 0; i < last; ++i) {
    const double a = k.times[i];
    const double b = k.times[i + 1];
    if (t <= a) return acc;
    if (t >= b) {
      acc += 0.5 * (b - a) * (k.values[i] + k.values[i + 1]);
    } else {
      const double vt = tabulated_value(k, t);
      acc += 0.5 * (t - a) * (k.values[i] + vt);
      return acc;
    }
  }
  return acc + (t - k.times[last]) * k.values[last];
}

// 1 - (1 - e^{-x})/x and (1 - e^{-x})/x - e^{-x}, accurate for small x.
void exponential_phi(double x, double& one_minus_phi1, double& phi1_minus_decay) {
  if (x < 0.5) {
    double term = 1.0;  // x^k / (k+1)!
    double s0 = 0.0;
    double s1 = 0.0;
    double sign = 1.0;
    for (int kk = 1; kk <= 30; ++kk) {
      term *= x / static_cast<double>(kk + 1);
      s0 += sign * term;
      s1 += sign * kk * term;
      sign = -sign;
    }
    one_minus_phi1 = s0;
    phi1_minus_decay = s1;
  } else {
    const double phi1 = -std::expm1(-x) / x;
    one_minus_phi1 = 1.0 - phi1;
    phi1_minus_decay = phi1 - std::exp(-x);
  }
}

}  // namespace

MemoryKernel MemoryKernel::zero() { return MemoryKernel(ZeroKernel{}); }

MemoryKernel MemoryKernel::exponential(double amplitude, double timescale) {
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) {
    throw DomainError("exponential kernel amplitude must be positive and finite");
  }
  if (!(timescale > 0.0) || !std::isfinite(timescale)) {
    throw DomainError("exponential kernel timescale must be positive and finite");
  }
  return MemoryKernel(ExponentialKernel{amplitude, timescale});
}

MemoryKernel MemoryKernel::tabulated(std::vector<double> times, std::vector<double> values) {
  if (times.size() < 2 || times.size() != values.size()) {
    throw DomainError("tabulated kernel needs at least two samples and matching lengths");
  }
  if (times.front() != 0.0) throw DomainError("tabulated kernel times must start at 0");
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!std::isfinite(times[i]) || !std::isfinite(values[i])) {
      throw DomainError("tabulated kernel samples must be finite");
    }
    if (i > 0 && !(times[i] > times[i - 1])) {
      throw DomainError("tabulated kernel times must be strictly increasing");
    }
  }
  return MemoryKernel(TabulatedKernel{std::move(times), std::move(values)});
}

const ExponentialKernel& MemoryKernel::as_exponential() const {
  if (!is_exponential()) throw PreconditionError("kernel is not exponential");
  return std::get<ExponentialKernel>(kernel_);
}

const TabulatedKernel& MemoryKernel::as_tabulated() const {
  if (!is_tabulated()) throw PreconditionError("kernel is not tabulated");
  return std::get<TabulatedKernel>(kernel_);
}

double eval_kernel(const MemoryKernel& k, double t) {
  check_time(t);
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ZeroKernel>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialKernel>) {
          return v.amplitude / v.timescale * std::exp(-t / v.timescale);
        } else {
          return tabulated_value(v, t);
        }
      },
      k.variant());
}

double cumulative_kernel(const MemoryKernel& k, double t) {
  check_time(t);
  return std::visit(
      [t](const auto& v) -> double {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, ZeroKernel>) {
          return 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialKernel>) {
          return -v.amplitude * std::expm1(-t / v.timescale);
        } else {
          return tabulated_integral(v, t);
        }
      },
      k.variant());
}

double l1_deviation(const MemoryKernel& k, double kappa0_prime, double T, int n_points) {
  if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("l1_deviation needs T > 0");
  if (n_points < 2) throw DomainError("l1_deviation needs at least two quadrature points");
  if (k.is_exponential() && k.as_exponential().amplitude == kappa0_prime) {
    const double eps = k.as_exponential().timescale;
    return -kappa0_prime * eps * std::expm1(-T / eps);
  }
  if (k.is_zero()) return std::abs(kappa0_prime) * T;
  const double h = T / (n_points - 1);
  double acc = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double t = (i == n_points - 1) ? T : i * h;
    const double w = (i == 0 || i == n_points - 1) ? 0.5 : 1.0;
    acc += w * std::abs(cumulative_kernel(k, t) - kappa0_prime);
  }
  return acc * h;
}

double l1_norm(const MemoryKernel& k, double T, int n_points) {
  if (!(T > 0.0)) throw DomainError("l1_norm needs T > 0");
  if (k.is_zero()) return 0.0;
  if (k.is_exponential()) return cumulative_kernel(k, T);
  const double h = T / (n_points - 1);
  double acc = 0.0;
  for (int i = 0; i < n_points; ++i) {
    const double t = (i == n_points - 1) ? T : i * h;
    const double w = (i == 0 || i == n_points - 1) ? 0.5 : 1.0;
    acc += w * std::abs(eval_kernel(k, t));
  }
  return acc * h;
}

bool check_positive_type_sufficient(const MemoryKernel& k) {
  if (!k.is_tabulated()) return true;
  const auto& tab = k.as_tabulated();
  const std::size_t n = tab.times.size();

  double vscale = 0.0;
  for (double v : tab.values) vscale = std::max(vscale, std::abs(v));
  const double vtol = 1e-12 * std::max(vscale, 1.0);
  for (double v : tab.values) {
    if (v < -vtol) return false;
  }

  std::vector<double> d1(n - 1);
  double d1scale = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    d1[i] = (tab.values[i + 1] - tab.values[i]) / (tab.times[i + 1] - tab.times[i]);
    d1scale = std::max(d1scale, std::abs(d1[i]));
  }
  const double d1tol = 1e-12 * std::max(d1scale, 1.0);
  for (double d : d1) {
    if (d > d1tol) return false;
  }

  double d2scale = 0.0;
  std::vector<double> d2;
  for (std::size_t i = 0; i + 2 < n; ++i) {
    d2.push_back((d1[i + 1] - d1[i]) / (tab.times[i + 2] - tab.times[i]));
    d2scale = std::max(d2scale, std::abs(d2.back()));
  }
  const double d2tol = 1e-12 * std::max(d2scale, 1.0);
  return std::all_of(d2.begin(), d2.end(), [d2tol](double d) { return d >= -d2tol; });
}

std::vector<double> coercivity_matrix(const MemoryKernel& k, double kappa0, double T, int n_grid) {
  const auto n = static_cast<std::size_t>(n_grid);
  const double delta = T / n_grid;
  std::vector<double> lag(n);
  for (std::size_t m = 0; m < n; ++m) lag[m] = eval_kernel(k, m * delta);

  std::vector<double> q(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const std::size_t m = i > j ? i - j : j - i;
      q[i * n + j] = 0.5 * delta * lag[m];
    }
    q[i * n + i] += kappa0;
  }
  return q;
}

double estimate_coercivity_constant(const MemoryKernel& k, double kappa0, double T, int n_grid,
                                    const CoercivityOptions& opts) {
  if (!(kappa0 > 0.0)) throw DomainError("coercivity estimate needs kappa0 > 0");
  if (!(T > 0.0)) throw DomainError("coercivity estimate needs T > 0");
  if (n_grid < 8) throw DomainError("coercivity estimate needs n_grid >= 8");

  const auto n = static_cast<std::size_t>(n_grid);
  std::vector<double> a = coercivity_matrix(k, kappa0, T, n_grid);
  auto at = [&](std::size_t i, std::size_t j) -> double& { return a[i * n + j]; };

  double frob2 = 0.0;
  for (double v : a) frob2 += v * v;
  const double target = opts.rel_tol * std::sqrt(frob2);

  // Cyclic Jacobi: rotate away each off-diagonal entry in turn until off(A) is small.
  for (int sweep = 0; sweep <= opts.max_sweeps; ++sweep) {
    double off2 = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = i + 1; j < n; ++j) off2 += 2.0 * at(i, j) * at(i, j);
    }
    if (std::sqrt(off2) <= target) {
      double lo = at(0, 0);
      for (std::size_t i = 1; i < n; ++i) lo = std::min(lo, at(i, i));
      return lo;
    }
    if (sweep == opts.max_sweeps) break;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = at(p, q);
        if (apq == 0.0) continue;
        const double theta = (at(q, q) - at(p, p)) / (2.0 * apq);
        const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (std::size_t r = 0; r < n; ++r) {
          const double arp = at(r, p);
          const double arq = at(r, q);
          at(r, p) = c * arp - s * arq;
          at(r, q) = s * arp + c * arq;
        }
        for (std::size_t r = 0; r < n; ++r) {
          const double apr = at(p, r);
          const double aqr = at(q, r);
          at(p, r) = c * apr - s * aqr;
          at(q, r) = s * apr + c * aqr;
        }
      }
    }
  }
  throw NumericError("Jacobi eigen-iteration did not converge within " +
                     std::to_string(opts.max_sweeps) + " sweeps");
}

KernelReport make_kernel_report(const MemoryKernel& k, double kappa0, double kappa0_prime, double T,
                                int n_grid) {
  KernelReport r;
  r.l1_norm = l1_norm(k, T);
  r.l1_deviation = l1_deviation(k, kappa0_prime, T);
  r.positive_type_sufficient = check_positive_type_sufficient(k);
  r.coercivity_estimate = estimate_coercivity_constant(k, kappa0, T, n_grid);
  return r;
}

MemoryState MemoryState::exponential(std::size_t n_nodes) {
  return MemoryState{ExponentialRecursion{std::vector<double>(n_nodes, 0.0)}, 0.0};
}

MemoryState MemoryState::full_history(std::span<const double> theta0) {
  FullHistory h;
  h.snapshots.emplace_back(theta0.begin(), theta0.end());
  return MemoryState{std::move(h), 0.0};
}

MemoryState MemoryState::for_kernel(const MemoryKernel& k, std::span<const double> theta0) {
  if (k.is_tabulated()) return full_history(theta0);
  return exponential(theta0.size());
}

std::vector<double> convolve_history(const MemoryKernel& k, const FullHistory& history, double dt) {
  if (history.snapshots.empty()) throw PreconditionError("convolve_history needs a nonempty history");
  if (!(dt > 0.0)) throw DomainError("convolve_history needs dt > 0");
  const std::size_t n = history.snapshots.size() - 1;
  const std::size_t nodes = history.snapshots.front().size();
  std::vector<double> out(nodes, 0.0);
  if (n == 0 || k.is_zero()) return out;
  for (std::size_t j = 0; j <= n; ++j) {
    const double w = (j == 0 || j == n) ? 0.5 * dt : dt;
    const double kv = w * eval_kernel(k, static_cast<double>(n - j) * dt);
    const auto& snap = history.snapshots[j];
    for (std::size_t i = 0; i < nodes; ++i) out[i] += kv * snap[i];
  }
  return out;
}

ExponentialStepWeights exponential_step_weights(const ExponentialKernel& k, double dt) {
  const double x = dt / k.timescale;
  double one_minus_phi1 = 0.0;
  double phi1_minus_decay = 0.0;
  exponential_phi(x, one_minus_phi1, phi1_minus_decay);
  return {std::exp(-x), k.amplitude * one_minus_phi1, k.amplitude * phi1_minus_decay};
}

MemoryState advance_exponential_memory(const MemoryState& state, const MemoryKernel& k,
                                       std::span<const double> theta_old,
                                       std::span<const double> theta_new, double dt) {
  if (!state.is_recursion()) throw PreconditionError("memory state is not an exponential recursion");
  if (!(dt > 0.0)) throw DomainError("advance_exponential_memory needs dt > 0");
  const auto w = exponential_step_weights(k.as_exponential(), dt);
  const auto& old = std::get<ExponentialRecursion>(state.mode).weights;
  if (theta_old.size() != old.size() || theta_new.size() != old.size()) {
    throw PreconditionError("memory state and fields have different node counts");
  }
  ExponentialRecursion next{std::vector<double>(old.size())};
  for (std::size_t i = 0; i < old.size(); ++i) {
    next.weights[i] = w.decay * old[i] + w.weight_new * theta_new[i] + w.weight_old * theta_old[i];
  }
  return MemoryState{std::move(next), state.last_time + dt};
}

}  // namespace phasemem

namespace phasemem {

std::vector<double> ConvolutionSplit::value(std::span<const double> theta_next) const {
  std::vector<double> g(explicit_part);
  for (std::size_t i = 0; i < g.size(); ++i) g[i] += implicit * theta_next[i];
  return g;
}

ConvolutionSplit split_convolution(const MemoryKernel& k, const MemoryState& state,
                                   std::span<const double> theta_n, double dt) {
  ConvolutionSplit split;
  split.explicit_part.assign(theta_n.size(), 0.0);
  if (k.is_zero()) return split;

  if (state.is_recursion()) {
    const auto w = exponential_step_weights(k.as_exponential(), dt);
    const auto& mem = std::get<ExponentialRecursion>(state.mode).weights;
    split.implicit = w.weight_new;
    for (std::size_t i = 0; i < mem.size(); ++i) {
      split.explicit_part[i] = w.decay * mem[i] + w.weight_old * theta_n[i];
    }
    return split;
  }

  const auto& snaps = std::get<FullHistory>(state.mode).snapshots;
  const std::size_t n_next = snaps.size();  // index of the new time level
  for (std::size_t j = 0; j < n_next; ++j) {
    const double w = (j == 0 ? 0.5 : 1.0) * dt;
    const double kv = w * eval_kernel(k, static_cast<double>(n_next - j) * dt);
    for (std::size_t i = 0; i < split.explicit_part.size(); ++i) split.explicit_part[i] += kv * snaps[j][i];
  }
  split.implicit = 0.5 * dt * eval_kernel(k, 0.0);
  return split;
}

MemoryState advance_memory(const MemoryKernel& k, const MemoryState& state, std::span<const double> theta_n,
                           std::span<const double> theta_next, double dt) {
  if (state.is_recursion()) {
    if (k.is_zero()) {
      MemoryState next = state;
      next.last_time += dt;
      return next;
    }
    return advance_exponential_memory(state, k, theta_n, theta_next, dt);
  }
  MemoryState next = state;
  std::get<FullHistory>(next.mode).snapshots.emplace_back(theta_next.begin(), theta_next.end());
  next.last_time += dt;
  return next;
}

}  // namespace phasemem
