#include <cmath>
#include <limits>
#include <numbers>

#include "doctest.h"
#include "phasemem/errors.hpp"
#include "phasemem/grid.hpp"
#include "support.hpp"

using namespace phasemem;
using testsupport::Gen;

namespace {

constexpr double kPi = std::numbers::pi;

Field random_field(Gen& gen, const Mesh1D& m, bool zero_trace) {
  Field f(m, gen.vector(m.n_nodes(), -1.0, 1.0));
  if (zero_trace) f[0] = f[f.size() - 1] = 0.0;
  return f;
}

}  // namespace

TEST_CASE("mesh construction and nodes") {
  const Mesh1D m(0.0, 2.0, 8);
  CHECK(m.h() == doctest::Approx(0.25));
  CHECK(m.n_nodes() == 9);
  CHECK(m.node(0) == 0.0);
  CHECK(m.node(8) == 2.0);
  CHECK(m.nodes().size() == 9);
  CHECK_THROWS_AS(Mesh1D(0.0, 1.0, 3), DomainError);
  CHECK_THROWS_AS(Mesh1D(1.0, 1.0, 10), DomainError);
  CHECK_THROWS_AS(Field(m, std::vector<double>(5, 0.0)), PreconditionError);
}

TEST_CASE("laplacian_dirichlet examples") {
  const Mesh1D m(0.0, 1.0, 10);
  const auto lin = laplacian_dirichlet(Field::from(m, [](double x) { return x; }), 0.0, 1.0);
  for (std::size_t i = 1; i + 1 < lin.size(); ++i) CHECK(lin[i] == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

  const auto quad = laplacian_dirichlet(Field::from(m, [](double x) { return x * x; }), 0.0, 1.0);
  for (std::size_t i = 1; i + 1 < quad.size(); ++i) CHECK(quad[i] == doctest::Approx(2.0).epsilon(1e-11));

  const auto con = laplacian_dirichlet(Field::constant(m, 3.5), 3.5, 3.5);
  for (double v : con.values) CHECK(v == 0.0);
}

TEST_CASE("laplacian_dirichlet uses the supplied boundary values") {
  const Mesh1D m(0.0, 1.0, 4);
  const auto lap = laplacian_dirichlet(Field::constant(m, 0.0), 1.0, 0.0);
  CHECK(lap[1] == doctest::Approx(16.0));
  CHECK(lap[2] == 0.0);
  CHECK(lap[0] == 0.0);
}

TEST_CASE("laplacian_neumann examples") {
  const Mesh1D m(0.0, 1.0, 12);
  for (double v : laplacian_neumann(Field::constant(m, -2.0)).values) CHECK(v == 0.0);

  Gen gen(31);
  const auto w = trapezoid_weights(m);
  for (int trial = 0; trial < 50; ++trial) {
    const auto lap = laplacian_neumann(random_field(gen, m, false));
    double s = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < lap.size(); ++i) {
      s += w[i] * lap[i];
      scale += std::abs(w[i] * lap[i]);
    }
    CHECK(std::abs(s) <= 1e-13 * scale);
  }
}

TEST_CASE("laplacian_neumann is second order on cos(pi x)") {
  // Richardson: errors on h and h/2 at shared nodes shrink by 4, and the extrapolated
  // value (4 L_{h/2} - L_h) / 3 is much closer to the exact -pi^2 cos(pi x).
  auto max_error = [](int n) {
    const Mesh1D m(0.0, 1.0, n);
    const auto lap = laplacian_neumann(Field::from(m, [](double x) { return std::cos(kPi * x); }));
    double e = 0.0;
    for (std::size_t i = 0; i < lap.size(); ++i) e = std::max(e, std::abs(lap[i] + kPi * kPi * std::cos(kPi * m.node(i))));
    return e;
  };
  const double e1 = max_error(20), e2 = max_error(40), e3 = max_error(80);
  CHECK(std::log2(e1 / e2) >= 1.9);
  CHECK(std::log2(e2 / e3) >= 1.9);

  const Mesh1D coarse(0.0, 1.0, 20), fine(0.0, 1.0, 40);
  const auto lc = laplacian_neumann(Field::from(coarse, [](double x) { return std::cos(kPi * x); }));
  const auto lf = laplacian_neumann(Field::from(fine, [](double x) { return std::cos(kPi * x); }));
  for (std::size_t i = 0; i < lc.size(); ++i) {
    const double exact = -kPi * kPi * std::cos(kPi * coarse.node(i));
    const double extrapolated = (4.0 * lf[2 * i] - lc[i]) / 3.0;
    CHECK(std::abs(extrapolated - exact) <= 0.05 * e1 + 1e-9);
  }
}

TEST_CASE("harmonic extension examples") {
  const Mesh1D m(0.0, 1.0, 10);
  CHECK(harmonic_extension(m, 2.0, 4.0)[5] == doctest::Approx(3.0));
  for (double v : harmonic_extension(m, 1.7, 1.7).values) CHECK(v == doctest::Approx(1.7).epsilon(1e-15));

  Gen gen(32);
  for (int trial = 0; trial < 100; ++trial) {
    const double lo = gen.uniform(0.1, 2.0), hi = lo + gen.uniform(0.0, 3.0);
    const bool flip = gen.integer(0, 1) == 1;
    const Mesh1D mm(gen.uniform(-1, 0), gen.uniform(0.5, 2), gen.integer(4, 64));
    const auto he = harmonic_extension(mm, flip ? hi : lo, flip ? lo : hi);
    for (double v : he.values) {
      CHECK(v >= lo);
      CHECK(v <= hi);
    }
    const auto lap = laplacian_dirichlet(he, he[0], he[he.size() - 1]);
    const double tol = 64.0 * std::numeric_limits<double>::epsilon() * hi / (mm.h() * mm.h());
    for (double v : lap.values) CHECK(std::abs(v) <= tol);
  }
}

TEST_CASE("norm examples") {
  const Mesh1D m(0.0, 1.0, 100);
  const auto one = Field::constant(m, 1.0);
  CHECK(norm_H(one) == doctest::Approx(1.0).epsilon(1e-14));

  const auto x = Field::from(m, [](double s) { return s; });
  // trapezoid on x^2 overshoots by h^2/6
  CHECK(norm_V(x) * norm_V(x) == doctest::Approx(4.0 / 3.0).epsilon(2.0 * m.h() * m.h()));
  CHECK(norm_V(x) == doctest::Approx(1.1547).epsilon(1e-4));
  CHECK(inner_H(x, x) == doctest::Approx(norm_H(x) * norm_H(x)).epsilon(1e-15));
  CHECK(integrate(x) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(gradient(x).size() == 100);
}

TEST_CASE("norm_V squared splits into H and gradient parts") {
  Gen gen(33);
  for (int trial = 0; trial < 100; ++trial) {
    const Mesh1D m(0.0, gen.uniform(0.5, 3.0), gen.integer(4, 200));
    const auto f = random_field(gen, m, false);
    const double lhs = norm_V(f) * norm_V(f);
    CHECK(lhs == doctest::Approx(norm_H(f) * norm_H(f) + gradient_norm2(f)).epsilon(1e-14));
  }
}

TEST_CASE("mesh mismatch is a precondition error") {
  const auto a = Field::constant(Mesh1D(0.0, 1.0, 10), 1.0);
  const auto b = Field::constant(Mesh1D(0.0, 1.0, 12), 1.0);
  CHECK_THROWS_AS(inner_H(a, b), PreconditionError);
}

TEST_CASE("discrete Poincare constant is bounded uniformly in h") {
  Gen gen(34);
  for (int n : {8, 32, 128}) {
    const Mesh1D m(0.0, 1.0, n);
    for (int trial = 0; trial < 200; ++trial) {
      const auto f = random_field(gen, m, true);
      CHECK(norm_H(f) <= 1.05 / kPi * std::sqrt(gradient_norm2(f)));
    }
  }
}

TEST_CASE("laplacians are symmetric and nonpositive in the H inner product") {
  Gen gen(35);
  for (int trial = 0; trial < 100; ++trial) {
    const Mesh1D m(0.0, gen.uniform(0.5, 2.0), gen.integer(4, 80));
    const auto u = random_field(gen, m, true), v = random_field(gen, m, true);
    const double a = inner_H(laplacian_dirichlet(u, 0.0, 0.0), v);
    const double b = inner_H(u, laplacian_dirichlet(v, 0.0, 0.0));
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
    CHECK(inner_H(laplacian_dirichlet(u, 0.0, 0.0), u) <= 0.0);

    const auto p = random_field(gen, m, false), q = random_field(gen, m, false);
    const double c = inner_H(laplacian_neumann(p), q);
    const double d = inner_H(p, laplacian_neumann(q));
    CHECK(std::abs(c - d) <= 1e-12 * std::max(1.0, std::abs(c)));
    CHECK(inner_H(laplacian_neumann(p), p) <= 1e-12);
  }
}

TEST_CASE("boundary trace band check") {
  BoundaryTrace bc;
  bc.left = ConstantFn{1.0};
  bc.right = SinusoidalFn{1.0, 0.5, 2.0 * kPi, 0.0};
  bc.theta_min = 0.5;
  bc.theta_max = 1.5;
  CHECK(bc.within_bounds(1.0));
  bc.theta_max = 1.4;
  CHECK_FALSE(bc.within_bounds(1.0));
  CHECK(bc.right_at(0.25) == doctest::Approx(1.5));
}

TEST_CASE("scalar function catalogue") {
  CHECK(evaluate(ConstantFn{2.0}, 5.0) == 2.0);
  CHECK(evaluate(LinearFn{1.0, 2.0}, 3.0) == 7.0);
  CHECK(evaluate(PolynomialFn{{1.0, 0.0, 2.0}}, 2.0) == 9.0);
  CHECK(evaluate(SinusoidalFn{1.0, 2.0, kPi, 0.0}, 0.5) == doctest::Approx(3.0));
}
