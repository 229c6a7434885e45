#pragma once

#include <variant>
#include <vector>

namespace phasemem {

/// Catalogue of one-variable profiles used for boundary traces, initial data and
/// separable source factors.
struct ConstantFn {
  double value;
};

/// a + b*s
struct LinearFn {
  double a;
  double b;
};

/// Ascending coefficients.
struct PolynomialFn {
  std::vector<double> coefficients;
};

/// offset + amplitude * sin(wavenumber * s + phase)
struct SinusoidalFn {
  double offset;
  double amplitude;
  double wavenumber;
  double phase;
};

using ScalarFunction = std::variant<ConstantFn, LinearFn, PolynomialFn, SinusoidalFn>;

double evaluate(const ScalarFunction& fn, double s);

}  // namespace phasemem
