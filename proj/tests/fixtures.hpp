#pragma once

#include <string>

#include "covstar/geometry.hpp"
#include "covstar/rng.hpp"
#include "covstar/tensor_form.hpp"

// Chart builders shared by the test suites.  Each returns a freshly built
// ChartGeometry so tests can never interfere through shared state.
namespace covstar::fixtures {

// Constant bivector, vanishing connection.
inline ChartGeometry moyal2() {
  return load_geometry(2, ChartMode::symplectic, {{1, 2, parse_scalar("1", 2)}}, {});
}

// theta^{12} = 1 + x1 with the connection induced by the bivector.
inline ChartGeometry linear2() {
  SpecialChartSpec spec;
  spec.d = 2;
  spec.g = {{1, 2, Rat(1)}};
  spec.f = {{1, 2, 1, Rat(1)}};
  return build_special_chart(spec);
}

// theta^{12} = 1 + x1^2 with the connection induced by the bivector.
inline ChartGeometry quad2() {
  SpecialChartSpec spec;
  spec.d = 2;
  spec.g = {{1, 2, Rat(1)}};
  spec.rtilde = {{1, 2, 1, 1, Rat(2)}};
  return build_special_chart(spec);
}

// Deliberately curved chart: the primary curvature does not vanish.
inline ChartGeometry curved2() {
  return load_geometry(2, ChartMode::symplectic, {{1, 2, parse_scalar("1", 2)}},
                       {{1, 1, 2, parse_scalar("x2", 2)}});
}

// Chart with torsion and curvature at once, for identities that hold on any
// chart regardless of constraints.
inline ChartGeometry twisted2() {
  return load_geometry(2, ChartMode::symplectic, {{1, 2, parse_scalar("1", 2)}},
                       {{1, 1, 2, parse_scalar("x2", 2)},
                        {2, 1, 1, parse_scalar("x1", 2)},
                        {1, 2, 2, parse_scalar("x1*x2", 2)}});
}

// Degenerate bivector in three dimensions, flat connection.
inline ChartGeometry poisson3() {
  return load_geometry(3, ChartMode::poisson, {{1, 2, parse_scalar("1", 3)}}, {});
}

// Degenerate linear bivector in three dimensions, flat connection.
inline ChartGeometry linear3() {
  return load_geometry(3, ChartMode::poisson, {{1, 2, parse_scalar("1+x3", 3)}}, {});
}

// Invertible constant bivector in four dimensions with a curved connection
// chosen to break the covariant compatibility conditions between theta and
// Gamma.  The plain Jacobi identity for theta itself still holds.
inline ChartGeometry incompat4() {
  return load_geometry(4, ChartMode::symplectic,
                       {{1, 2, parse_scalar("1", 4)}, {3, 4, parse_scalar("1", 4)}},
                       {{1, 3, 4, parse_scalar("x1", 4)}});
}

// The coordinate coframe as a vector-valued one-form: component (m;;m) = 1.
inline TensorValuedForm coframe(int d) {
  TensorValuedForm e(d, 1, 0, 1);
  for (int m = 1; m <= d; ++m) e.accumulate({m}, {}, {m}, ScalarExpr::constant(d, 1));
  return e;
}

}  // namespace covstar::fixtures
