#include <catch2/catch_amalgamated.hpp>

#include "covstar/geometry.hpp"

using namespace covstar;

namespace {

ScalarExpr S(const std::string& s, int d = 2) { return parse_scalar(s, d); }

ChartGeometry moyal() { return load_geometry(2, ChartMode::symplectic, {{1, 2, S("1")}}, {}); }

ChartGeometry linear_special() {
  SpecialChartSpec spec;
  spec.d = 2;
  spec.g = {{1, 2, Rat(1)}};
  spec.f = {{1, 2, 1, Rat(1)}};
  return build_special_chart(spec);
}

ChartGeometry quadratic_special() {
  SpecialChartSpec spec;
  spec.d = 2;
  spec.g = {{1, 2, Rat(1)}};
  spec.rtilde = {{1, 2, 1, 1, Rat(2)}};
  return build_special_chart(spec);
}

ChartGeometry curved() {
  return load_geometry(2, ChartMode::symplectic, {{1, 2, S("1")}}, {{1, 1, 2, S("x2")}});
}

} // namespace

TEST_CASE("moyal chart has constant inverse and no derived structure") {
  auto g = moyal();
  CHECK(g.om(1, 2).equals(S("-1")));
  CHECK(g.om(2, 1).equals(S("1")));
  CHECK(g.torsion.is_zero());
  CHECK(g.curvature.is_zero());
  CHECK(g.curvature_tilde.is_zero());
  CHECK(g.curvature_raised.is_zero());
  CHECK(g.torsion_free());
}

TEST_CASE("theta entries may be given in either order") {
  auto a = load_geometry(2, ChartMode::symplectic, {{1, 2, S("1+x1")}}, {});
  auto b = load_geometry(2, ChartMode::symplectic, {{2, 1, S("-1-x1")}}, {});
  CHECK(a.th(1, 2).equals(b.th(1, 2)));
  CHECK(a.th(2, 1).equals(S("-1-x1")));
}

TEST_CASE("linear special chart reproduces the exact two by two inverse") {
  auto g = linear_special();
  CHECK(g.th(1, 2).equals(S("1+x1")));
  CHECK(g.om(1, 2).equals(S("-1/(1+x1)")));
  CHECK(g.om(2, 1).equals(S("1/(1+x1)")));
  CHECK(g.om(1, 1).is_zero());

  // Connection coefficients, against a termwise expansion of
  // theta^{ad} d_b omega_{dc} with the inverse written out by hand.
  ScalarExpr c = S("-1/(1+x1)");
  CHECK(g.G(1, 1, 1).equals(c));
  CHECK(g.G(2, 1, 2).equals(c));
  for (int r = 1; r <= 2; ++r)
    for (int m = 1; m <= 2; ++m)
      for (int n = 1; n <= 2; ++n)
        if (!(r == 1 && m == 1 && n == 1) && !(r == 2 && m == 1 && n == 2))
          CHECK(g.G(r, m, n).is_zero());

  CHECK(g.T(2, 1, 2).equals(c));
  CHECK(g.T(1, 1, 2).is_zero());
  CHECK(g.torsion.component({2}, {}, {1, 2}).equals(c));
}

TEST_CASE("gamma of a special chart matches an independent contraction") {
  for (const auto& g : {linear_special(), quadratic_special()}) {
    for (int a = 1; a <= g.d; ++a)
      for (int b = 1; b <= g.d; ++b)
        for (int c = 1; c <= g.d; ++c) {
          ScalarExpr v = ScalarExpr::zero(g.d);
          for (int e = 1; e <= g.d; ++e) v += g.th(a, e) * g.om(e, c).derivative(b);
          CHECK(g.G(a, b, c).equals(v));
        }
  }
}

TEST_CASE("quadratic special chart values") {
  auto g = quadratic_special();
  CHECK(g.th(1, 2).equals(S("1+x1^2")));
  CHECK(g.om(1, 2).equals(S("-1/(1+x1^2)")));
  ScalarExpr c = S("-2*x1/(1+x1^2)");
  CHECK(g.G(1, 1, 1).equals(c));
  CHECK(g.G(2, 1, 2).equals(c));
  CHECK(g.T(2, 1, 2).equals(c));
  // The tilde curvature raised by theta is nonzero here and symmetric in
  // its upper pair.
  CHECK(!g.curvature_raised.is_zero());
  CHECK(g.curvature_raised.component({1, 2}, {}, {1, 2})
            .equals(g.curvature_raised.component({2, 1}, {}, {1, 2})));
}

TEST_CASE("special charts are flat for the primary connection") {
  CHECK(moyal().curvature.is_zero());
  CHECK(linear_special().curvature.is_zero());
  CHECK(quadratic_special().curvature.is_zero());
}

TEST_CASE("omega inverts theta exactly after any symplectic load") {
  for (const auto& g : {moyal(), linear_special(), quadratic_special(), curved()}) {
    for (int m = 1; m <= g.d; ++m)
      for (int r = 1; r <= g.d; ++r) {
        ScalarExpr v = ScalarExpr::zero(g.d);
        for (int n = 1; n <= g.d; ++n) v += g.om(m, n) * g.th(n, r);
        CHECK(v.equals(ScalarExpr::constant(g.d, Rat(m == r ? 1 : 0))));
      }
  }
}

TEST_CASE("curved chart curvature components") {
  auto g = curved();
  CHECK(g.curvature.component({1}, {2}, {1, 2}).equals(S("-1")));
  // Only that component is present.
  CHECK(g.curvature.components().size() == 1);
  // The tilde connection of this chart is flat.
  CHECK(g.curvature_tilde.is_zero());
  CHECK(g.curvature_raised.is_zero());
}

TEST_CASE("curvature matches the connection one-form definition") {
  // dGamma^m_n + Gamma^m_t ^ Gamma^t_n, built from explicit one-forms.
  auto torsionful = load_geometry(2, ChartMode::symplectic, {{1, 2, S("1")}},
                                  {{1, 1, 2, S("x2")}, {2, 1, 1, S("x1")}, {1, 2, 2, S("x1*x2")}});
  for (const auto& g : {curved(), torsionful, linear_special(), quadratic_special()}) {
    for (auto sel : {ConnectionSelector::primary, ConnectionSelector::tilde}) {
      auto one_form = [&](int m, int n) {
        TensorValuedForm w(g.d, 0, 0, 1);
        for (int r = 1; r <= g.d; ++r) w.accumulate({}, {}, {r}, gsel(g, sel, m, r, n));
        return w;
      };
      auto computed = compute_curvature(g, sel);
      for (int m = 1; m <= g.d; ++m)
        for (int n = 1; n <= g.d; ++n) {
          auto rf = exterior_derivative(one_form(m, n));
          for (int t = 1; t <= g.d; ++t) rf += wedge(one_form(m, t), one_form(t, n));
          for (int a = 1; a <= g.d; ++a)
            for (int b = a + 1; b <= g.d; ++b)
              CHECK(computed.component({m}, {n}, {a, b}).equals(rf.component({}, {}, {a, b})));
        }
    }
  }
}

TEST_CASE("poisson mode allows a degenerate bivector and skips omega") {
  auto g = load_geometry(3, ChartMode::poisson, {{1, 2, S("1", 3)}}, {});
  CHECK(g.omega.empty());
  CHECK_THROWS_AS(g.om(1, 2), Error);
  CHECK_THROWS_AS(raise_curvature(g), Error);
  try {
    raise_curvature(g);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::prerequisite);
  }
  CHECK(g.curvature.is_zero());
  CHECK(g.curvature_tilde.is_zero());
  // The same bivector is rejected in symplectic mode: odd dimension.
  CHECK_THROWS_AS(load_geometry(3, ChartMode::symplectic, {{1, 2, S("1", 3)}}, {}), Error);
}

TEST_CASE("invalid chart data is rejected") {
  // Conflicting mirror entries.
  CHECK_THROWS_AS(load_geometry(2, ChartMode::symplectic, {{1, 2, S("1")}, {2, 1, S("1")}}, {}),
                  Error);
  // Nonzero diagonal.
  CHECK_THROWS_AS(load_geometry(2, ChartMode::symplectic, {{1, 1, S("1")}}, {}), Error);
  // Index out of range.
  CHECK_THROWS_AS(load_geometry(2, ChartMode::symplectic, {{1, 3, S("1")}}, {}), Error);
  // Wrong scalar dimension.
  CHECK_THROWS_AS(load_geometry(2, ChartMode::symplectic, {{1, 2, S("1", 3)}}, {}), Error);
  // Duplicate gamma entry.
  CHECK_THROWS_AS(load_geometry(2, ChartMode::symplectic, {{1, 2, S("1")}},
                                {{1, 1, 1, S("x1")}, {1, 1, 1, S("x1")}}),
                  Error);
  // Singular theta in symplectic mode.
  CHECK_THROWS_AS(load_geometry(2, ChartMode::symplectic, {}, {}), Error);
  // Degenerate special chart.
  SpecialChartSpec empty;
  empty.d = 2;
  CHECK_THROWS_AS(build_special_chart(empty), Error);
  // Special coefficients breaking pair antisymmetry.
  SpecialChartSpec bad;
  bad.d = 2;
  bad.g = {{1, 2, Rat(1)}, {2, 1, Rat(1)}};
  CHECK_THROWS_AS(build_special_chart(bad), Error);
  SpecialChartSpec diag;
  diag.d = 2;
  diag.g = {{1, 1, Rat(1)}};
  CHECK_THROWS_AS(build_special_chart(diag), Error);
}

TEST_CASE("larger special chart inverts exactly in dimension four") {
  SpecialChartSpec spec;
  spec.d = 4;
  spec.g = {{1, 2, Rat(1)}, {3, 4, Rat(1)}};
  spec.f = {{1, 2, 3, Rat(1)}, {1, 4, 1, Rat(2)}};
  auto g = build_special_chart(spec);
  CHECK(g.th(1, 2).equals(S("1+x3", 4)));
  CHECK(g.th(1, 4).equals(S("2*x1", 4)));
  for (int m = 1; m <= 4; ++m)
    for (int r = 1; r <= 4; ++r) {
      ScalarExpr v = ScalarExpr::zero(4);
      for (int n = 1; n <= 4; ++n) v += g.om(m, n) * g.th(n, r);
      CHECK(v.equals(ScalarExpr::constant(4, Rat(m == r ? 1 : 0))));
    }
  CHECK(g.curvature.is_zero());
}

TEST_CASE("torsion two-form collects the antisymmetrized coefficients") {
  auto g = load_geometry(2, ChartMode::symplectic, {{1, 2, S("1")}},
                         {{2, 1, 2, S("x1")}, {2, 2, 1, S("x2")}});
  CHECK(g.T(2, 1, 2).equals(S("x1 - x2")));
  CHECK(g.T(2, 2, 1).equals(S("x2 - x1")));
  CHECK(g.torsion.component({2}, {}, {1, 2}).equals(S("x1 - x2")));
  CHECK(g.torsion.component({2}, {}, {2, 1}).equals(S("x2 - x1")));
  CHECK(!g.torsion_free());
}
