#pragma once

#include <string>
#include <vector>

#include <covstar/calculus.hpp>
#include <covstar/constraints.hpp>
#include <covstar/geometry.hpp>
#include <covstar/tensor_form.hpp>

namespace covstar {

// A deformation series truncated at some order: coefficients[n] multiplies
// the n-th power of the deformation parameter.
struct StarSeries {
  std::vector<TensorValuedForm> coefficients;
  int order() const { return (int)coefficients.size() - 1; }
  bool is_zero() const {
    for (const auto& c : coefficients)
      if (!c.is_zero()) return false;
    return true;
  }
};

namespace detail {

inline void check_operand(const TensorValuedForm& a, const ChartGeometry& g) {
  if (a.dim() != g.d) fail_input("operand dimension does not match the chart");
}

inline ScalarExpr scalar_operand(const TensorValuedForm& a) {
  if (a.upper_rank() != 0 || a.lower_rank() != 0 || a.degree() != 0)
    fail_input("operand must be a scalar function (no tensor slots, degree zero)");
  return a.component({}, {}, {});
}

// theta^{lambda tau} (grad_lambda A) wedge (grad_tau B): the first term of the
// bracket and the whole tensor bracket for zero-form operands.
inline TensorValuedForm theta_nabla_wedge(const TensorValuedForm& a, const TensorValuedForm& b,
                                          const ChartGeometry& g) {
  const int d = g.d;
  TensorValuedForm r(d, a.upper_rank() + b.upper_rank(), a.lower_rank() + b.lower_rank(),
                     a.degree() + b.degree());
  TensorValuedForm na = nabla_all(a, g, ConnectionSelector::primary);
  TensorValuedForm nb = nabla_all(b, g, ConnectionSelector::primary);
  for (int lam = 1; lam <= d; ++lam)
    for (int tau = 1; tau <= d; ++tau) {
      ScalarExpr tv = g.th(lam, tau);
      if (tv.is_zero()) continue;
      TensorValuedForm sa = slice_lower_front(na, {lam});
      if (sa.is_zero()) continue;
      TensorValuedForm sb = slice_lower_front(nb, {tau});
      if (sb.is_zero()) continue;
      r += tv * wedge(sa, sb);
    }
  return r;
}

}  // namespace detail

// Bivector contraction with the gradients of a scalar function, as a vector
// field: X^mu = theta^{nu mu} d_nu f.
inline TensorValuedForm hamiltonian_field(const ScalarExpr& f, const ChartGeometry& g) {
  if (f.dim() != g.d) fail_input("function dimension does not match the chart");
  const int d = g.d;
  TensorValuedForm x(d, 1, 0, 0);
  for (int mu = 1; mu <= d; ++mu) {
    ScalarExpr s = ScalarExpr::zero(d);
    for (int nu = 1; nu <= d; ++nu) s += g.th(nu, mu) * f.derivative(nu);
    x.accumulate({mu}, {}, {}, s);
  }
  return x;
}

inline TensorValuedForm hamiltonian_field(const TensorValuedForm& f, const ChartGeometry& g) {
  detail::check_operand(f, g);
  return hamiltonian_field(detail::scalar_operand(f), g);
}

// Graded bracket of tensor-valued forms.  The gradient term contracts the
// bivector with one covariant derivative of each operand; for operands of
// nonzero degree a raised-curvature correction acts through interior
// products.  Degenerate charts only support zero-form operands.
inline TensorValuedForm poisson_bracket(const TensorValuedForm& a, const TensorValuedForm& b,
                                        const ChartGeometry& g) {
  detail::check_operand(a, g);
  detail::check_operand(b, g);
  if (g.mode == ChartMode::poisson && (a.degree() > 0 || b.degree() > 0))
    fail_prereq("bracket of forms of nonzero degree requires a symplectic chart");
  const int d = g.d;
  TensorValuedForm r = detail::theta_nabla_wedge(a, b, g);
  if (a.degree() > 0 && b.degree() > 0) {
    Rat sign = (a.degree() % 2 == 0) ? Rat(1) : Rat(-1);
    for (int lam = 1; lam <= d; ++lam) {
      TensorValuedForm ia = interior(a, lam);
      if (ia.is_zero()) continue;
      for (int tau = 1; tau <= d; ++tau) {
        TensorValuedForm rr = slice_upper_front(g.curvature_raised, {lam, tau});
        if (rr.is_zero()) continue;
        TensorValuedForm ib = interior(b, tau);
        if (ib.is_zero()) continue;
        r += sign * wedge(rr, wedge(ia, ib));
      }
    }
  }
  return r;
}

// Bracket of tensor-valued functions (zero-forms) on any chart; the result
// keeps the operands' tensor slots side by side.
inline TensorValuedForm pb_tensor(const TensorValuedForm& a, const TensorValuedForm& b,
                                  const ChartGeometry& g) {
  detail::check_operand(a, g);
  detail::check_operand(b, g);
  if (a.degree() != 0 || b.degree() != 0)
    fail_input("tensor bracket requires zero-form operands");
  return detail::theta_nabla_wedge(a, b, g);
}

// Second-order coefficient of the covariant star product of tensor-valued
// forms.  Zero-form operands keep only the two gradient terms; the three
// interior-product terms need the raised curvature and hence a symplectic
// chart.
inline TensorValuedForm c2_forms(const TensorValuedForm& a, const TensorValuedForm& b,
                                 const ChartGeometry& g) {
  detail::check_operand(a, g);
  detail::check_operand(b, g);
  if (g.mode == ChartMode::poisson && (a.degree() > 0 || b.degree() > 0))
    fail_prereq("second star coefficient of forms of nonzero degree requires a symplectic chart");
  const int d = g.d;
  const int pa = a.degree(), pb = b.degree();
  const auto primary = ConnectionSelector::primary;
  TensorValuedForm r(d, a.upper_rank() + b.upper_rank(), a.lower_rank() + b.lower_rank(),
                     pa + pb);

  TensorValuedForm na1 = nabla_all(a, g, primary);
  TensorValuedForm na2 = nabla_all(na1, g, primary);
  TensorValuedForm nb1 = nabla_all(b, g, primary);
  TensorValuedForm nb2 = nabla_all(nb1, g, primary);

  // Double-gradient term, weight 1/2.
  for (int l1 = 1; l1 <= d; ++l1)
    for (int t1 = 1; t1 <= d; ++t1) {
      ScalarExpr tv1 = g.th(l1, t1);
      if (tv1.is_zero()) continue;
      for (int l2 = 1; l2 <= d; ++l2)
        for (int t2 = 1; t2 <= d; ++t2) {
          ScalarExpr tv2 = g.th(l2, t2);
          if (tv2.is_zero()) continue;
          TensorValuedForm sa = slice_lower_front(na2, {l1, l2});
          if (sa.is_zero()) continue;
          TensorValuedForm sb = slice_lower_front(nb2, {t1, t2});
          if (sb.is_zero()) continue;
          r += Rat(1, 2) * ((tv1 * tv2) * wedge(sa, sb));
        }
    }

  // Mixed term, weight 1/3: the coefficient combines one gradient of the
  // bivector with a double bivector-torsion contraction.
  for (int l1 = 1; l1 <= d; ++l1)
    for (int l2 = 1; l2 <= d; ++l2)
      for (int t2 = 1; t2 <= d; ++t2) {
        ScalarExpr k = ScalarExpr::zero(d);
        for (int t1 = 1; t1 <= d; ++t1)
          k += g.th(l1, t1) * nabla_theta(g, primary, t1, l2, t2);
        for (int ph = 1; ph <= d; ++ph)
          for (int ch = 1; ch <= d; ++ch)
            k += ScalarExpr::constant(d, Rat(1, 2)) *
                 (g.th(l2, ph) * g.th(t2, ch) * g.T(l1, ph, ch));
        if (k.is_zero()) continue;
        TensorValuedForm part(d, r.upper_rank(), r.lower_rank(), r.degree());
        TensorValuedForm sa2 = slice_lower_front(na2, {l1, l2});
        TensorValuedForm sb1 = slice_lower_front(nb1, {t2});
        if (!sa2.is_zero() && !sb1.is_zero()) part += wedge(sa2, sb1);
        TensorValuedForm sa1 = slice_lower_front(na1, {t2});
        TensorValuedForm sb2 = slice_lower_front(nb2, {l1, l2});
        if (!sa1.is_zero() && !sb2.is_zero()) part += wedge(sa1, sb2);
        if (part.is_zero()) continue;
        r += Rat(1, 3) * (k * part);
      }

  if (g.mode != ChartMode::symplectic || pa == 0 || pb == 0) return r;

  Rat sgn_a = (pa % 2 == 0) ? Rat(1) : Rat(-1);
  TensorValuedForm nia = nabla_all(interior_all(a), g, primary);
  TensorValuedForm nib = nabla_all(interior_all(b), g, primary);

  // Curvature-gradient cross term, weight 1 and the operand-degree sign.
  for (int l1 = 1; l1 <= d; ++l1)
    for (int t1 = 1; t1 <= d; ++t1) {
      ScalarExpr tv = g.th(l1, t1);
      if (tv.is_zero()) continue;
      for (int l2 = 1; l2 <= d; ++l2)
        for (int t2 = 1; t2 <= d; ++t2) {
          TensorValuedForm rr = slice_upper_front(g.curvature_raised, {l2, t2});
          if (rr.is_zero()) continue;
          TensorValuedForm sa = slice_lower_front(nia, {l1, l2});
          if (sa.is_zero()) continue;
          TensorValuedForm sb = slice_lower_front(nib, {t1, t2});
          if (sb.is_zero()) continue;
          r += sgn_a * (tv * wedge(rr, wedge(sa, sb)));
        }
    }

  // Double-curvature term, weight -1/2, with two interior products on each
  // operand.
  if (pa >= 2 && pb >= 2) {
    TensorValuedForm iia = interior_all(interior_all(a));
    TensorValuedForm iib = interior_all(interior_all(b));
    for (int l1 = 1; l1 <= d; ++l1)
      for (int t1 = 1; t1 <= d; ++t1) {
        TensorValuedForm rr1 = slice_upper_front(g.curvature_raised, {l1, t1});
        if (rr1.is_zero()) continue;
        for (int l2 = 1; l2 <= d; ++l2)
          for (int t2 = 1; t2 <= d; ++t2) {
            TensorValuedForm rr2 = slice_upper_front(g.curvature_raised, {l2, t2});
            if (rr2.is_zero()) continue;
            TensorValuedForm sa = slice_lower_front(iia, {l1, l2});
            if (sa.is_zero()) continue;
            TensorValuedForm sb = slice_lower_front(iib, {t1, t2});
            if (sb.is_zero()) continue;
            r += Rat(-1, 2) * wedge(rr1, wedge(rr2, wedge(sa, sb)));
          }
      }
  }

  // Curvature-interior-curvature term, weight -1/3.
  if (pa + pb >= 3) {
    TensorValuedForm ia = interior_all(a);
    TensorValuedForm ib = interior_all(b);
    TensorValuedForm iia = pa >= 2 ? interior_all(interior_all(a))
                                   : TensorValuedForm(d, a.upper_rank(), a.lower_rank() + 2, 0);
    TensorValuedForm iib = pb >= 2 ? interior_all(interior_all(b))
                                   : TensorValuedForm(d, b.upper_rank(), b.lower_rank() + 2, 0);
    for (int l1 = 1; l1 <= d; ++l1)
      for (int t1 = 1; t1 <= d; ++t1) {
        TensorValuedForm rr1 = slice_upper_front(g.curvature_raised, {l1, t1});
        if (rr1.is_zero()) continue;
        for (int l2 = 1; l2 <= d; ++l2)
          for (int t2 = 1; t2 <= d; ++t2) {
            TensorValuedForm irr2 =
                interior(slice_upper_front(g.curvature_raised, {l2, t2}), t1);
            if (irr2.is_zero()) continue;
            TensorValuedForm part(d, r.upper_rank(), r.lower_rank(), pa + pb - 3);
            if (pa >= 2 && pb >= 1) {
              TensorValuedForm sa = slice_lower_front(iia, {l1, l2});
              TensorValuedForm sb = slice_lower_front(ib, {t2});
              if (!sa.is_zero() && !sb.is_zero()) part += sgn_a * wedge(sa, sb);
            }
            if (pa >= 1 && pb >= 2) {
              TensorValuedForm sa = slice_lower_front(ia, {l2});
              TensorValuedForm sb = slice_lower_front(iib, {l1, t2});
              if (!sa.is_zero() && !sb.is_zero()) part += wedge(sa, sb);
            }
            if (part.is_zero()) continue;
            r += Rat(-1, 3) * wedge(rr1, wedge(irr2, part));
          }
      }
  }
  return r;
}

// Covariant derivative of the connection along the bivector contraction of a
// scalar function's gradient, as a (1,2)-tensor.  It is symmetric in the two
// covariant slots when the connection is torsion-free, which the computation
// requires.
inline TensorValuedForm lie_connection(const ScalarExpr& f, const ChartGeometry& g) {
  if (f.dim() != g.d) fail_input("function dimension does not match the chart");
  if (!g.torsion_free())
    fail_prereq("the connection variation field requires a torsion-free connection");
  const int d = g.d;
  const auto primary = ConnectionSelector::primary;

  TensorValuedForm f0 = scalar_form(f);
  TensorValuedForm f1 = nabla_all(f0, g, primary);
  TensorValuedForm f2 = nabla_all(f1, g, primary);
  TensorValuedForm f3 = nabla_all(f2, g, primary);

  TensorValuedForm theta_form(d, 2, 0, 0);
  for (int m = 1; m <= d; ++m)
    for (int n = 1; n <= d; ++n) theta_form.accumulate({m, n}, {}, {}, g.th(m, n));
  TensorValuedForm th2 = second_covariant_derivative(theta_form, g, primary);

  TensorValuedForm x = hamiltonian_field(f, g);

  TensorValuedForm r(d, 1, 2, 0);
  for (int mu = 1; mu <= d; ++mu)
    for (int nu = 1; nu <= d; ++nu)
      for (int rho = 1; rho <= d; ++rho) {
        ScalarExpr s = ScalarExpr::zero(d);
        for (int sg = 1; sg <= d; ++sg) {
          s += g.th(sg, mu) * f3.component({}, {nu, rho, sg}, {});
          s += nabla_theta(g, primary, nu, sg, mu) * f2.component({}, {rho, sg}, {});
          s += nabla_theta(g, primary, rho, sg, mu) * f2.component({}, {nu, sg}, {});
          s += th2.component({sg, mu}, {nu, rho}, {}) * f1.component({}, {sg}, {});
          s += g.curvature.component({mu}, {rho}, {sg, nu}) * x.component({sg}, {}, {});
        }
        r.accumulate({mu}, {nu, rho}, {}, s);
      }
  return r;
}

// Second-order star coefficient for scalar functions on any chart with a
// torsion-free connection; the bivector need not be invertible.
inline ScalarExpr c2_function(const ScalarExpr& f, const ScalarExpr& h, const ChartGeometry& g) {
  if (f.dim() != g.d || h.dim() != g.d) fail_input("function dimension does not match the chart");
  if (!g.torsion_free())
    fail_prereq("the function star product requires a torsion-free connection");
  const int d = g.d;
  const auto primary = ConnectionSelector::primary;
  TensorValuedForm f2 = second_covariant_derivative(scalar_form(f), g, primary);
  TensorValuedForm h2 = second_covariant_derivative(scalar_form(h), g, primary);
  auto nt = [&](int tau, int mu, int nu) { return nabla_theta(g, primary, tau, mu, nu); };

  ScalarExpr r = ScalarExpr::zero(d);
  for (int mu = 1; mu <= d; ++mu)
    for (int nu = 1; nu <= d; ++nu)
      for (int rho = 1; rho <= d; ++rho)
        for (int sg = 1; sg <= d; ++sg) {
          ScalarExpr w = g.th(mu, nu) * g.th(rho, sg);
          if (!w.is_zero())
            r += ScalarExpr::constant(d, Rat(1, 2)) * w *
                 (f2.component({}, {mu, rho}, {}) * h2.component({}, {nu, sg}, {}));
          ScalarExpr m = g.th(mu, sg) * nt(sg, nu, rho);
          if (!m.is_zero())
            r += ScalarExpr::constant(d, Rat(1, 3)) * m *
                 (f2.component({}, {mu, nu}, {}) * h.derivative(rho) +
                  f.derivative(rho) * h2.component({}, {mu, nu}, {}));
          // The coefficient of this symmetric first-order term is invisible
          // to the second-order associativity check and is pinned to -1/6 by
          // associativity at third order.
          ScalarExpr q = nt(rho, mu, nu) * nt(mu, rho, sg);
          if (!q.is_zero())
            r += ScalarExpr::constant(d, Rat(-1, 6)) * q * (f.derivative(nu) * h.derivative(sg));
        }
  return r;
}

// Third-order star coefficient for scalar functions: a bivector contraction
// of two connection variation fields.
inline ScalarExpr c3_function(const ScalarExpr& f, const ScalarExpr& h, const ChartGeometry& g) {
  if (f.dim() != g.d || h.dim() != g.d) fail_input("function dimension does not match the chart");
  if (!g.torsion_free())
    fail_prereq("the function star product requires a torsion-free connection");
  const int d = g.d;
  TensorValuedForm lf = lie_connection(f, g);
  TensorValuedForm lh = lie_connection(h, g);
  ScalarExpr r = ScalarExpr::zero(d);
  for (int rho = 1; rho <= d; ++rho)
    for (int sg = 1; sg <= d; ++sg) {
      ScalarExpr tv = g.th(rho, sg);
      if (tv.is_zero()) continue;
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = 1; nu <= d; ++nu)
          r += ScalarExpr::constant(d, Rat(-1, 6)) * tv *
               (lf.component({mu}, {nu, rho}, {}) * lh.component({nu}, {mu, sg}, {}));
    }
  return r;
}

// Star product of scalar functions through third order.  Works on any chart
// whose connection is torsion-free; the bivector may be degenerate.
inline StarSeries star_functions(const ScalarExpr& f, const ScalarExpr& h,
                                 const ChartGeometry& g, int order) {
  if (order < 0 || order > 3) fail_input("function star order must be between 0 and 3");
  if (f.dim() != g.d || h.dim() != g.d) fail_input("function dimension does not match the chart");
  if (!g.torsion_free())
    fail_prereq("the function star product requires a torsion-free connection");
  const int d = g.d;
  StarSeries s;
  s.coefficients.push_back(scalar_form(f * h));
  if (order >= 1) {
    ScalarExpr pb = ScalarExpr::zero(d);
    for (int mu = 1; mu <= d; ++mu)
      for (int nu = 1; nu <= d; ++nu) pb += g.th(mu, nu) * (f.derivative(mu) * h.derivative(nu));
    s.coefficients.push_back(scalar_form(pb));
  }
  if (order >= 2) s.coefficients.push_back(scalar_form(c2_function(f, h, g)));
  if (order >= 3) s.coefficients.push_back(scalar_form(c3_function(f, h, g)));
  return s;
}

// Covariant star product of tensor-valued forms through second order, or
// third order for scalar function operands.  On degenerate charts the
// second-order coefficient requires the covariant compatibility constraints
// between the bivector and the connection.
inline StarSeries star(const TensorValuedForm& a, const TensorValuedForm& b,
                       const ChartGeometry& g, int order) {
  detail::check_operand(a, g);
  detail::check_operand(b, g);
  if (order < 0) fail_input("star order must be nonnegative");
  bool scalars = a.upper_rank() == 0 && a.lower_rank() == 0 && a.degree() == 0 &&
                 b.upper_rank() == 0 && b.lower_rank() == 0 && b.degree() == 0;
  if (order > 2) {
    if (!scalars || order > 3)
      fail_input("star orders above 2 are only available for scalar function operands");
    return star_functions(detail::scalar_operand(a), detail::scalar_operand(b), g, order);
  }
  StarSeries s;
  s.coefficients.push_back(wedge(a, b));
  if (order >= 1) s.coefficients.push_back(poisson_bracket(a, b, g));
  if (order >= 2) {
    if (g.mode == ChartMode::poisson)
      require_constraints(g,
                          {ConstraintId::poisson_jacobi_no3, ConstraintId::poisson_assoc_no4,
                           ConstraintId::theta2_r_zero},
                          "the order 2 star on a degenerate chart");
    s.coefficients.push_back(c2_forms(a, b, g));
  }
  return s;
}

// Star product in the flat covariantly-constant case: the n-th coefficient is
// the n-fold bivector contraction of iterated derivatives, weight 1/n!.
inline StarSeries star_torsion_free(const TensorValuedForm& a, const TensorValuedForm& b,
                                    const ChartGeometry& g, int order) {
  detail::check_operand(a, g);
  detail::check_operand(b, g);
  if (order < 0) fail_input("star order must be nonnegative");
  if (!g.torsion_free()) fail_prereq("this star product form requires a torsion-free connection");
  if (!g.curvature.is_zero()) fail_prereq("this star product form requires a flat connection");
  const int d = g.d;
  for (int tau = 1; tau <= d; ++tau)
    for (int mu = 1; mu <= d; ++mu)
      for (int nu = mu + 1; nu <= d; ++nu)
        if (!nabla_theta(g, ConnectionSelector::primary, tau, mu, nu).is_zero())
          fail_prereq("this star product form requires a covariantly constant bivector");

  StarSeries s;
  s.coefficients.push_back(wedge(a, b));
  TensorValuedForm na = a, nb = b;
  Rat fact(1);
  for (int n = 1; n <= order; ++n) {
    na = nabla_all(na, g, ConnectionSelector::primary);
    nb = nabla_all(nb, g, ConnectionSelector::primary);
    fact *= n;
    TensorValuedForm cn(d, a.upper_rank() + b.upper_rank(), a.lower_rank() + b.lower_rank(),
                        a.degree() + b.degree());
    std::vector<int> lam(n, 1), tau(n, 1);
    auto advance = [&](std::vector<int>& v) {
      for (int i = n - 1; i >= 0; --i) {
        if (v[i] < d) {
          ++v[i];
          return true;
        }
        v[i] = 1;
      }
      return false;
    };
    do {
      TensorValuedForm sa = slice_lower_front(na, lam);
      if (sa.is_zero()) continue;
      std::fill(tau.begin(), tau.end(), 1);
      do {
        ScalarExpr w = ScalarExpr::constant(d, 1);
        for (int i = 0; i < n; ++i) w = w * g.th(lam[i], tau[i]);
        if (w.is_zero()) continue;
        TensorValuedForm sb = slice_lower_front(nb, tau);
        if (sb.is_zero()) continue;
        cn += w * wedge(sa, sb);
      } while (advance(tau));
    } while (advance(lam));
    s.coefficients.push_back(Rat(1) / fact * cn);
  }
  return s;
}

// Order-by-order associativity residual A (star) (B star C) minus
// (A star B) (star) C.  Orders up to 2 work for arbitrary operands; order 3
// requires scalar functions and uses the function star coefficients
// throughout.
inline StarSeries associator(const TensorValuedForm& a, const TensorValuedForm& b,
                             const TensorValuedForm& c, const ChartGeometry& g, int order) {
  detail::check_operand(a, g);
  detail::check_operand(b, g);
  detail::check_operand(c, g);
  if (order < 0) fail_input("star order must be nonnegative");
  StarSeries s;
  if (order > 2) {
    if (order > 3) fail_input("star orders above 3 are not implemented");
    ScalarExpr fa = detail::scalar_operand(a);
    ScalarExpr fb = detail::scalar_operand(b);
    ScalarExpr fc = detail::scalar_operand(c);
    if (!g.torsion_free())
      fail_prereq("the function star product requires a torsion-free connection");
    const int d = g.d;
    auto cf = [&](int i, const ScalarExpr& x, const ScalarExpr& y) -> ScalarExpr {
      switch (i) {
        case 0: return x * y;
        case 1: {
          ScalarExpr pb = ScalarExpr::zero(d);
          for (int mu = 1; mu <= d; ++mu)
            for (int nu = 1; nu <= d; ++nu)
              pb += g.th(mu, nu) * (x.derivative(mu) * y.derivative(nu));
          return pb;
        }
        case 2: return c2_function(x, y, g);
        default: return c3_function(x, y, g);
      }
    };
    for (int n = 0; n <= order; ++n) {
      ScalarExpr res = ScalarExpr::zero(d);
      for (int i = 0; i <= n; ++i) {
        int j = n - i;
        res += cf(i, fa, cf(j, fb, fc));
        res -= cf(i, cf(j, fa, fb), fc);
      }
      s.coefficients.push_back(scalar_form(res));
    }
    return s;
  }
  auto cn = [&](int i, const TensorValuedForm& x, const TensorValuedForm& y) {
    switch (i) {
      case 0: return wedge(x, y);
      case 1: return poisson_bracket(x, y, g);
      default: return c2_forms(x, y, g);
    }
  };
  for (int n = 0; n <= order; ++n) {
    TensorValuedForm res(g.d, a.upper_rank() + b.upper_rank() + c.upper_rank(),
                         a.lower_rank() + b.lower_rank() + c.lower_rank(),
                         a.degree() + b.degree() + c.degree());
    for (int i = 0; i <= n; ++i) {
      int j = n - i;
      res += cn(i, a, cn(j, b, c));
      res -= cn(i, cn(j, a, b), c);
    }
    s.coefficients.push_back(res);
  }
  return s;
}

// Graded Jacobi combination of three forms, with the cyclic terms' tensor
// blocks permuted back to (A, B, C) order.
inline TensorValuedForm graded_jacobiator(const TensorValuedForm& a, const TensorValuedForm& b,
                                          const TensorValuedForm& c, const ChartGeometry& g) {
  const int pa = a.degree(), pb = b.degree(), pc = c.degree();
  std::pair<int, int> ba{a.upper_rank(), a.lower_rank()};
  std::pair<int, int> bb{b.upper_rank(), b.lower_rank()};
  std::pair<int, int> bc{c.upper_rank(), c.lower_rank()};

  TensorValuedForm j = poisson_bracket(a, poisson_bracket(b, c, g), g);

  TensorValuedForm t2 = poisson_bracket(b, poisson_bracket(c, a, g), g);
  t2 = reorder_blocks(t2, {bb, bc, ba}, {2, 0, 1});
  Rat s2 = (pa * (pb + pc)) % 2 == 0 ? Rat(1) : Rat(-1);

  TensorValuedForm t3 = poisson_bracket(c, poisson_bracket(a, b, g), g);
  t3 = reorder_blocks(t3, {bc, ba, bb}, {1, 2, 0});
  Rat s3 = ((pa + pb) * pc) % 2 == 0 ? Rat(1) : Rat(-1);

  return j + s2 * t2 + s3 * t3;
}

// Residual of the exterior covariant derivative acting as a graded derivation
// of the bracket.
inline TensorValuedForm leibniz_residual(const TensorValuedForm& a, const TensorValuedForm& b,
                                         const ChartGeometry& g) {
  const auto primary = ConnectionSelector::primary;
  Rat sign = (a.degree() % 2 == 0) ? Rat(1) : Rat(-1);
  TensorValuedForm lhs = exterior_covariant_derivative(poisson_bracket(a, b, g), g, primary);
  lhs -= poisson_bracket(exterior_covariant_derivative(a, g, primary), b, g);
  lhs -= sign * poisson_bracket(a, exterior_covariant_derivative(b, g, primary), g);
  return lhs;
}

}  // namespace covstar
