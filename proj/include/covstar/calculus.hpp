#pragma once

#include <utility>
#include <vector>

#include <covstar/geometry.hpp>
#include <covstar/tensor_form.hpp>

namespace covstar {

// Covariant derivative along the coordinate direction rho, componentwise on
// the coefficients of a tensor-valued form.  Every slot is corrected with a
// connection coefficient: contravariant slots gain a positive term, covariant
// slots and form slots a negative one.  The selector picks which lower index
// of Gamma carries the derivative direction.
inline TensorValuedForm covariant_derivative(const TensorValuedForm& a, const ChartGeometry& g,
                                             ConnectionSelector sel, int rho) {
  if (a.dim() != g.d) fail_input("form dimension does not match the chart");
  detail::check_chart_index(rho, g.d);
  TensorValuedForm r(g.d, a.upper_rank(), a.lower_rank(), a.degree());
  for (const auto& [key, v] : a.components()) {
    ScalarExpr dv = v.derivative(rho);
    if (!dv.is_zero()) r.accumulate(key.up, key.lo, key.form, dv);
    for (size_t i = 0; i < key.up.size(); ++i)
      for (int m = 1; m <= g.d; ++m) {
        const ScalarExpr& c = gsel(g, sel, m, rho, key.up[i]);
        if (c.is_zero()) continue;
        std::vector<int> up = key.up;
        up[i] = m;
        r.accumulate(std::move(up), key.lo, key.form, c * v);
      }
    for (size_t j = 0; j < key.lo.size(); ++j)
      for (int b = 1; b <= g.d; ++b) {
        const ScalarExpr& c = gsel(g, sel, key.lo[j], rho, b);
        if (c.is_zero()) continue;
        std::vector<int> lo = key.lo;
        lo[j] = b;
        r.accumulate(key.up, std::move(lo), key.form, -(c * v));
      }
    for (size_t j = 0; j < key.form.size(); ++j)
      for (int b = 1; b <= g.d; ++b) {
        const ScalarExpr& c = gsel(g, sel, key.form[j], rho, b);
        if (c.is_zero()) continue;
        std::vector<int> form = key.form;
        form[j] = b;
        r.accumulate(key.up, key.lo, std::move(form), -(c * v));
      }
  }
  return r;
}

// All covariant derivatives at once.  The derivative direction becomes a new
// covariant slot in front, so slicing the result at {rho} recovers
// covariant_derivative(a, g, sel, rho).  Iterating records the outermost
// derivative first, and the outer derivative corrects the inner one's slot.
inline TensorValuedForm nabla_all(const TensorValuedForm& a, const ChartGeometry& g,
                                  ConnectionSelector sel) {
  TensorValuedForm r(g.d, a.upper_rank(), a.lower_rank() + 1, a.degree());
  for (int rho = 1; rho <= g.d; ++rho) {
    TensorValuedForm da = covariant_derivative(a, g, sel, rho);
    for (const auto& [key, v] : da.components()) {
      std::vector<int> lo = key.lo;
      lo.insert(lo.begin(), rho);
      r.accumulate(key.up, std::move(lo), key.form, v);
    }
  }
  return r;
}

// Second covariant derivative with both directions materialized; slicing the
// two leading covariant slots at {rho, sigma} gives the derivative taken
// first along sigma and then along rho.
inline TensorValuedForm second_covariant_derivative(const TensorValuedForm& a,
                                                    const ChartGeometry& g,
                                                    ConnectionSelector sel) {
  return nabla_all(nabla_all(a, g, sel), g, sel);
}

// Exterior covariant derivative: the plain exterior derivative plus one
// connection one-form wedged in from the left for every tensor slot.  Form
// slots receive no correction here; the degree rises by one.
inline TensorValuedForm exterior_covariant_derivative(const TensorValuedForm& a,
                                                      const ChartGeometry& g,
                                                      ConnectionSelector sel) {
  if (a.dim() != g.d) fail_input("form dimension does not match the chart");
  TensorValuedForm r = exterior_derivative(a);
  for (const auto& [key, v] : a.components())
    for (int s = 1; s <= g.d; ++s) {
      for (size_t i = 0; i < key.up.size(); ++i)
        for (int m = 1; m <= g.d; ++m) {
          const ScalarExpr& c = gsel(g, sel, m, s, key.up[i]);
          if (c.is_zero()) continue;
          std::vector<int> up = key.up;
          up[i] = m;
          std::vector<int> form = key.form;
          form.insert(form.begin(), s);
          r.accumulate(std::move(up), key.lo, std::move(form), c * v);
        }
      for (size_t j = 0; j < key.lo.size(); ++j)
        for (int b = 1; b <= g.d; ++b) {
          const ScalarExpr& c = gsel(g, sel, key.lo[j], s, b);
          if (c.is_zero()) continue;
          std::vector<int> lo = key.lo;
          lo[j] = b;
          std::vector<int> form = key.form;
          form.insert(form.begin(), s);
          r.accumulate(key.up, std::move(lo), std::move(form), -(c * v));
        }
    }
  return r;
}

// Curvature of the selected connection wedged against every tensor slot:
// the closed form of applying the exterior covariant derivative twice.
// Contravariant slots contract with the curvature's covariant index and
// enter positively; covariant slots contract with its contravariant index
// and enter negatively.  The degree rises by two.
inline TensorValuedForm curvature_action(const TensorValuedForm& a, const ChartGeometry& g,
                                         ConnectionSelector sel) {
  if (a.dim() != g.d) fail_input("form dimension does not match the chart");
  const TensorValuedForm& rf =
      sel == ConnectionSelector::primary ? g.curvature : g.curvature_tilde;
  TensorValuedForm r(g.d, a.upper_rank(), a.lower_rank(), a.degree() + 2);
  for (const auto& [key, v] : a.components())
    for (const auto& [rk, rv] : rf.components()) {
      int m = rk.up[0];
      int n = rk.lo[0];
      std::vector<int> form = rk.form;
      form.insert(form.end(), key.form.begin(), key.form.end());
      ScalarExpr w = rv * v;
      for (size_t i = 0; i < key.up.size(); ++i)
        if (key.up[i] == n) {
          std::vector<int> up = key.up;
          up[i] = m;
          r.accumulate(std::move(up), key.lo, form, w);
        }
      for (size_t j = 0; j < key.lo.size(); ++j)
        if (key.lo[j] == m) {
          std::vector<int> lo = key.lo;
          lo[j] = n;
          r.accumulate(key.up, std::move(lo), form, -w);
        }
    }
  return r;
}

// Closed form of the commutator of two covariant derivatives along the fixed
// coordinate directions rho and sigma: a torsion term against a single
// covariant derivative, curvature contractions on the tensor slots, and a
// curvature interior-product term for the form part.  For the second
// connection the torsion term flips sign, since its torsion is the negative
// of the primary one.
inline TensorValuedForm curvature_commutator_rhs(int rho, int sigma, const TensorValuedForm& a,
                                                 const ChartGeometry& g, ConnectionSelector sel) {
  if (a.dim() != g.d) fail_input("form dimension does not match the chart");
  detail::check_chart_index(rho, g.d);
  detail::check_chart_index(sigma, g.d);
  const TensorValuedForm& rf =
      sel == ConnectionSelector::primary ? g.curvature : g.curvature_tilde;
  TensorValuedForm r(g.d, a.upper_rank(), a.lower_rank(), a.degree());
  for (int lam = 1; lam <= g.d; ++lam) {
    ScalarExpr t = g.T(lam, rho, sigma);
    if (sel == ConnectionSelector::tilde) t = -t;
    if (t.is_zero()) continue;
    r += (-t) * covariant_derivative(a, g, sel, lam);
  }
  auto rc = [&](int m, int n) { return rf.component({m}, {n}, {rho, sigma}); };
  for (const auto& [key, v] : a.components()) {
    for (size_t i = 0; i < key.up.size(); ++i)
      for (int m = 1; m <= g.d; ++m) {
        ScalarExpr c = rc(m, key.up[i]);
        if (c.is_zero()) continue;
        std::vector<int> up = key.up;
        up[i] = m;
        r.accumulate(std::move(up), key.lo, key.form, c * v);
      }
    for (size_t j = 0; j < key.lo.size(); ++j)
      for (int b = 1; b <= g.d; ++b) {
        ScalarExpr c = rc(key.lo[j], b);
        if (c.is_zero()) continue;
        std::vector<int> lo = key.lo;
        lo[j] = b;
        r.accumulate(key.up, std::move(lo), key.form, -(c * v));
      }
  }
  for (int lam = 1; lam <= g.d; ++lam) {
    TensorValuedForm ia = interior(a, lam);
    if (ia.is_zero()) continue;
    for (int tau = 1; tau <= g.d; ++tau) {
      ScalarExpr c = rc(lam, tau);
      if (c.is_zero()) continue;
      r += wedge((-c) * coordinate_one_form(g.d, tau), ia);
    }
  }
  return r;
}

// Covariant derivative of the bivector along the coordinate direction tau,
// with the selected connection acting on both contravariant slots.
inline ScalarExpr nabla_theta(const ChartGeometry& g, ConnectionSelector sel, int tau, int mu,
                              int nu) {
  detail::check_chart_index(tau, g.d);
  detail::check_chart_index(mu, g.d);
  detail::check_chart_index(nu, g.d);
  ScalarExpr r = g.th(mu, nu).derivative(tau);
  for (int s = 1; s <= g.d; ++s)
    r += gsel(g, sel, mu, tau, s) * g.th(s, nu) + gsel(g, sel, nu, tau, s) * g.th(mu, s);
  return r;
}

// The torsion of the selected connection as a vector-valued two-form: the
// primary torsion, or its negative for the second connection.
inline TensorValuedForm torsion_form(const ChartGeometry& g, ConnectionSelector sel) {
  return sel == ConnectionSelector::primary ? g.torsion : -g.torsion;
}

}  // namespace covstar
