#pragma once

#include <string>
#include <utility>
#include <vector>

#include <covstar/calculus.hpp>
#include <covstar/geometry.hpp>
#include <covstar/tensor_form.hpp>

namespace covstar {

// Geometric compatibility conditions between the bivector and the connection.
// The first block applies to any chart; the rest need the inverse two-form or
// express conditions specific to invertible bivectors, so they are gated to
// symplectic mode.
enum class ConstraintId {
  jacobi_theta,          // cyclic theta d(theta) sum vanishes
  poisson_jacobi_no3,    // cyclic theta (grad theta - theta T) sum vanishes
  theta2_r_zero,         // curvature contracted with two bivectors vanishes
  poisson_assoc_no4,     // cyclic theta (grad theta + theta T / 2) sum vanishes
  cocd_theta_zero,       // derivative commutator annihilates the bivector
  symplectic_tilde,      // second connection annihilates the bivector
  covariant_jacobi_pair, // both covariant forms of the cyclic identity
  r_zero,                // primary curvature vanishes (per interior product)
  tilder_cov_const,      // raised second curvature is covariantly constant
  rir_cyclic,            // cyclic raised-curvature interior-product sum
  r_equals_nabla_t,      // raised-index-free second curvature equals grad T
  torsion_cyclic_omega,  // cyclic torsion-omega contraction vanishes
  second_torsion,        // second torsion derivatives reduce to first ones
};

inline const std::vector<ConstraintId>& all_constraints() {
  static const std::vector<ConstraintId> ids = {
      ConstraintId::jacobi_theta,          ConstraintId::poisson_jacobi_no3,
      ConstraintId::theta2_r_zero,         ConstraintId::poisson_assoc_no4,
      ConstraintId::cocd_theta_zero,       ConstraintId::symplectic_tilde,
      ConstraintId::covariant_jacobi_pair, ConstraintId::r_zero,
      ConstraintId::tilder_cov_const,      ConstraintId::rir_cyclic,
      ConstraintId::r_equals_nabla_t,      ConstraintId::torsion_cyclic_omega,
      ConstraintId::second_torsion,
  };
  return ids;
}

inline std::string constraint_name(ConstraintId id) {
  switch (id) {
    case ConstraintId::jacobi_theta: return "jacobi_theta";
    case ConstraintId::poisson_jacobi_no3: return "poisson_jacobi_no3";
    case ConstraintId::theta2_r_zero: return "theta2_r_zero";
    case ConstraintId::poisson_assoc_no4: return "poisson_assoc_no4";
    case ConstraintId::cocd_theta_zero: return "cocd_theta_zero";
    case ConstraintId::symplectic_tilde: return "symplectic_tilde";
    case ConstraintId::covariant_jacobi_pair: return "covariant_jacobi_pair";
    case ConstraintId::r_zero: return "r_zero";
    case ConstraintId::tilder_cov_const: return "tilder_cov_const";
    case ConstraintId::rir_cyclic: return "rir_cyclic";
    case ConstraintId::r_equals_nabla_t: return "r_equals_nabla_t";
    case ConstraintId::torsion_cyclic_omega: return "torsion_cyclic_omega";
    case ConstraintId::second_torsion: return "second_torsion";
  }
  fail_internal("unhandled constraint id");
}

inline ConstraintId constraint_from_name(const std::string& name) {
  for (ConstraintId id : all_constraints())
    if (constraint_name(id) == name) return id;
  fail_input("unknown constraint id: " + name);
}

inline bool constraint_applicable(const ChartGeometry& g, ConstraintId id) {
  switch (id) {
    case ConstraintId::jacobi_theta:
    case ConstraintId::poisson_jacobi_no3:
    case ConstraintId::theta2_r_zero:
    case ConstraintId::poisson_assoc_no4:
    case ConstraintId::cocd_theta_zero:
      return true;
    default:
      return g.mode == ChartMode::symplectic;
  }
}

// Outcome of a single constraint check.  When the check fails, `indices`
// names the first index tuple whose residual is nonzero (in the deterministic
// enumeration order of the check), `residual` prints that residual, and
// `failures` counts all failing tuples.
struct ConstraintResult {
  ConstraintId id{};
  bool passed = true;
  std::vector<int> indices;
  std::string residual;
  int failures = 0;
};

namespace detail {

// Collects scalar residuals tuple by tuple, remembering the first failure.
struct ResidualSink {
  ConstraintResult out;
  explicit ResidualSink(ConstraintId id) { out.id = id; }
  void add(std::vector<int> idx, const ScalarExpr& v) {
    if (v.is_zero()) return;
    if (out.passed) {
      out.passed = false;
      out.indices = std::move(idx);
      out.residual = v.str();
    }
    ++out.failures;
  }
  // Flattens a form-valued residual: each component counts as one tuple,
  // with the component key appended to the free indices.
  void add_form(const std::vector<int>& idx, const TensorValuedForm& f) {
    for (const auto& [key, v] : f.components()) {
      std::vector<int> full = idx;
      full.insert(full.end(), key.up.begin(), key.up.end());
      full.insert(full.end(), key.lo.begin(), key.lo.end());
      full.insert(full.end(), key.form.begin(), key.form.end());
      add(std::move(full), v);
    }
  }
};

// One cyclic rotation family: calls fn on (mu,nu,rho), (nu,rho,mu),
// (rho,mu,nu) and sums.
template <class F>
ScalarExpr cyclic_sum(int d, int mu, int nu, int rho, F&& fn) {
  ScalarExpr r = fn(mu, nu, rho);
  r += fn(nu, rho, mu);
  r += fn(rho, mu, nu);
  return r;
}

}  // namespace detail

inline ConstraintResult check(const ChartGeometry& g, ConstraintId id) {
  if (!constraint_applicable(g, id))
    fail_prereq("constraint " + constraint_name(id) + " requires a symplectic chart");
  const int d = g.d;
  detail::ResidualSink sink(id);
  auto primary = ConnectionSelector::primary;

  switch (id) {
    case ConstraintId::jacobi_theta:
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = mu + 1; nu <= d; ++nu)
          for (int rho = nu + 1; rho <= d; ++rho)
            sink.add({mu, nu, rho},
                     detail::cyclic_sum(d, mu, nu, rho, [&](int a, int b, int c) {
                       ScalarExpr s = ScalarExpr::zero(d);
                       for (int sg = 1; sg <= d; ++sg)
                         s += g.th(a, sg) * g.th(b, c).derivative(sg);
                       return s;
                     }));
      break;

    case ConstraintId::poisson_jacobi_no3:
    case ConstraintId::poisson_assoc_no4: {
      Rat half = id == ConstraintId::poisson_jacobi_no3 ? Rat(-1) : Rat(1, 2);
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = mu + 1; nu <= d; ++nu)
          for (int rho = nu + 1; rho <= d; ++rho)
            sink.add({mu, nu, rho},
                     detail::cyclic_sum(d, mu, nu, rho, [&](int a, int b, int c) {
                       ScalarExpr s = ScalarExpr::zero(d);
                       for (int sg = 1; sg <= d; ++sg) {
                         ScalarExpr inner = nabla_theta(g, primary, sg, b, c);
                         for (int lam = 1; lam <= d; ++lam)
                           inner += ScalarExpr::constant(d, half) *
                                    (g.th(b, lam) * g.T(c, sg, lam));
                         s += g.th(a, sg) * inner;
                       }
                       return s;
                     }));
      break;
    }

    case ConstraintId::theta2_r_zero:
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = 1; nu <= d; ++nu)
          for (int rho = 1; rho <= d; ++rho)
            for (int sg = 1; sg <= d; ++sg) {
              ScalarExpr s = ScalarExpr::zero(d);
              for (int lam = 1; lam <= d; ++lam)
                for (int tau = 1; tau <= d; ++tau) {
                  if (lam == tau) continue;
                  s += g.th(mu, lam) * g.th(nu, tau) *
                       g.curvature.component({rho}, {sg}, {lam, tau});
                }
              sink.add({mu, nu, rho, sg}, s);
            }
      break;

    case ConstraintId::cocd_theta_zero:
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = mu + 1; nu <= d; ++nu)
          for (int rho = 1; rho <= d; ++rho)
            for (int sg = 1; sg <= d; ++sg) {
              ScalarExpr s = ScalarExpr::zero(d);
              for (int lam = 1; lam <= d; ++lam) {
                s -= g.T(lam, mu, nu) * nabla_theta(g, primary, lam, rho, sg);
                s += g.curvature.component({rho}, {lam}, {mu, nu}) * g.th(lam, sg);
                s += g.curvature.component({sg}, {lam}, {mu, nu}) * g.th(rho, lam);
              }
              sink.add({mu, nu, rho, sg}, s);
            }
      break;

    case ConstraintId::symplectic_tilde:
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = 1; nu <= d; ++nu)
          for (int rho = nu + 1; rho <= d; ++rho)
            sink.add({mu, nu, rho}, nabla_theta(g, ConnectionSelector::tilde, mu, nu, rho));
      break;

    case ConstraintId::covariant_jacobi_pair:
      // Family 1: cyclic theta grad-theta sum; family 2: cyclic theta theta
      // torsion sum.  The family number leads the reported index tuple.
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = mu + 1; nu <= d; ++nu)
          for (int rho = nu + 1; rho <= d; ++rho)
            sink.add({1, mu, nu, rho},
                     detail::cyclic_sum(d, mu, nu, rho, [&](int a, int b, int c) {
                       ScalarExpr s = ScalarExpr::zero(d);
                       for (int sg = 1; sg <= d; ++sg)
                         s += g.th(a, sg) * nabla_theta(g, primary, sg, b, c);
                       return s;
                     }));
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = mu + 1; nu <= d; ++nu)
          for (int rho = nu + 1; rho <= d; ++rho)
            sink.add({2, mu, nu, rho},
                     detail::cyclic_sum(d, mu, nu, rho, [&](int a, int b, int c) {
                       ScalarExpr s = ScalarExpr::zero(d);
                       for (int sg = 1; sg <= d; ++sg)
                         for (int lam = 1; lam <= d; ++lam)
                           s += g.th(a, sg) * g.th(b, lam) * g.T(c, sg, lam);
                       return s;
                     }));
      break;

    case ConstraintId::r_zero:
      // Stated through interior products of the curvature two-form: every
      // contraction i_mu R^nu_rho must vanish.
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = 1; nu <= d; ++nu)
          for (int rho = 1; rho <= d; ++rho) {
            TensorValuedForm rf(d, 0, 0, 2);
            for (const auto& [key, v] : g.curvature.components())
              if (key.up[0] == nu && key.lo[0] == rho) rf.accumulate({}, {}, key.form, v);
            sink.add_form({mu, nu, rho}, interior(rf, mu));
          }
      break;

    case ConstraintId::tilder_cov_const:
      for (int lam = 1; lam <= d; ++lam)
        sink.add_form({lam}, covariant_derivative(g.curvature_raised, g, primary, lam));
      break;

    case ConstraintId::rir_cyclic:
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = mu + 1; nu <= d; ++nu)
          for (int rho = nu + 1; rho <= d; ++rho) {
            TensorValuedForm sum(d, 0, 0, 3);
            auto term = [&](int a, int b, int c) {
              for (int sg = 1; sg <= d; ++sg) {
                TensorValuedForm rab = slice_upper_front(g.curvature_raised, {a, sg});
                TensorValuedForm rbc = slice_upper_front(g.curvature_raised, {b, c});
                sum += wedge(rab, interior(rbc, sg));
              }
            };
            term(mu, nu, rho);
            term(nu, rho, mu);
            term(rho, mu, nu);
            sink.add_form({mu, nu, rho}, sum);
          }
      break;

    case ConstraintId::r_equals_nabla_t:
      for (int nu = 1; nu <= d; ++nu) {
        TensorValuedForm nt = covariant_derivative(g.torsion, g, primary, nu);
        for (int mu = 1; mu <= d; ++mu) {
          TensorValuedForm rmn(d, 0, 0, 2);
          for (const auto& [key, v] : g.curvature_tilde.components())
            if (key.up[0] == mu && key.lo[0] == nu) rmn.accumulate({}, {}, key.form, v);
          sink.add_form({mu, nu}, rmn - slice_upper_front(nt, {mu}));
        }
      }
      break;

    case ConstraintId::torsion_cyclic_omega:
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = mu + 1; nu <= d; ++nu)
          for (int rho = nu + 1; rho <= d; ++rho)
            sink.add({mu, nu, rho},
                     detail::cyclic_sum(d, mu, nu, rho, [&](int a, int b, int c) {
                       ScalarExpr s = ScalarExpr::zero(d);
                       for (int sg = 1; sg <= d; ++sg) s += g.T(sg, a, b) * g.om(sg, c);
                       return s;
                     }));
      break;

    case ConstraintId::second_torsion: {
      TensorValuedForm ddt = second_covariant_derivative(g.torsion, g, primary);
      std::vector<TensorValuedForm> dt;
      for (int sg = 1; sg <= d; ++sg)
        dt.push_back(covariant_derivative(g.torsion, g, primary, sg));
      for (int mu = 1; mu <= d; ++mu)
        for (int nu = 1; nu <= d; ++nu)
          for (int rho = 1; rho <= d; ++rho) {
            TensorValuedForm res =
                slice_upper_front(slice_lower_front(ddt, {mu, nu}), {rho});
            for (int sg = 1; sg <= d; ++sg) {
              ScalarExpr coeff = g.T(sg, mu, nu);
              for (int lam = 1; lam <= d; ++lam)
                for (int tau = 1; tau <= d; ++tau)
                  coeff += g.T(lam, mu, tau) * g.om(nu, lam) * g.th(tau, sg);
              if (coeff.is_zero()) continue;
              res += coeff * slice_upper_front(dt[sg - 1], {rho});
            }
            sink.add_form({mu, nu, rho}, res);
          }
      break;
    }
  }
  return sink.out;
}

// The conditions the graded bracket of forms needs on a symplectic chart.
inline const std::vector<ConstraintId>& symplectic_admissibility_set() {
  static const std::vector<ConstraintId> ids = {
      ConstraintId::jacobi_theta,      ConstraintId::symplectic_tilde,
      ConstraintId::covariant_jacobi_pair, ConstraintId::r_zero,
      ConstraintId::tilder_cov_const,  ConstraintId::rir_cyclic,
      ConstraintId::r_equals_nabla_t,
  };
  return ids;
}

// The conditions the order-2 tensor star needs on a degenerate chart.
inline const std::vector<ConstraintId>& poisson_admissibility_set() {
  static const std::vector<ConstraintId> ids = {
      ConstraintId::jacobi_theta,
      ConstraintId::poisson_jacobi_no3,
      ConstraintId::theta2_r_zero,
      ConstraintId::poisson_assoc_no4,
  };
  return ids;
}

struct SuiteReport {
  std::vector<ConstraintResult> results;
  bool admissible = false;
  const ConstraintResult* find(ConstraintId id) const {
    for (const auto& r : results)
      if (r.id == id) return &r;
    return nullptr;
  }
};

// Runs every constraint applicable to the chart mode, in the fixed catalogue
// order, and summarizes admissibility over the mode's required set.
inline SuiteReport run_suite(const ChartGeometry& g) {
  SuiteReport rep;
  for (ConstraintId id : all_constraints())
    if (constraint_applicable(g, id)) rep.results.push_back(check(g, id));
  const auto& need = g.mode == ChartMode::symplectic ? symplectic_admissibility_set()
                                                     : poisson_admissibility_set();
  rep.admissible = true;
  for (ConstraintId id : need) {
    const ConstraintResult* r = rep.find(id);
    if (!r || !r->passed) rep.admissible = false;
  }
  return rep;
}

// Convenience for preconditions: throws a prerequisite error naming the
// first failing constraint of `ids`, if any.
inline void require_constraints(const ChartGeometry& g, const std::vector<ConstraintId>& ids,
                                const std::string& what) {
  for (ConstraintId id : ids) {
    ConstraintResult r = check(g, id);
    if (!r.passed)
      fail_prereq(what + " requires constraint " + constraint_name(id) +
                  ", which fails on this chart");
  }
}

}  // namespace covstar
