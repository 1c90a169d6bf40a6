#pragma once

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "covstar/chart_io.hpp"
#include "covstar/constraints.hpp"
#include "covstar/rng.hpp"
#include "covstar/star.hpp"

namespace covstar {

// Randomized property suites.  Each suite draws seeded random operands,
// evaluates a family of residuals that must vanish identically, and reports
// per-trial outcomes.  Prerequisite constraints are checked before any trial
// runs unless explicitly skipped.
enum class SuiteId {
  poisson_axioms,       // bracket degree, graded symmetry, product rule, Jacobi
  leibniz,              // derivative Leibniz rule over the bracket
  associativity,        // star associativity residual through second order
  operator_identities,  // exterior/interior/derivative operator identities
  function_star,        // scalar function star associativity
};

inline const std::vector<SuiteId>& all_suites() {
  static const std::vector<SuiteId> ids = {
      SuiteId::poisson_axioms, SuiteId::leibniz, SuiteId::associativity,
      SuiteId::operator_identities, SuiteId::function_star,
  };
  return ids;
}

inline std::string suite_name(SuiteId s) {
  switch (s) {
    case SuiteId::poisson_axioms: return "poisson-axioms";
    case SuiteId::leibniz: return "leibniz";
    case SuiteId::associativity: return "associativity";
    case SuiteId::operator_identities: return "operator-identities";
    case SuiteId::function_star: return "function-star";
  }
  fail_internal("unhandled suite id");
}

inline SuiteId suite_from_name(const std::string& name) {
  for (SuiteId s : all_suites())
    if (suite_name(s) == name) return s;
  fail_input("unknown suite '" + name + "'");
}

struct TrialConfig {
  std::uint64_t seed = 1;
  int trials = 20;
  int max_poly_degree = 2;
  int max_form_degree = 2;
  int max_rank = 1;
  int order = 2;  // star truncation order for the function-star suite
  bool skip_prereq = false;
};

struct TrialResult {
  int index = 0;
  bool passed = true;
  std::vector<std::string> failures;
  long long elapsed_us = 0;
};

struct VerifyReport {
  std::string suite;
  std::string rng_algorithm = "splitmix64";
  TrialConfig config;
  bool passed = true;
  std::vector<TrialResult> trials;
  long long elapsed_us = 0;
};

// Constraints a suite requires on the given chart, in the order they are
// checked (the first failing one is named in the error).
inline std::vector<ConstraintId> suite_prerequisites(SuiteId s, const ChartGeometry& g) {
  switch (s) {
    case SuiteId::poisson_axioms:
    case SuiteId::associativity:
      return g.mode == ChartMode::symplectic ? symplectic_admissibility_set()
                                             : poisson_admissibility_set();
    case SuiteId::leibniz:
      return {ConstraintId::r_zero, ConstraintId::symplectic_tilde,
              ConstraintId::r_equals_nabla_t};
    case SuiteId::operator_identities:
      return {};
    case SuiteId::function_star:
      return {ConstraintId::jacobi_theta};
  }
  fail_internal("unhandled suite id");
}

namespace detail {

inline void note(std::vector<std::string>& failures, const std::string& name, bool ok) {
  if (!ok) failures.push_back(name);
}

inline Rat sign_pow(int e) { return e % 2 == 0 ? Rat(1) : Rat(-1); }

inline std::pair<int, int> block_of(const TensorValuedForm& a) {
  return {a.upper_rank(), a.lower_rank()};
}

// Random operand within the configured shape bounds; on degenerate charts
// the bracket and star only exist for zero-forms, so the degree is pinned.
inline TensorValuedForm random_operand(Rng& rng, const ChartGeometry& g,
                                       const TrialConfig& cfg) {
  int p = g.mode == ChartMode::poisson ? 0 : (int)rng.below(cfg.max_form_degree + 1);
  int k = (int)rng.below(cfg.max_rank + 1);
  int l = (int)rng.below(cfg.max_rank + 1);
  return random_form(rng, g.d, k, l, p, cfg.max_poly_degree);
}

inline std::vector<std::string> trial_poisson_axioms(Rng& rng, const ChartGeometry& g,
                                                     const TrialConfig& cfg) {
  std::vector<std::string> failures;
  TensorValuedForm a = random_operand(rng, g, cfg);
  TensorValuedForm b = random_operand(rng, g, cfg);
  TensorValuedForm c = random_operand(rng, g, cfg);

  TensorValuedForm ab = poisson_bracket(a, b, g);
  note(failures, "bracket_degree", ab.degree() == a.degree() + b.degree());

  TensorValuedForm ba =
      reorder_blocks(poisson_bracket(b, a, g), {block_of(b), block_of(a)}, {1, 0});
  note(failures, "graded_symmetry",
       ab.equals(sign_pow(a.degree() * b.degree() + 1) * ba));

  TensorValuedForm lhs = poisson_bracket(wedge(a, b), c, g);
  TensorValuedForm rhs = wedge(a, poisson_bracket(b, c, g));
  rhs += sign_pow(b.degree() * c.degree()) *
         reorder_blocks(wedge(poisson_bracket(a, c, g), b),
                        {block_of(a), block_of(c), block_of(b)}, {0, 2, 1});
  note(failures, "graded_product", lhs.equals(rhs));

  note(failures, "graded_jacobi", graded_jacobiator(a, b, c, g).is_zero());
  return failures;
}

inline std::vector<std::string> trial_leibniz(Rng& rng, const ChartGeometry& g,
                                              const TrialConfig& cfg) {
  std::vector<std::string> failures;
  TensorValuedForm a = random_operand(rng, g, cfg);
  TensorValuedForm b = random_operand(rng, g, cfg);
  note(failures, "derivative_leibniz", leibniz_residual(a, b, g).is_zero());
  return failures;
}

inline std::vector<std::string> trial_associativity(Rng& rng, const ChartGeometry& g,
                                                    const TrialConfig& cfg) {
  std::vector<std::string> failures;
  TensorValuedForm a = random_operand(rng, g, cfg);
  TensorValuedForm b = random_operand(rng, g, cfg);
  TensorValuedForm c = random_operand(rng, g, cfg);
  StarSeries res = associator(a, b, c, g, 2);
  for (int n = 0; n <= 2; ++n)
    note(failures, "order_" + std::to_string(n), res.coefficients[n].is_zero());
  return failures;
}

inline std::vector<std::string> trial_operator_identities(Rng& rng, const ChartGeometry& g,
                                                          const TrialConfig& cfg) {
  std::vector<std::string> failures;
  const int d = g.d;
  const auto primary = ConnectionSelector::primary;
  TensorValuedForm a = random_operand(rng, g, cfg);

  // The exterior covariant derivative splits into a gradient part and a
  // torsion part, for either connection.
  for (auto sel : {ConnectionSelector::primary, ConnectionSelector::tilde}) {
    TensorValuedForm rhs(d, a.upper_rank(), a.lower_rank(), a.degree() + 1);
    for (int mu = 1; mu <= d; ++mu) {
      rhs += wedge(coordinate_one_form(d, mu), covariant_derivative(a, g, sel, mu));
      TensorValuedForm ia = interior(a, mu);
      if (ia.is_zero()) continue;
      rhs += wedge(slice_upper_front(torsion_form(g, sel), {mu}), ia);
    }
    note(failures,
         sel == primary ? "derivative_split" : "derivative_split_tilde",
         exterior_covariant_derivative(a, g, sel).equals(rhs));
  }

  // Exchange rule between the exterior derivative and the full gradient.
  {
    TensorValuedForm dna = exterior_covariant_derivative(nabla_all(a, g, primary), g, primary);
    TensorValuedForm nda = nabla_all(exterior_covariant_derivative(a, g, primary), g, primary);
    TensorValuedForm nt = nabla_all(torsion_form(g, primary), g, primary);
    bool ok = true;
    for (int lam = 1; lam <= d; ++lam) {
      TensorValuedForm rhs = slice_lower_front(nda, {lam});
      for (int rho = 1; rho <= d; ++rho) {
        rhs += wedge(coordinate_one_form(d, rho),
                     curvature_commutator_rhs(rho, lam, a, g, primary));
        TensorValuedForm ia = interior(a, rho);
        if (ia.is_zero()) continue;
        rhs -= wedge(slice_upper_front(slice_lower_front(nt, {lam}), {rho}), ia);
      }
      ok = ok && slice_lower_front(dna, {lam}).equals(rhs);
    }
    note(failures, "derivative_exchange", ok);
  }

  // Anticommutator of the exterior derivative with interior contraction.
  {
    TensorValuedForm dia = exterior_covariant_derivative(interior_all(a), g, primary);
    TensorValuedForm ida = interior_all(exterior_covariant_derivative(a, g, primary));
    TensorValuedForm tf = torsion_form(g, primary);
    bool ok = true;
    for (int lam = 1; lam <= d; ++lam) {
      TensorValuedForm lhs = slice_lower_front(dia, {lam}) + slice_lower_front(ida, {lam});
      TensorValuedForm rhs = covariant_derivative(a, g, primary, lam);
      for (int rho = 1; rho <= d; ++rho) {
        TensorValuedForm ia = interior(a, rho);
        if (ia.is_zero()) continue;
        rhs += wedge(interior(slice_upper_front(tf, {rho}), lam), ia);
      }
      ok = ok && lhs.equals(rhs);
    }
    note(failures, "interior_anticommutator", ok);
  }

  // Interior contraction commutes with the covariant gradient.
  {
    TensorValuedForm lhs = interior_all(nabla_all(a, g, primary));
    TensorValuedForm rhs =
        reorder_blocks(nabla_all(interior_all(a), g, primary),
                       {{0, 1}, {0, 1}, {a.upper_rank(), a.lower_rank()}}, {1, 0, 2});
    note(failures, "interior_derivative_commute", lhs.equals(rhs));
  }

  // Commutator of covariant derivatives: curvature action minus a torsion
  // drift, and the induced symmetric/antisymmetric decomposition.
  {
    TensorValuedForm dd = second_covariant_derivative(a, g, primary);
    bool comm_ok = true, decomp_ok = true;
    for (int rho = 1; rho <= d; ++rho)
      for (int sigma = 1; sigma <= d; ++sigma) {
        TensorValuedForm direct =
            slice_lower_front(dd, {rho, sigma}) - slice_lower_front(dd, {sigma, rho});
        TensorValuedForm comm = curvature_commutator_rhs(rho, sigma, a, g, primary);
        comm_ok = comm_ok && direct.equals(comm);
        TensorValuedForm sym = Rat(1, 2) * (slice_lower_front(dd, {rho, sigma}) +
                                            slice_lower_front(dd, {sigma, rho}));
        decomp_ok = decomp_ok &&
                    slice_lower_front(dd, {rho, sigma}).equals(sym + Rat(1, 2) * comm);
      }
    note(failures, "derivative_commutator", comm_ok);
    note(failures, "second_derivative_decomposition", decomp_ok);
  }

  // Applying the exterior covariant derivative twice contracts the curvature.
  {
    TensorValuedForm dda =
        exterior_covariant_derivative(exterior_covariant_derivative(a, g, primary), g, primary);
    note(failures, "double_derivative_curvature", dda.equals(curvature_action(a, g, primary)));
  }
  return failures;
}

inline std::vector<std::string> trial_function_star(Rng& rng, const ChartGeometry& g,
                                                    const TrialConfig& cfg) {
  std::vector<std::string> failures;
  ScalarExpr f = random_scalar(rng, g.d, cfg.max_poly_degree);
  ScalarExpr h = random_scalar(rng, g.d, cfg.max_poly_degree);
  ScalarExpr k = random_scalar(rng, g.d, cfg.max_poly_degree);
  StarSeries res =
      associator(scalar_form(f), scalar_form(h), scalar_form(k), g, cfg.order);
  for (int n = 0; n <= cfg.order; ++n)
    note(failures, "order_" + std::to_string(n), res.coefficients[n].is_zero());
  return failures;
}

}  // namespace detail

inline VerifyReport run_verify(const ChartGeometry& g, SuiteId suite, const TrialConfig& cfg) {
  if (cfg.trials < 1) fail_input("trial count must be positive");
  if (cfg.max_poly_degree < 0 || cfg.max_form_degree < 0 || cfg.max_rank < 0)
    fail_input("degree and rank bounds must be nonnegative");
  if (cfg.order < 0 || cfg.order > 3) fail_input("star order must be between 0 and 3");
  if (suite != SuiteId::function_star && cfg.order > 2)
    fail_input("only the function-star suite supports order 3");

  // Structural requirements that no flag can lift: the computations below
  // would refuse these charts anyway.
  if (suite == SuiteId::leibniz && g.mode != ChartMode::symplectic)
    fail_prereq("the leibniz suite requires a symplectic chart");
  if (suite == SuiteId::function_star && (cfg.order >= 2 && !g.torsion_free()))
    fail_prereq("the function-star suite requires a torsion-free connection");

  if (!cfg.skip_prereq)
    for (ConstraintId id : suite_prerequisites(suite, g)) {
      ConstraintResult r = check(g, id);
      if (!r.passed)
        fail_prereq("suite " + suite_name(suite) + " requires constraint " +
                    constraint_name(id) + ", which fails on this chart");
    }

  VerifyReport rep;
  rep.suite = suite_name(suite);
  rep.config = cfg;
  auto t0 = std::chrono::steady_clock::now();
  Rng root(cfg.seed);

  // Trials are independent (each draws its operands from split stream t), so
  // they run on a small thread pool; the report is assembled in index order.
  std::vector<TrialResult> results(cfg.trials);
  std::atomic<int> next_trial{0};
  std::exception_ptr first_error;
  std::mutex error_mutex;
  auto worker = [&]() {
    for (int t = next_trial.fetch_add(1); t < cfg.trials; t = next_trial.fetch_add(1)) {
      try {
        Rng sub = root.split((std::uint64_t)t);
        auto s0 = std::chrono::steady_clock::now();
        TrialResult tr;
        tr.index = t;
        switch (suite) {
          case SuiteId::poisson_axioms:
            tr.failures = detail::trial_poisson_axioms(sub, g, cfg);
            break;
          case SuiteId::leibniz: tr.failures = detail::trial_leibniz(sub, g, cfg); break;
          case SuiteId::associativity:
            tr.failures = detail::trial_associativity(sub, g, cfg);
            break;
          case SuiteId::operator_identities:
            tr.failures = detail::trial_operator_identities(sub, g, cfg);
            break;
          case SuiteId::function_star:
            tr.failures = detail::trial_function_star(sub, g, cfg);
            break;
        }
        tr.passed = tr.failures.empty();
        tr.elapsed_us = std::chrono::duration_cast<std::chrono::microseconds>(
                            std::chrono::steady_clock::now() - s0)
                            .count();
        results[t] = std::move(tr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
      }
    }
  };
  unsigned hw = std::thread::hardware_concurrency();
  int nthreads = std::min<int>(cfg.trials, hw > 0 ? (int)hw : 1);
  std::vector<std::thread> pool;
  for (int i = 1; i < nthreads; ++i) pool.emplace_back(worker);
  worker();
  for (std::thread& th : pool) th.join();
  if (first_error) std::rethrow_exception(first_error);

  for (TrialResult& tr : results) {
    rep.passed = rep.passed && tr.passed;
    rep.trials.push_back(std::move(tr));
  }
  rep.elapsed_us = std::chrono::duration_cast<std::chrono::microseconds>(
                       std::chrono::steady_clock::now() - t0)
                       .count();
  return rep;
}

// ---------------------------------------------------------------------------
// JSON serialization of reports.  Everything except the elapsed_us fields is
// a pure function of the inputs, so reports are reproducible byte for byte.

inline Json constraint_result_to_json(const ConstraintResult& r) {
  Json j;
  j["id"] = constraint_name(r.id);
  j["passed"] = r.passed;
  if (!r.passed) {
    Json res;
    res["indices"] = r.indices;
    res["expr"] = r.residual;
    res["failing_tuples"] = r.failures;
    j["residual"] = res;
  }
  return j;
}

// Constraint report: one entry per catalogued constraint; constraints that do
// not apply to the chart mode are marked inapplicable rather than checked.
inline Json suite_report_to_json(const SuiteReport& rep, const ChartGeometry& g) {
  Json arr = Json::array();
  for (ConstraintId id : all_constraints()) {
    if (!constraint_applicable(g, id)) {
      Json j;
      j["id"] = constraint_name(id);
      j["applicable"] = false;
      arr.push_back(j);
      continue;
    }
    const ConstraintResult* r = rep.find(id);
    if (r) arr.push_back(constraint_result_to_json(*r));
  }
  return arr;
}

inline Json verify_report_to_json(const VerifyReport& rep) {
  Json j;
  j["suite"] = rep.suite;
  j["rng"] = rep.rng_algorithm;
  j["seed"] = rep.config.seed;
  j["trials"] = rep.config.trials;
  j["max_poly_degree"] = rep.config.max_poly_degree;
  j["max_form_degree"] = rep.config.max_form_degree;
  j["max_rank"] = rep.config.max_rank;
  j["order"] = rep.config.order;
  j["skip_prereq"] = rep.config.skip_prereq;
  j["passed"] = rep.passed;
  j["elapsed_us"] = rep.elapsed_us;
  Json results = Json::array();
  for (const TrialResult& t : rep.trials) {
    Json tj;
    tj["trial"] = t.index;
    tj["passed"] = t.passed;
    tj["failures"] = t.failures;
    tj["elapsed_us"] = t.elapsed_us;
    results.push_back(tj);
  }
  j["results"] = results;
  return j;
}

}  // namespace covstar
