// Command line front end: check charts against the constraint catalogue,
// evaluate covariant Poisson brackets and star products of tensor-valued
// forms, and run randomized verification suites.
//
// Exit codes: 0 success, 1 failed check or property, 2 malformed input,
// 3 unmet prerequisite, 4 internal error.

#include <cstdint>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "covstar/chart_io.hpp"
#include "covstar/constraints.hpp"
#include "covstar/star.hpp"
#include "covstar/verify.hpp"

namespace {

using namespace covstar;

int cmd_check(const std::string& chart_path, bool json) {
  ChartGeometry g = load_chart_file(chart_path);
  SuiteReport rep = run_suite(g);
  if (json) {
    std::cout << suite_report_to_json(rep, g).dump(2) << "\n";
  } else {
    for (ConstraintId id : all_constraints()) {
      if (!constraint_applicable(g, id)) {
        std::cout << constraint_name(id) << ": inapplicable\n";
        continue;
      }
      const ConstraintResult* r = rep.find(id);
      if (!r) continue;
      if (r->passed) {
        std::cout << constraint_name(r->id) << ": pass\n";
      } else {
        std::cout << constraint_name(r->id) << ": fail at (";
        for (size_t i = 0; i < r->indices.size(); ++i)
          std::cout << (i ? "," : "") << r->indices[i];
        std::cout << ") residual " << r->residual << " (" << r->failures
                  << (r->failures == 1 ? " failing tuple)\n" : " failing tuples)\n");
      }
    }
    std::cout << "admissible: " << (rep.admissible ? "yes" : "no") << "\n";
  }
  return rep.admissible ? 0 : 1;
}

int cmd_bracket(const std::string& chart_path, const std::string& form_a,
                const std::string& form_b, bool json) {
  ChartGeometry g = load_chart_file(chart_path);
  TensorValuedForm a = load_form_file(form_a, g.d);
  TensorValuedForm b = load_form_file(form_b, g.d);
  TensorValuedForm res = poisson_bracket(a, b, g);
  if (json)
    std::cout << form_to_json(res).dump(2) << "\n";
  else
    std::cout << to_string(res) << "\n";
  return 0;
}

int cmd_star(const std::string& chart_path, const std::string& form_a,
             const std::string& form_b, int order, bool json) {
  ChartGeometry g = load_chart_file(chart_path);
  TensorValuedForm a = load_form_file(form_a, g.d);
  TensorValuedForm b = load_form_file(form_b, g.d);
  StarSeries s = star(a, b, g, order);
  if (json) {
    Json j;
    j["order"] = s.order();
    Json coeffs = Json::array();
    for (const TensorValuedForm& c : s.coefficients)
      coeffs.push_back(form_to_json(c));
    j["coefficients"] = coeffs;
    std::cout << j.dump(2) << "\n";
  } else {
    for (int n = 0; n <= s.order(); ++n)
      std::cout << "order " << n << ": " << to_string(s.coefficients[n]) << "\n";
  }
  return 0;
}

int cmd_verify(const std::string& chart_path, const std::string& suite,
               const TrialConfig& cfg, bool json) {
  ChartGeometry g = load_chart_file(chart_path);
  SuiteId id = suite_from_name(suite);
  VerifyReport rep = run_verify(g, id, cfg);
  if (json) {
    std::cout << verify_report_to_json(rep).dump(2) << "\n";
  } else {
    std::cout << "suite " << rep.suite << ": " << rep.config.trials
              << " trials, rng " << rep.rng_algorithm << ", seed "
              << rep.config.seed << "\n";
    for (const TrialResult& t : rep.trials) {
      if (t.passed) continue;
      std::cout << "trial " << t.index << " failed:";
      for (const std::string& f : t.failures) std::cout << " " << f;
      std::cout << "\n";
    }
    std::cout << "result: " << (rep.passed ? "pass" : "fail") << "\n";
  }
  return rep.passed ? 0 : 1;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"exact covariant Poisson brackets and star products on coordinate charts"};
  app.require_subcommand(1);
  bool json = false;
  app.add_flag("--json", json, "emit machine readable JSON reports");

  std::string chart_path, form_a, form_b;
  int order = 2;
  std::string suite;
  covstar::TrialConfig cfg;

  CLI::App* check = app.add_subcommand("check", "run the constraint catalogue on a chart");
  check->fallthrough();
  check->add_option("chart", chart_path, "chart description file")->required();

  CLI::App* bracket =
      app.add_subcommand("bracket", "covariant Poisson bracket of two forms");
  bracket->fallthrough();
  bracket->add_option("chart", chart_path, "chart description file")->required();
  bracket->add_option("formA", form_a, "left operand file")->required();
  bracket->add_option("formB", form_b, "right operand file")->required();

  CLI::App* star_cmd = app.add_subcommand("star", "star product of two forms");
  star_cmd->fallthrough();
  star_cmd->add_option("chart", chart_path, "chart description file")->required();
  star_cmd->add_option("formA", form_a, "left operand file")->required();
  star_cmd->add_option("formB", form_b, "right operand file")->required();
  star_cmd->add_option("--order", order, "truncation order of the deformation parameter")
      ->default_val(2);

  CLI::App* verify = app.add_subcommand("verify", "run a randomized property suite");
  verify->fallthrough();
  verify->add_option("chart", chart_path, "chart description file")->required();
  verify->add_option("--suite", suite, "one of poisson-axioms, leibniz, associativity, operator-identities, function-star")
      ->required();
  verify->add_option("--seed", cfg.seed, "random seed")->default_val(std::uint64_t{1});
  verify->add_option("--trials", cfg.trials, "number of random trials")->default_val(20);
  verify->add_option("--max-degree", cfg.max_poly_degree, "maximum polynomial degree of random coefficients")
      ->default_val(2);
  verify->add_option("--max-form-degree", cfg.max_form_degree, "maximum form degree of random operands")
      ->default_val(2);
  verify->add_option("--max-rank", cfg.max_rank, "maximum tensor rank of random operands")
      ->default_val(1);
  verify->add_option("--order", cfg.order, "star truncation order for the function-star suite")
      ->default_val(2);
  verify->add_flag("--skip-prereq", cfg.skip_prereq,
                   "run trials even when prerequisite constraints fail");

  try {
    try {
      app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
      int code = app.exit(e);
      return code == 0 ? 0 : 2;
    }
    if (check->parsed()) return cmd_check(chart_path, json);
    if (bracket->parsed()) return cmd_bracket(chart_path, form_a, form_b, json);
    if (star_cmd->parsed()) return cmd_star(chart_path, form_a, form_b, order, json);
    if (verify->parsed()) return cmd_verify(chart_path, suite, cfg, json);
    std::cerr << "error: no command given\n";
    return 2;
  } catch (const covstar::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    switch (e.kind()) {
      case covstar::ErrorKind::parse:
      case covstar::ErrorKind::input: return 2;
      case covstar::ErrorKind::prerequisite: return 3;
      case covstar::ErrorKind::internal: return 4;
    }
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 4;
  }
}
