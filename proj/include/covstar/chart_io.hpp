#pragma once

#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "covstar/geometry.hpp"
#include "covstar/tensor_form.hpp"

namespace covstar {

// Insertion-ordered JSON keeps every emitted report byte-deterministic.
using Json = nlohmann::ordered_json;

namespace detail {

inline std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

inline std::vector<int> parse_index_list(const std::string& s, const std::string& where) {
  std::vector<int> out;
  if (s.empty()) return out;
  for (const std::string& piece : split(s, ',')) {
    if (piece.empty() || piece.size() > 4 ||
        piece.find_first_not_of("0123456789") != std::string::npos)
      fail_input("bad index list '" + s + "' in " + where);
    out.push_back(std::stoi(piece));
  }
  return out;
}

// Splits an "a,b;c,d;e" style key into exactly `groups` index lists.
inline std::vector<std::vector<int>> parse_index_groups(const std::string& key, size_t groups,
                                                        const std::string& where) {
  std::vector<std::string> parts = split(key, ';');
  if (parts.size() != groups)
    fail_input("key '" + key + "' in " + where + " must have " + std::to_string(groups) +
               " semicolon-separated index groups");
  std::vector<std::vector<int>> out;
  for (const std::string& p : parts) out.push_back(parse_index_list(p, where));
  return out;
}

inline Rat parse_rational(const Json& v, const std::string& where) {
  if (v.is_number_integer()) return Rat((long)v.get<std::int64_t>());
  if (v.is_string()) {
    try {
      Rat r(v.get<std::string>());
      if (r.get_den() == 0) fail_input("zero denominator in " + where);
      r.canonicalize();
      return r;
    } catch (const Error&) {
      throw;
    } catch (const std::exception&) {
      fail_input("bad rational '" + v.get<std::string>() + "' in " + where);
    }
  }
  fail_input("expected an integer or a rational string in " + where);
}

inline const Json& expect_object(const Json& j, const std::string& what) {
  if (!j.is_object()) fail_input(what + " must be a JSON object");
  return j;
}

inline ScalarExpr parse_component(const Json& v, int dim, const std::string& where) {
  if (!v.is_string()) fail_input("expected an expression string in " + where);
  return parse_scalar(v.get<std::string>(), dim);
}

}  // namespace detail

// Parses JSON text, reporting syntax problems as parse errors.
inline Json parse_json_text(const std::string& text, const std::string& what) {
  Json j = Json::parse(text, nullptr, false);
  if (j.is_discarded()) fail_parse("malformed JSON in " + what);
  return j;
}

inline Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail_input("cannot read file: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_json_text(buf.str(), path);
}

// Chart document: { "dimension": d, "mode": "symplectic"|"poisson",
//   "theta": {"m,n": "expr"}, "gamma": {"r;m,n": "expr"} }
// or the quadratic-bivector construction
//   { "dimension": d, "special": {"g": {"a,b": q}, "f": {"a,b;c": q},
//     "rtilde": {"a,b;c,e": q} } }
// with q an integer or a rational string.  Only upper-triangle bivector
// entries are given; antisymmetric completion is automatic.
inline ChartGeometry chart_from_json(const Json& j) {
  detail::expect_object(j, "chart");
  if (!j.contains("dimension") || !j["dimension"].is_number_integer())
    fail_input("chart needs an integer 'dimension'");
  int d = j["dimension"].get<int>();

  if (j.contains("special")) {
    if (j.contains("mode") && j["mode"] != "symplectic")
      fail_input("special charts are symplectic; remove 'mode' or set it to \"symplectic\"");
    const Json& sp = detail::expect_object(j["special"], "'special'");
    SpecialChartSpec spec;
    spec.d = d;
    if (sp.contains("g"))
      for (const auto& [key, v] : detail::expect_object(sp["g"], "'special.g'").items()) {
        auto idx = detail::parse_index_groups(key, 1, "'special.g'");
        if (idx[0].size() != 2) fail_input("'special.g' keys are index pairs");
        spec.g.push_back({idx[0][0], idx[0][1], detail::parse_rational(v, "'special.g'")});
      }
    if (sp.contains("f"))
      for (const auto& [key, v] : detail::expect_object(sp["f"], "'special.f'").items()) {
        auto idx = detail::parse_index_groups(key, 2, "'special.f'");
        if (idx[0].size() != 2 || idx[1].size() != 1)
          fail_input("'special.f' keys look like \"a,b;c\"");
        spec.f.push_back(
            {idx[0][0], idx[0][1], idx[1][0], detail::parse_rational(v, "'special.f'")});
      }
    if (sp.contains("rtilde"))
      for (const auto& [key, v] : detail::expect_object(sp["rtilde"], "'special.rtilde'").items()) {
        auto idx = detail::parse_index_groups(key, 2, "'special.rtilde'");
        if (idx[0].size() != 2 || idx[1].size() != 2)
          fail_input("'special.rtilde' keys look like \"a,b;c,e\"");
        spec.rtilde.push_back({idx[0][0], idx[0][1], idx[1][0], idx[1][1],
                               detail::parse_rational(v, "'special.rtilde'")});
      }
    return build_special_chart(spec);
  }

  if (!j.contains("mode") || !j["mode"].is_string())
    fail_input("chart needs a 'mode' of \"symplectic\" or \"poisson\"");
  std::string mode_name = j["mode"].get<std::string>();
  ChartMode mode;
  if (mode_name == "symplectic")
    mode = ChartMode::symplectic;
  else if (mode_name == "poisson")
    mode = ChartMode::poisson;
  else
    fail_input("unknown chart mode '" + mode_name + "'");

  std::vector<std::tuple<int, int, ScalarExpr>> theta;
  if (j.contains("theta"))
    for (const auto& [key, v] : detail::expect_object(j["theta"], "'theta'").items()) {
      auto idx = detail::parse_index_groups(key, 1, "'theta'");
      if (idx[0].size() != 2) fail_input("'theta' keys are index pairs like \"1,2\"");
      theta.push_back({idx[0][0], idx[0][1], detail::parse_component(v, d, "'theta'")});
    }

  std::vector<std::tuple<int, int, int, ScalarExpr>> gamma;
  if (j.contains("gamma"))
    for (const auto& [key, v] : detail::expect_object(j["gamma"], "'gamma'").items()) {
      auto idx = detail::parse_index_groups(key, 2, "'gamma'");
      if (idx[0].size() != 1 || idx[1].size() != 2)
        fail_input("'gamma' keys look like \"r;m,n\"");
      gamma.push_back(
          {idx[0][0], idx[1][0], idx[1][1], detail::parse_component(v, d, "'gamma'")});
    }

  return load_geometry(d, mode, theta, gamma);
}

inline ChartGeometry load_chart_file(const std::string& path) {
  return chart_from_json(load_json_file(path));
}

// Form document: { "type": [k, l], "degree": p,
//   "components": {"u1,u2;l1;f1,f2": "expr", ...} }
// with semicolon-separated upper, lower, and form index groups, all 1-based.
// The chart supplies the dimension.
inline TensorValuedForm form_from_json(const Json& j, int dim) {
  detail::expect_object(j, "form");
  int k = 0, l = 0, p = 0;
  if (j.contains("type")) {
    const Json& t = j["type"];
    if (!t.is_array() || t.size() != 2 || !t[0].is_number_integer() ||
        !t[1].is_number_integer())
      fail_input("form 'type' must be a pair [k, l] of integers");
    k = t[0].get<int>();
    l = t[1].get<int>();
  }
  if (j.contains("degree")) {
    if (!j["degree"].is_number_integer()) fail_input("form 'degree' must be an integer");
    p = j["degree"].get<int>();
  }
  TensorValuedForm a(dim, k, l, p);
  if (j.contains("components"))
    for (const auto& [key, v] : detail::expect_object(j["components"], "'components'").items()) {
      auto idx = detail::parse_index_groups(key, 3, "'components'");
      if ((int)idx[0].size() != k || (int)idx[1].size() != l || (int)idx[2].size() != p)
        fail_input("component key '" + key + "' does not match the declared type and degree");
      a.accumulate(idx[0], idx[1], idx[2], detail::parse_component(v, dim, "'components'"));
    }
  return a;
}

inline TensorValuedForm load_form_file(const std::string& path, int dim) {
  return form_from_json(load_json_file(path), dim);
}

inline Json form_to_json(const TensorValuedForm& a) {
  Json j;
  j["type"] = {a.upper_rank(), a.lower_rank()};
  j["degree"] = a.degree();
  Json comps = Json::object();
  auto join = [](const std::vector<int>& v) {
    std::string s;
    for (size_t i = 0; i < v.size(); ++i) {
      if (i) s += ",";
      s += std::to_string(v[i]);
    }
    return s;
  };
  for (const auto& [key, v] : a.components())
    comps[join(key.up) + ";" + join(key.lo) + ";" + join(key.form)] = v.str();
  j["components"] = comps;
  return j;
}

}  // namespace covstar
