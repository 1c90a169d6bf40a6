#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "covstar/error.hpp"
#include "covstar/rational.hpp"

namespace covstar {

// Hard cap on the chart dimension.  Every monomial carries a fixed-size
// exponent array; slots beyond the active dimension stay zero.
inline constexpr int kMaxDim = 8;

struct Monomial {
  std::array<uint32_t, kMaxDim> e{};

  uint32_t degree() const {
    uint32_t s = 0;
    for (auto v : e) s += v;
    return s;
  }
  bool is_unit() const {
    for (auto v : e)
      if (v) return false;
    return true;
  }
  friend bool operator==(const Monomial&, const Monomial&) = default;
};

// Graded lexicographic order with x1 > x2 > ... .  Returns +1 when a is the
// larger monomial, -1 when b is, 0 on equality.
inline int mono_cmp(const Monomial& a, const Monomial& b) {
  uint32_t da = a.degree(), db = b.degree();
  if (da != db) return da > db ? 1 : -1;
  for (int i = 0; i < kMaxDim; ++i) {
    if (a.e[i] != b.e[i]) return a.e[i] > b.e[i] ? 1 : -1;
  }
  return 0;
}

struct MonoBefore {
  // "Larger monomial first": term lists are stored leading-term first.
  bool operator()(const Monomial& a, const Monomial& b) const {
    return mono_cmp(a, b) > 0;
  }
};

inline Monomial mono_mul(const Monomial& a, const Monomial& b) {
  Monomial m;
  for (int i = 0; i < kMaxDim; ++i) m.e[i] = a.e[i] + b.e[i];
  return m;
}

// Componentwise a/b, or nullopt when some exponent of b exceeds a's.
inline std::optional<Monomial> mono_div(const Monomial& a, const Monomial& b) {
  Monomial m;
  for (int i = 0; i < kMaxDim; ++i) {
    if (b.e[i] > a.e[i]) return std::nullopt;
    m.e[i] = a.e[i] - b.e[i];
  }
  return m;
}

// Sparse multivariate polynomial with rational coefficients.  Terms are kept
// sorted leading-first under graded lex and never store a zero coefficient,
// so the representation is canonical and the zero test is `terms.empty()`.
class Poly {
public:
  using Term = std::pair<Monomial, Rat>;
  std::vector<Term> t;

  Poly() = default;

  static Poly constant(const Rat& c) {
    Poly p;
    if (c != 0) p.t.push_back({Monomial{}, c});
    return p;
  }
  static Poly variable(int i /*1-based*/) {
    Monomial m;
    m.e[i - 1] = 1;
    Poly p;
    p.t.push_back({m, Rat(1)});
    return p;
  }

  bool is_zero() const { return t.empty(); }
  bool is_constant() const {
    return t.empty() || (t.size() == 1 && t[0].first.is_unit());
  }
  // Constant term value; only meaningful when is_constant().
  Rat constant_value() const { return t.empty() ? Rat(0) : t[0].second; }
  const Term& lead() const { return t.front(); }
  uint32_t degree() const { return t.empty() ? 0 : t[0].first.degree(); }

  friend bool operator==(const Poly&, const Poly&) = default;
};

inline Poly poly_add(const Poly& a, const Poly& b) {
  Poly r;
  r.t.reserve(a.t.size() + b.t.size());
  size_t i = 0, j = 0;
  while (i < a.t.size() && j < b.t.size()) {
    int c = mono_cmp(a.t[i].first, b.t[j].first);
    if (c > 0) {
      r.t.push_back(a.t[i++]);
    } else if (c < 0) {
      r.t.push_back(b.t[j++]);
    } else {
      Rat s = a.t[i].second + b.t[j].second;
      if (s != 0) r.t.push_back({a.t[i].first, s});
      ++i, ++j;
    }
  }
  for (; i < a.t.size(); ++i) r.t.push_back(a.t[i]);
  for (; j < b.t.size(); ++j) r.t.push_back(b.t[j]);
  return r;
}

inline Poly poly_neg(const Poly& a) {
  Poly r = a;
  for (auto& [m, c] : r.t) c = -c;
  return r;
}

inline Poly poly_sub(const Poly& a, const Poly& b) { return poly_add(a, poly_neg(b)); }

// a * (m, c) with c != 0.
inline Poly poly_mul_term(const Poly& a, const Monomial& m, const Rat& c) {
  Poly r;
  r.t.reserve(a.t.size());
  for (const auto& [ma, ca] : a.t) r.t.push_back({mono_mul(ma, m), ca * c});
  return r;
}

inline Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.is_zero() || b.is_zero()) return Poly();
  if (b.t.size() == 1) return poly_mul_term(a, b.t[0].first, b.t[0].second);
  if (a.t.size() == 1) return poly_mul_term(b, a.t[0].first, a.t[0].second);
  std::map<Monomial, Rat, MonoBefore> acc;
  for (const auto& [ma, ca] : a.t)
    for (const auto& [mb, cb] : b.t) {
      Monomial m = mono_mul(ma, mb);
      auto [it, fresh] = acc.try_emplace(m, ca * cb);
      if (!fresh) it->second += ca * cb;
    }
  Poly r;
  r.t.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (c != 0) r.t.push_back({m, c});
  return r;
}

inline Poly poly_pow(const Poly& a, unsigned e) {
  Poly r = Poly::constant(Rat(1));
  Poly base = a;
  while (e) {
    if (e & 1) r = poly_mul(r, base);
    e >>= 1;
    if (e) base = poly_mul(base, base);
  }
  return r;
}

// Exact division: returns q with a == q*b, or nullopt when b does not divide
// a.  Plain leading-term reduction under graded lex; for exact quotients the
// leading term of the remainder is always divisible, so a single failed step
// settles the question.
inline std::optional<Poly> poly_try_divide(const Poly& a, const Poly& b) {
  if (b.is_zero()) fail_internal("polynomial division by zero");
  if (a.is_zero()) return Poly();
  if (b.is_constant()) {
    Poly q = a;
    for (auto& [m, c] : q.t) c /= b.constant_value();
    return q;
  }
  Poly rem = a;
  Poly quot;
  while (!rem.is_zero()) {
    auto m = mono_div(rem.lead().first, b.lead().first);
    if (!m) return std::nullopt;
    Rat c = rem.lead().second / b.lead().second;
    quot.t.push_back({*m, c}); // leading monomials strictly decrease
    rem = poly_sub(rem, poly_mul_term(b, *m, c));
  }
  return quot;
}

inline Poly poly_derivative(const Poly& a, int var /*1-based*/) {
  Poly r;
  for (const auto& [m, c] : a.t) {
    uint32_t k = m.e[var - 1];
    if (!k) continue;
    Monomial mm = m;
    mm.e[var - 1] = k - 1;
    r.t.push_back({mm, c * k});
  }
  // Dropping terms preserves the sort order; nothing merges.
  return r;
}

inline Rat poly_eval(const Poly& a, const std::vector<Rat>& x) {
  Rat s(0);
  for (const auto& [m, c] : a.t) {
    Rat term = c;
    for (size_t v = 0; v < x.size(); ++v)
      if (m.e[v]) term *= rat_pow_ui(x[v], m.e[v]);
    s += term;
  }
  return s;
}

inline void poly_scale(Poly& a, const Rat& s) {
  if (s == 0) {
    a.t.clear();
    return;
  }
  for (auto& [m, c] : a.t) c *= s;
}

inline int poly_max_var(const Poly& a) {
  int mx = 0;
  for (const auto& [m, c] : a.t)
    for (int i = kMaxDim - 1; i >= mx; --i)
      if (m.e[i]) mx = i + 1;
  return mx;
}

} // namespace covstar
