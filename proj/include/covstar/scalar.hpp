#pragma once

#include <cctype>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "covstar/polynomial.hpp"

namespace covstar {

// Exact rational function of the chart coordinates x1..xd, held as a
// numerator/denominator pair of expanded polynomials.  The pair is canonical
// only up to a common polynomial factor: no multivariate gcd is computed.
// Equality therefore goes through cross multiplication, which is decidable
// because the polynomials themselves are canonical.
//
// Normalization invariant: coefficients of the pair are integers with no
// common integer factor, and the leading coefficient of the denominator is
// positive.  A few cheap exact-division attempts keep the denominators from
// piling up common factors during long sums (powers of the same chart
// denominator dominate in practice).
class ScalarExpr {
public:
  ScalarExpr() : d_(0), num_(), den_(Poly::constant(Rat(1))) {}

  static ScalarExpr zero(int dim) { return ScalarExpr(dim, Poly(), Poly::constant(Rat(1))); }
  static ScalarExpr constant(int dim, const Rat& c) {
    return ScalarExpr(dim, Poly::constant(c), Poly::constant(Rat(1)));
  }
  static ScalarExpr variable(int dim, int i) {
    if (i < 1 || i > dim) fail_input("coordinate index out of range");
    return ScalarExpr(dim, Poly::variable(i), Poly::constant(Rat(1)));
  }
  ScalarExpr(int dim, Poly num, Poly den) : d_(dim), num_(std::move(num)), den_(std::move(den)) {
    if (dim < 1 || dim > kMaxDim) fail_input("dimension out of range");
    if (den_.is_zero()) fail_input("zero denominator");
    normalize();
  }

  int dim() const { return d_; }
  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }
  Rat constant_value() const { return num_.constant_value() / den_.constant_value(); }

  friend ScalarExpr operator-(const ScalarExpr& a) {
    ScalarExpr r = a;
    r.num_ = poly_neg(r.num_);
    // sign normalization lives in the denominator; numerator sign is free
    return r;
  }

  friend ScalarExpr operator+(const ScalarExpr& a, const ScalarExpr& b) {
    check_dims(a, b);
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.den_ == b.den_)
      return ScalarExpr(a.d_, poly_add(a.num_, b.num_), a.den_);
    if (auto h = poly_try_divide(b.den_, a.den_)) // b.den = a.den * h
      return ScalarExpr(a.d_, poly_add(poly_mul(a.num_, *h), b.num_), b.den_);
    if (auto h = poly_try_divide(a.den_, b.den_))
      return ScalarExpr(a.d_, poly_add(a.num_, poly_mul(b.num_, *h)), a.den_);
    return ScalarExpr(a.d_, poly_add(poly_mul(a.num_, b.den_), poly_mul(b.num_, a.den_)),
                      poly_mul(a.den_, b.den_));
  }

  friend ScalarExpr operator-(const ScalarExpr& a, const ScalarExpr& b) { return a + (-b); }

  friend ScalarExpr operator*(const ScalarExpr& a, const ScalarExpr& b) {
    check_dims(a, b);
    if (a.is_zero() || b.is_zero()) return zero(std::max(a.d_, b.d_));
    Poly n1 = a.num_, d1 = a.den_, n2 = b.num_, d2 = b.den_;
    // cross-cancel before multiplying; keeps powers of chart denominators low
    if (!d2.is_constant())
      if (auto q = poly_try_divide(n1, d2)) {
        n1 = *q;
        d2 = Poly::constant(Rat(1));
      }
    if (!d1.is_constant())
      if (auto q = poly_try_divide(n2, d1)) {
        n2 = *q;
        d1 = Poly::constant(Rat(1));
      }
    return ScalarExpr(a.d_, poly_mul(n1, n2), poly_mul(d1, d2));
  }

  friend ScalarExpr operator/(const ScalarExpr& a, const ScalarExpr& b) {
    check_dims(a, b);
    if (b.is_zero()) fail_input("division by zero");
    return a * ScalarExpr(b.d_, b.den_, b.num_);
  }

  ScalarExpr& operator+=(const ScalarExpr& o) { return *this = *this + o; }
  ScalarExpr& operator-=(const ScalarExpr& o) { return *this = *this - o; }
  ScalarExpr& operator*=(const ScalarExpr& o) { return *this = *this * o; }

  ScalarExpr pow(unsigned e) const {
    if (e == 0) return constant(d_, Rat(1));
    return ScalarExpr(d_, poly_pow(num_, e), poly_pow(den_, e));
  }

  // Partial derivative with respect to x_i (1-based).
  ScalarExpr derivative(int i) const {
    if (i < 1 || i > d_) fail_input("derivative index out of range");
    Poly dn = poly_derivative(num_, i);
    if (den_.is_constant()) return ScalarExpr(d_, std::move(dn), den_);
    Poly dd = poly_derivative(den_, i);
    if (dd.is_zero()) return ScalarExpr(d_, std::move(dn), den_);
    // (n/d)' = (n'd - nd')/d^2
    Poly numer = poly_sub(poly_mul(dn, den_), poly_mul(num_, dd));
    if (auto q = poly_try_divide(numer, den_)) return ScalarExpr(d_, *q, den_);
    return ScalarExpr(d_, std::move(numer), poly_mul(den_, den_));
  }

  bool equals(const ScalarExpr& o) const {
    check_dims(*this, o);
    if (num_ == o.num_ && den_ == o.den_) return true;
    return poly_sub(poly_mul(num_, o.den_), poly_mul(o.num_, den_)).is_zero();
  }

  // Evaluate at an exact rational point (x1..xd).  Poles are errors.
  Rat evaluate(const std::vector<Rat>& x) const {
    if ((int)x.size() != d_) fail_input("evaluation point has wrong dimension");
    Rat dv = poly_eval(den_, x);
    if (dv == 0) fail_input("evaluation at a pole of the denominator");
    return poly_eval(num_, x) / dv;
  }

  std::string str() const;

private:
  int d_;
  Poly num_, den_;

  static void check_dims(const ScalarExpr& a, const ScalarExpr& b) {
    if (a.d_ != b.d_) fail_input("scalar dimension mismatch");
  }

  void normalize() {
    if (num_.is_zero()) {
      den_ = Poly::constant(Rat(1));
      return;
    }
    if (!den_.is_constant()) {
      if (auto q = poly_try_divide(num_, den_)) {
        num_ = *q;
        den_ = Poly::constant(Rat(1));
      } else if (!num_.is_constant()) {
        if (auto q2 = poly_try_divide(den_, num_)) {
          den_ = *q2;
          num_ = Poly::constant(Rat(1));
        }
      }
    }
    // Joint content: scale both polynomials by the same rational so all
    // coefficients become coprime integers.
    Int lcm(1);
    for (const auto& [m, c] : num_.t) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
    for (const auto& [m, c] : den_.t) mpz_lcm(lcm.get_mpz_t(), lcm.get_mpz_t(), c.get_den_mpz_t());
    Int gcd(0);
    auto fold = [&](const Poly& p) {
      for (const auto& [m, c] : p.t) {
        Int scaled = c.get_num() * (lcm / c.get_den());
        mpz_gcd(gcd.get_mpz_t(), gcd.get_mpz_t(), scaled.get_mpz_t());
      }
    };
    fold(num_);
    fold(den_);
    Rat s(lcm, gcd); // gcd > 0 since num_ is nonzero
    s.canonicalize();
    if (s != 1) {
      poly_scale(num_, s);
      poly_scale(den_, s);
    }
    if (den_.lead().second < 0) {
      num_ = poly_neg(num_);
      den_ = poly_neg(den_);
    }
  }
};

// ---------------------------------------------------------------------------
// Printing.  Output re-parses to an equal scalar.

inline std::string mono_str(const Monomial& m) {
  std::string s;
  for (int i = 0; i < kMaxDim; ++i) {
    if (!m.e[i]) continue;
    if (!s.empty()) s += "*";
    s += "x" + std::to_string(i + 1);
    if (m.e[i] > 1) s += "^" + std::to_string(m.e[i]);
  }
  return s;
}

inline std::string poly_str(const Poly& p) {
  if (p.is_zero()) return "0";
  std::string s;
  bool first = true;
  for (const auto& [m, c] : p.t) {
    bool neg = c < 0;
    Rat a = neg ? Rat(-c) : c;
    std::string piece;
    if (m.is_unit())
      piece = rat_str(a);
    else if (a == 1)
      piece = mono_str(m);
    else
      piece = rat_str(a) + "*" + mono_str(m);
    if (first)
      s += (neg ? "-" : "") + piece;
    else
      s += (neg ? " - " : " + ") + piece;
    first = false;
  }
  return s;
}

inline std::string ScalarExpr::str() const {
  if (num_.is_zero()) return "0";
  std::string n = poly_str(num_);
  if (den_.is_constant() && den_.constant_value() == 1) return n;
  if (num_.t.size() > 1) n = "(" + n + ")";
  std::string d = poly_str(den_);
  if (den_.t.size() > 1 || !den_.is_constant()) d = "(" + d + ")";
  return n + "/" + d;
}

// ---------------------------------------------------------------------------
// Parser for the scalar grammar:
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := '-' factor | base ('^' uint)?
//   base   := uint | 'x' uint | '(' expr ')'
// Coordinates are x1..xd (1-based).  Errors carry the byte offset.

namespace detail {

class ScalarParser {
public:
  ScalarParser(std::string_view s, int dim) : s_(s), dim_(dim) {}

  ScalarExpr run() {
    ScalarExpr e = expr();
    skip_ws();
    if (pos_ != s_.size()) err("unexpected character");
    return e;
  }

private:
  std::string_view s_;
  size_t pos_ = 0;
  int dim_;

  [[noreturn]] void err(const std::string& what) {
    fail_parse("scalar parse error at offset " + std::to_string(pos_) + ": " + what);
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace((unsigned char)s_[pos_])) ++pos_;
  }
  bool peek_is(char c) {
    skip_ws();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool eat(char c) {
    if (peek_is(c)) {
      ++pos_;
      return true;
    }
    return false;
  }

  std::string digits() {
    skip_ws();
    size_t start = pos_;
    while (pos_ < s_.size() && std::isdigit((unsigned char)s_[pos_])) ++pos_;
    if (pos_ == start) err("expected a number");
    return std::string(s_.substr(start, pos_ - start));
  }

  unsigned parse_uint() {
    std::string d = digits();
    if (d.size() > 6) err("exponent too large");
    return (unsigned)std::stoul(d);
  }

  ScalarExpr expr() {
    ScalarExpr e = term();
    for (;;) {
      if (eat('+'))
        e += term();
      else if (eat('-'))
        e -= term();
      else
        return e;
    }
  }

  ScalarExpr term() {
    ScalarExpr e = factor();
    for (;;) {
      if (eat('*')) {
        e *= factor();
      } else if (eat('/')) {
        size_t at = pos_ - 1;
        ScalarExpr rhs = factor();
        if (rhs.is_zero()) {
          pos_ = at;
          err("division by zero");
        }
        e = e / rhs;
      } else {
        return e;
      }
    }
  }

  ScalarExpr factor() {
    if (eat('-')) return -factor();
    ScalarExpr b = base();
    if (eat('^')) b = b.pow(parse_uint());
    return b;
  }

  ScalarExpr base() {
    skip_ws();
    if (pos_ >= s_.size()) err("unexpected end of input");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      ScalarExpr e = expr();
      if (!eat(')')) err("expected ')'");
      return e;
    }
    if (c == 'x') {
      ++pos_;
      size_t at = pos_;
      std::string d = digits();
      long i = std::stol(d);
      if (i < 1 || i > dim_) {
        pos_ = at;
        err("coordinate index out of range 1.." + std::to_string(dim_));
      }
      return ScalarExpr::variable(dim_, (int)i);
    }
    if (std::isdigit((unsigned char)c)) {
      return ScalarExpr::constant(dim_, Rat(Int(digits())));
    }
    err("expected a number, coordinate or '('");
  }
};

} // namespace detail

inline ScalarExpr parse_scalar(std::string_view text, int dim) {
  if (dim < 1 || dim > kMaxDim) fail_input("dimension out of range");
  return detail::ScalarParser(text, dim).run();
}

} // namespace covstar
