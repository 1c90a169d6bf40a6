#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "covstar/scalar.hpp"

namespace covstar {

// Key of one stored component of a tensor-valued form: the contravariant
// index tuple, the covariant index tuple, and a strictly increasing tuple of
// form indices.  All indices are 1-based chart indices.
struct CompKey {
  std::vector<int> up, lo, form;
  auto operator<=>(const CompKey&) const = default;
};

// In-place insertion sort.  Returns the sign of the sorting permutation, or
// 0 when two entries coincide (so the antisymmetrized component vanishes).
inline int sort_with_sign(std::vector<int>& v) {
  int sign = 1;
  for (size_t i = 1; i < v.size(); ++i) {
    int x = v[i];
    size_t j = i;
    while (j > 0 && v[j - 1] > x) {
      v[j] = v[j - 1];
      --j;
      sign = -sign;
    }
    v[j] = x;
  }
  for (size_t i = 1; i < v.size(); ++i)
    if (v[i - 1] == v[i]) return 0;
  return sign;
}

inline std::vector<int> concat_indices(const std::vector<int>& a, const std::vector<int>& b) {
  std::vector<int> r = a;
  r.insert(r.end(), b.begin(), b.end());
  return r;
}

// All n-tuples over 1..dim in lexicographic order.
inline std::vector<std::vector<int>> all_tuples(int dim, int n) {
  std::vector<std::vector<int>> out;
  std::vector<int> cur(n, 1);
  if (n == 0) {
    out.push_back({});
    return out;
  }
  for (;;) {
    out.push_back(cur);
    int i = n - 1;
    while (i >= 0 && cur[i] == dim) --i;
    if (i < 0) return out;
    ++cur[i];
    for (int j = i + 1; j < n; ++j) cur[j] = 1;
  }
}

// All strictly increasing n-tuples over 1..dim.
inline std::vector<std::vector<int>> increasing_tuples(int dim, int n) {
  std::vector<std::vector<int>> out;
  if (n > dim) return out;
  std::vector<int> cur(n);
  for (int i = 0; i < n; ++i) cur[i] = i + 1;
  if (n == 0) {
    out.push_back({});
    return out;
  }
  for (;;) {
    out.push_back(cur);
    int i = n - 1;
    while (i >= 0 && cur[i] == dim - (n - 1 - i)) --i;
    if (i < 0) return out;
    ++cur[i];
    for (int j = i + 1; j < n; ++j) cur[j] = cur[j - 1] + 1;
  }
}

// A differential form of fixed degree whose coefficients carry a tensor type:
// `upper` contravariant slots and `lower` covariant slots.  Storage is a
// sparse map from component keys to exact scalars; form index tuples are kept
// strictly increasing, with the antisymmetrization sign applied on entry.
// Zero components are never stored, so a form is zero exactly when the map is
// empty.
//
// Additive operations accept a zero form of any tensor type or degree in
// place of a matching one.  Operators that record a direction as an extra
// covariant slot (materialized covariant derivatives and interior
// contractions) always prepend at slot 0, so the outermost operation owns
// the first covariant index.
class TensorValuedForm {
public:
  TensorValuedForm() = default;
  TensorValuedForm(int dim, int upper, int lower, int degree)
      : d_(dim), k_(upper), l_(lower), p_(degree) {
    if (dim < 1 || dim > kMaxDim) fail_input("dimension out of range");
    if (upper < 0 || lower < 0 || degree < 0) fail_input("negative tensor rank or form degree");
  }

  int dim() const { return d_; }
  int upper_rank() const { return k_; }
  int lower_rank() const { return l_; }
  int degree() const { return p_; }
  const std::map<CompKey, ScalarExpr>& components() const { return c_; }
  bool is_zero() const { return c_.empty(); }

  // Add `v` into the component named by the key, normalizing the form tuple.
  void accumulate(std::vector<int> up, std::vector<int> lo, std::vector<int> form,
                  const ScalarExpr& v) {
    if (v.dim() != d_) fail_input("component scalar dimension mismatch");
    if (v.is_zero()) return;
    check_key(up, lo, form);
    int sign = sort_with_sign(form);
    if (sign == 0) return;
    CompKey key{std::move(up), std::move(lo), std::move(form)};
    auto it = c_.find(key);
    if (it == c_.end()) {
      c_.emplace(std::move(key), sign < 0 ? -v : v);
    } else {
      it->second += sign < 0 ? -v : v;
      if (it->second.is_zero()) c_.erase(it);
    }
  }

  // Component lookup; the form tuple may come in any order.
  ScalarExpr component(std::vector<int> up, std::vector<int> lo, std::vector<int> form) const {
    check_key(up, lo, form);
    int sign = sort_with_sign(form);
    if (sign == 0) return ScalarExpr::zero(d_);
    auto it = c_.find(CompKey{std::move(up), std::move(lo), std::move(form)});
    if (it == c_.end()) return ScalarExpr::zero(d_);
    return sign < 0 ? -it->second : it->second;
  }

  friend TensorValuedForm operator-(const TensorValuedForm& a) {
    TensorValuedForm r = a;
    for (auto& [key, v] : r.c_) v = -v;
    return r;
  }

  friend TensorValuedForm operator+(const TensorValuedForm& a, const TensorValuedForm& b) {
    if (a.d_ != b.d_) fail_input("form dimension mismatch");
    if (a.is_zero()) return b;
    if (b.is_zero()) return a;
    if (a.k_ != b.k_ || a.l_ != b.l_ || a.p_ != b.p_) fail_input("form shape mismatch");
    TensorValuedForm r = a;
    for (const auto& [key, v] : b.c_) r.accumulate(key.up, key.lo, key.form, v);
    return r;
  }

  friend TensorValuedForm operator-(const TensorValuedForm& a, const TensorValuedForm& b) {
    return a + (-b);
  }

  friend TensorValuedForm operator*(const ScalarExpr& s, const TensorValuedForm& a) {
    if (s.dim() != a.d_) fail_input("form dimension mismatch");
    TensorValuedForm r(a.d_, a.k_, a.l_, a.p_);
    if (s.is_zero()) return r;
    for (const auto& [key, v] : a.c_) r.accumulate(key.up, key.lo, key.form, s * v);
    return r;
  }

  friend TensorValuedForm operator*(const Rat& q, const TensorValuedForm& a) {
    if (a.d_ == 0) return a;
    return ScalarExpr::constant(a.d_, q) * a;
  }

  TensorValuedForm& operator+=(const TensorValuedForm& o) { return *this = *this + o; }
  TensorValuedForm& operator-=(const TensorValuedForm& o) { return *this = *this - o; }

  // Exact equality of the antisymmetrized components.  Zero forms compare
  // equal regardless of their nominal shape.
  bool equals(const TensorValuedForm& o) const {
    if (is_zero() && o.is_zero()) return true;
    if (d_ != o.d_) return false;
    if (!is_zero() && !o.is_zero() && (k_ != o.k_ || l_ != o.l_ || p_ != o.p_)) return false;
    return (*this - o).is_zero();
  }

private:
  int d_ = 0, k_ = 0, l_ = 0, p_ = 0;
  std::map<CompKey, ScalarExpr> c_;

  void check_key(const std::vector<int>& up, const std::vector<int>& lo,
                 const std::vector<int>& form) const {
    if ((int)up.size() != k_ || (int)lo.size() != l_ || (int)form.size() != p_)
      fail_input("component key does not match the form shape");
    auto in_range = [&](const std::vector<int>& v) {
      for (int i : v)
        if (i < 1 || i > d_) fail_input("component index out of range");
    };
    in_range(up);
    in_range(lo);
    in_range(form);
  }
};

// dx^mu as a scalar-valued one-form.
inline TensorValuedForm coordinate_one_form(int dim, int mu) {
  TensorValuedForm r(dim, 0, 0, 1);
  r.accumulate({}, {}, {mu}, ScalarExpr::constant(dim, Rat(1)));
  return r;
}

// A scalar function as a (0,0)-tensor-valued zero-form.
inline TensorValuedForm scalar_form(const ScalarExpr& s) {
  TensorValuedForm r(s.dim(), 0, 0, 0);
  r.accumulate({}, {}, {}, s);
  return r;
}

// Wedge product.  Tensor slots concatenate, the left factor's slots first;
// form tuples merge with the permutation sign.  Degrees above the dimension
// come out empty automatically.
inline TensorValuedForm wedge(const TensorValuedForm& a, const TensorValuedForm& b) {
  if (a.dim() != b.dim()) fail_input("form dimension mismatch");
  TensorValuedForm r(a.dim(), a.upper_rank() + b.upper_rank(), a.lower_rank() + b.lower_rank(),
                     a.degree() + b.degree());
  for (const auto& [ka, va] : a.components())
    for (const auto& [kb, vb] : b.components()) {
      ScalarExpr v = va * vb;
      if (v.is_zero()) continue;
      r.accumulate(concat_indices(ka.up, kb.up), concat_indices(ka.lo, kb.lo),
                   concat_indices(ka.form, kb.form), v);
    }
  return r;
}

// Interior contraction with the coordinate direction rho (the contracted form
// slot is the first one).  Zero-forms contract to zero.
inline TensorValuedForm interior(const TensorValuedForm& a, int rho) {
  if (rho < 1 || rho > a.dim()) fail_input("interior index out of range");
  if (a.degree() == 0) return TensorValuedForm(a.dim(), a.upper_rank(), a.lower_rank(), 0);
  TensorValuedForm r(a.dim(), a.upper_rank(), a.lower_rank(), a.degree() - 1);
  for (const auto& [key, v] : a.components()) {
    auto it = std::find(key.form.begin(), key.form.end(), rho);
    if (it == key.form.end()) continue;
    int pos = (int)(it - key.form.begin());
    std::vector<int> rest;
    rest.reserve(key.form.size() - 1);
    for (int f : key.form)
      if (f != rho) rest.push_back(f);
    r.accumulate(key.up, key.lo, std::move(rest), (pos % 2) ? -v : v);
  }
  return r;
}

// Interior contraction with the direction recorded as a fresh covariant slot
// at position 0: component [U; (rho,L); F] of the result is the component
// [U; L; F] of interior(a, rho).
inline TensorValuedForm interior_all(const TensorValuedForm& a) {
  TensorValuedForm r(a.dim(), a.upper_rank(), a.lower_rank() + 1,
                     a.degree() > 0 ? a.degree() - 1 : 0);
  if (a.degree() == 0) return r;
  for (const auto& [key, v] : a.components())
    for (size_t pos = 0; pos < key.form.size(); ++pos) {
      std::vector<int> rest;
      rest.reserve(key.form.size() - 1);
      for (size_t j = 0; j < key.form.size(); ++j)
        if (j != pos) rest.push_back(key.form[j]);
      std::vector<int> lo = key.lo;
      lo.insert(lo.begin(), key.form[pos]);
      r.accumulate(key.up, std::move(lo), std::move(rest), (pos % 2) ? -v : v);
    }
  return r;
}

// Plain exterior derivative of the coefficients; tensor slots are untouched.
inline TensorValuedForm exterior_derivative(const TensorValuedForm& a) {
  TensorValuedForm r(a.dim(), a.upper_rank(), a.lower_rank(), a.degree() + 1);
  for (const auto& [key, v] : a.components())
    for (int s = 1; s <= a.dim(); ++s) {
      ScalarExpr dv = v.derivative(s);
      if (dv.is_zero()) continue;
      std::vector<int> form = key.form;
      form.insert(form.begin(), s);
      r.accumulate(key.up, key.lo, std::move(form), dv);
    }
  return r;
}

// Fix the leading covariant slots to `fixed` and drop them.
inline TensorValuedForm slice_lower_front(const TensorValuedForm& a, const std::vector<int>& fixed) {
  if ((int)fixed.size() > a.lower_rank()) fail_input("slice deeper than the covariant rank");
  TensorValuedForm r(a.dim(), a.upper_rank(), a.lower_rank() - (int)fixed.size(), a.degree());
  for (const auto& [key, v] : a.components()) {
    if (!std::equal(fixed.begin(), fixed.end(), key.lo.begin())) continue;
    r.accumulate(key.up, std::vector<int>(key.lo.begin() + fixed.size(), key.lo.end()), key.form,
                 v);
  }
  return r;
}

// Fix the leading contravariant slots to `fixed` and drop them.
inline TensorValuedForm slice_upper_front(const TensorValuedForm& a, const std::vector<int>& fixed) {
  if ((int)fixed.size() > a.upper_rank()) fail_input("slice deeper than the contravariant rank");
  TensorValuedForm r(a.dim(), a.upper_rank() - (int)fixed.size(), a.lower_rank(), a.degree());
  for (const auto& [key, v] : a.components()) {
    if (!std::equal(fixed.begin(), fixed.end(), key.up.begin())) continue;
    r.accumulate(std::vector<int>(key.up.begin() + fixed.size(), key.up.end()), key.lo, key.form,
                 v);
  }
  return r;
}

// Permute whole tensor blocks.  `blocks` lists the (upper, lower) ranks of
// the consecutive blocks in a's current slot layout; `order[j]` names the
// block placed at position j of the result.  Form indices and values are
// untouched: tensor slots carry no grading, so no sign appears here.
inline TensorValuedForm reorder_blocks(const TensorValuedForm& a,
                                       const std::vector<std::pair<int, int>>& blocks,
                                       const std::vector<int>& order) {
  int n = (int)blocks.size();
  if ((int)order.size() != n) fail_input("block order length mismatch");
  std::vector<int> seen(n, 0), up_off(n + 1, 0), lo_off(n + 1, 0);
  for (int i = 0; i < n; ++i) {
    up_off[i + 1] = up_off[i] + blocks[i].first;
    lo_off[i + 1] = lo_off[i] + blocks[i].second;
  }
  if (up_off[n] != a.upper_rank() || lo_off[n] != a.lower_rank())
    fail_input("block ranks do not add up to the form shape");
  for (int j : order) {
    if (j < 0 || j >= n || seen[j]) fail_input("block order is not a permutation");
    seen[j] = 1;
  }
  TensorValuedForm r(a.dim(), a.upper_rank(), a.lower_rank(), a.degree());
  for (const auto& [key, v] : a.components()) {
    std::vector<int> up, lo;
    up.reserve(key.up.size());
    lo.reserve(key.lo.size());
    for (int j : order) {
      up.insert(up.end(), key.up.begin() + up_off[j], key.up.begin() + up_off[j + 1]);
      lo.insert(lo.end(), key.lo.begin() + lo_off[j], key.lo.begin() + lo_off[j + 1]);
    }
    r.accumulate(std::move(up), std::move(lo), key.form, v);
  }
  return r;
}

// ---------------------------------------------------------------------------
// Printing, mainly for demos and error reports.

inline std::string index_list(const std::vector<int>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(v[i]);
  }
  return s;
}

inline std::string key_str(const CompKey& k) {
  return index_list(k.up) + ";" + index_list(k.lo) + ";" + index_list(k.form);
}

inline std::string to_string(const TensorValuedForm& a) {
  std::string s = "(" + std::to_string(a.upper_rank()) + "," + std::to_string(a.lower_rank()) +
                  ")-tensor " + std::to_string(a.degree()) + "-form, dim " +
                  std::to_string(a.dim());
  if (a.is_zero()) return s + ", zero";
  for (const auto& [key, v] : a.components()) s += "\n  [" + key_str(key) + "]  " + v.str();
  return s;
}

} // namespace covstar
