#pragma once

#include <optional>
#include <tuple>
#include <utility>
#include <vector>

#include "covstar/tensor_form.hpp"

namespace covstar {

enum class ChartMode { symplectic, poisson };

// Which lower slot of Gamma^rho_{mu nu} carries the derivative direction.
// The primary connection differentiates along the first slot, the tilde
// connection along the second; the two share the same coefficient array.
enum class ConnectionSelector { primary, tilde };

using Matrix = std::vector<std::vector<ScalarExpr>>;

namespace detail {

// Exact Gauss-Jordan inverse over the rational-function field.  Pivots on
// the first symbolically nonzero entry, never numerically.  Returns nothing
// when the matrix is singular (determinant identically zero).
inline std::optional<Matrix> invert_matrix(Matrix a, int dim) {
  int n = (int)a.size();
  Matrix inv(n, std::vector<ScalarExpr>(n, ScalarExpr::zero(dim)));
  for (int i = 0; i < n; ++i) inv[i][i] = ScalarExpr::constant(dim, Rat(1));
  for (int col = 0; col < n; ++col) {
    int piv = -1;
    for (int r = col; r < n; ++r)
      if (!a[r][col].is_zero()) {
        piv = r;
        break;
      }
    if (piv < 0) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(inv[piv], inv[col]);
    ScalarExpr p = a[col][col];
    for (int c = 0; c < n; ++c) {
      a[col][c] = a[col][c] / p;
      inv[col][c] = inv[col][c] / p;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      ScalarExpr f = a[r][col];
      if (f.is_zero()) continue;
      for (int c = 0; c < n; ++c) {
        a[r][c] -= f * a[col][c];
        inv[r][c] -= f * inv[col][c];
      }
    }
  }
  return inv;
}

inline void check_chart_index(int i, int d) {
  if (i < 1 || i > d) fail_input("chart index out of range");
}

} // namespace detail

// A coordinate chart carrying the bivector theta, optionally its inverse
// two-form omega (symplectic mode only), and one array of connection
// coefficients Gamma^rho_{mu nu} serving both connections.  The derived
// torsion and curvature data is computed once at load time; the object is
// immutable afterwards and safe to share across threads.
struct ChartGeometry {
  int d = 0;
  ChartMode mode = ChartMode::symplectic;
  Matrix theta;              // theta[m-1][n-1], antisymmetric
  Matrix omega;              // omega[m-1][n-1]; empty in poisson mode
  std::vector<Matrix> gamma; // gamma[r-1][m-1][n-1]

  TensorValuedForm torsion;          // (1,0) two-form, component (r;;m<n) = T^r_{mn}
  TensorValuedForm curvature;        // (1,1) two-form of the primary connection
  TensorValuedForm curvature_tilde;  // (1,1) two-form of the tilde connection
  TensorValuedForm curvature_raised; // (2,0) two-form, theta against the tilde
                                     // curvature's lower slot; symplectic only

  const ScalarExpr& th(int m, int n) const { return theta[m - 1][n - 1]; }
  const ScalarExpr& om(int m, int n) const {
    if (mode != ChartMode::symplectic) fail_prereq("omega requires a symplectic chart");
    return omega[m - 1][n - 1];
  }
  const ScalarExpr& G(int r, int m, int n) const { return gamma[r - 1][m - 1][n - 1]; }
  ScalarExpr T(int r, int m, int n) const { return G(r, m, n) - G(r, n, m); }
  bool torsion_free() const { return torsion.is_zero(); }
};

// Connection coefficient with the derivative slot selected: the primary
// connection reads Gamma^a_{der,other}, the tilde connection Gamma^a_{other,der}.
inline const ScalarExpr& gsel(const ChartGeometry& g, ConnectionSelector sel, int a, int der,
                              int other) {
  return sel == ConnectionSelector::primary ? g.G(a, der, other) : g.G(a, other, der);
}

// Curvature two-form of the selected connection, as a (1,1)-tensor-valued
// two-form.  The component at (m; n; r<s) is
//   d_r G(m,s,n) - d_s G(m,r,n) + sum_t [G(m,r,t) G(t,s,n) - G(m,s,t) G(t,r,n)],
// the coefficient expansion of dGamma^m_n + Gamma^m_t ^ Gamma^t_n for the
// selected connection one-forms.
inline TensorValuedForm compute_curvature(const ChartGeometry& g, ConnectionSelector sel) {
  TensorValuedForm out(g.d, 1, 1, 2);
  for (int m = 1; m <= g.d; ++m)
    for (int n = 1; n <= g.d; ++n)
      for (int r = 1; r <= g.d; ++r)
        for (int s = r + 1; s <= g.d; ++s) {
          ScalarExpr v =
              gsel(g, sel, m, s, n).derivative(r) - gsel(g, sel, m, r, n).derivative(s);
          for (int t = 1; t <= g.d; ++t)
            v += gsel(g, sel, m, r, t) * gsel(g, sel, t, s, n) -
                 gsel(g, sel, m, s, t) * gsel(g, sel, t, r, n);
          out.accumulate({m}, {n}, {r, s}, v);
        }
  return out;
}

// Tilde curvature with its lower slot raised by theta: component (m,n;;r<s)
// is theta^{m p} times the tilde curvature component (n; p; r<s).
inline TensorValuedForm raise_curvature(const ChartGeometry& g) {
  if (g.mode != ChartMode::symplectic)
    fail_prereq("raised curvature requires a symplectic chart");
  TensorValuedForm out(g.d, 2, 0, 2);
  for (int m = 1; m <= g.d; ++m)
    for (int n = 1; n <= g.d; ++n)
      for (int r = 1; r <= g.d; ++r)
        for (int s = r + 1; s <= g.d; ++s) {
          ScalarExpr v = ScalarExpr::zero(g.d);
          for (int p = 1; p <= g.d; ++p)
            v += g.th(m, p) * g.curvature_tilde.component({n}, {p}, {r, s});
          out.accumulate({m, n}, {}, {r, s}, v);
        }
  return out;
}

namespace detail {

inline void finalize_chart(ChartGeometry& g) {
  if (g.mode == ChartMode::symplectic) {
    auto inv = invert_matrix(g.theta, g.d);
    if (!inv) fail_input("theta is singular; symplectic mode requires an invertible bivector");
    g.omega = std::move(*inv);
  }
  g.torsion = TensorValuedForm(g.d, 1, 0, 2);
  for (int r = 1; r <= g.d; ++r)
    for (int m = 1; m <= g.d; ++m)
      for (int n = m + 1; n <= g.d; ++n) g.torsion.accumulate({r}, {}, {m, n}, g.T(r, m, n));
  g.curvature = compute_curvature(g, ConnectionSelector::primary);
  g.curvature_tilde = compute_curvature(g, ConnectionSelector::tilde);
  if (g.mode == ChartMode::symplectic) g.curvature_raised = raise_curvature(g);
}

} // namespace detail

// Assemble a chart from sparse component lists.  Theta entries may name
// either index order; the antisymmetric mirror is filled in automatically
// and conflicting values are rejected.  Gamma entries are taken verbatim.
inline ChartGeometry load_geometry(
    int d, ChartMode mode, const std::vector<std::tuple<int, int, ScalarExpr>>& theta_components,
    const std::vector<std::tuple<int, int, int, ScalarExpr>>& gamma_components) {
  if (d < 1 || d > kMaxDim) fail_input("dimension out of range");
  ChartGeometry g;
  g.d = d;
  g.mode = mode;
  g.theta.assign(d, std::vector<ScalarExpr>(d, ScalarExpr::zero(d)));
  std::vector<std::vector<char>> seen(d, std::vector<char>(d, 0));
  auto set_theta = [&](int m, int n, const ScalarExpr& v) {
    if (seen[m - 1][n - 1]) {
      if (!g.theta[m - 1][n - 1].equals(v)) fail_input("theta is not antisymmetric");
      return;
    }
    g.theta[m - 1][n - 1] = v;
    seen[m - 1][n - 1] = 1;
  };
  for (const auto& [m, n, v] : theta_components) {
    detail::check_chart_index(m, d);
    detail::check_chart_index(n, d);
    if (v.dim() != d) fail_input("theta component dimension mismatch");
    if (m == n) {
      if (!v.is_zero()) fail_input("theta is not antisymmetric");
      continue;
    }
    set_theta(m, n, v);
    set_theta(n, m, -v);
  }
  g.gamma.assign(d, Matrix(d, std::vector<ScalarExpr>(d, ScalarExpr::zero(d))));
  std::vector<char> gamma_seen(d * d * d, 0);
  for (const auto& [r, m, n, v] : gamma_components) {
    detail::check_chart_index(r, d);
    detail::check_chart_index(m, d);
    detail::check_chart_index(n, d);
    if (v.dim() != d) fail_input("gamma component dimension mismatch");
    int flat = ((r - 1) * d + (m - 1)) * d + (n - 1);
    if (gamma_seen[flat]) fail_input("duplicate gamma component");
    gamma_seen[flat] = 1;
    g.gamma[r - 1][m - 1][n - 1] = v;
  }
  detail::finalize_chart(g);
  return g;
}

// Coefficients of a bivector that is quadratic in the coordinates:
//   theta^{ab} = g^{ab} + f^{ab}_c x^c + (1/2) r^{ab}_{cd} x^c x^d.
// All three families are antisymmetric in the (a,b) pair; entries may name
// either order of that pair and are mirrored automatically.
struct SpecialChartSpec {
  int d = 0;
  std::vector<std::tuple<int, int, Rat>> g;
  std::vector<std::tuple<int, int, int, Rat>> f;
  std::vector<std::tuple<int, int, int, int, Rat>> rtilde;
};

// Build the distinguished chart of an invertible quadratic bivector: omega
// is the exact inverse and the connection is Gamma^a_{bc} = theta^{ad} d_b omega_{dc}.
// This connection annihilates theta along the tilde slots and is flat for
// the primary connection; both facts are checked by the test suites rather
// than assumed here.
inline ChartGeometry build_special_chart(const SpecialChartSpec& spec) {
  int d = spec.d;
  if (d < 1 || d > kMaxDim) fail_input("dimension out of range");
  Matrix theta(d, std::vector<ScalarExpr>(d, ScalarExpr::zero(d)));
  // Antisymmetric completion with conflict detection, shared by the three
  // coefficient families.
  std::vector<std::vector<std::map<std::vector<int>, Rat>>> coef(
      d, std::vector<std::map<std::vector<int>, Rat>>(d));
  // extra[0] tags the family (0 constant, 1 linear, 2 quadratic); the rest
  // are the coordinate indices of the monomial.
  auto set_pair = [&](int a, int b, std::vector<int> extra, const Rat& v) {
    detail::check_chart_index(a, d);
    detail::check_chart_index(b, d);
    for (size_t i = 1; i < extra.size(); ++i) detail::check_chart_index(extra[i], d);
    if (a == b) {
      if (v != 0) fail_input("special chart coefficients must be antisymmetric in the bivector pair");
      return;
    }
    auto put = [&](int x, int y, const Rat& w) {
      auto [it, fresh] = coef[x - 1][y - 1].emplace(extra, w);
      if (!fresh && it->second != w)
        fail_input("special chart coefficients are not antisymmetric in the bivector pair");
    };
    put(a, b, v);
    put(b, a, -v);
  };
  for (const auto& [a, b, v] : spec.g) set_pair(a, b, {0}, v);
  for (const auto& [a, b, c, v] : spec.f) set_pair(a, b, {1, c}, v);
  for (const auto& [a, b, c, e, v] : spec.rtilde) set_pair(a, b, {2, c, e}, v);
  for (int a = 1; a <= d; ++a)
    for (int b = 1; b <= d; ++b)
      for (const auto& [tag, v] : coef[a - 1][b - 1]) {
        ScalarExpr term = ScalarExpr::constant(d, v);
        if (tag[0] == 1) term *= ScalarExpr::variable(d, tag[1]);
        if (tag[0] == 2)
          term = ScalarExpr::constant(d, v / 2) * ScalarExpr::variable(d, tag[1]) *
                 ScalarExpr::variable(d, tag[2]);
        theta[a - 1][b - 1] += term;
      }
  auto inv = detail::invert_matrix(theta, d);
  if (!inv) fail_input("special chart bivector is degenerate");
  const Matrix& omega = *inv;
  ChartGeometry g;
  g.d = d;
  g.mode = ChartMode::symplectic;
  g.theta = theta;
  g.gamma.assign(d, Matrix(d, std::vector<ScalarExpr>(d, ScalarExpr::zero(d))));
  for (int a = 1; a <= d; ++a)
    for (int b = 1; b <= d; ++b)
      for (int c = 1; c <= d; ++c) {
        ScalarExpr v = ScalarExpr::zero(d);
        for (int e = 1; e <= d; ++e) v += theta[a - 1][e - 1] * omega[e - 1][c - 1].derivative(b);
        g.gamma[a - 1][b - 1][c - 1] = v;
      }
  detail::finalize_chart(g);
  return g;
}

} // namespace covstar
