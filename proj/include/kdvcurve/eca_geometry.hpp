#pragma once

// Closed equicentroaffine plane curves: det(gamma, gamma_s) = 1, curvature
// gamma_ss = -kappa gamma, the KdV recursion operator
//     Omega = (1/2) D^2 + 2 kappa + kappa_s D^{-1},
// the hierarchy fields X_n, the conserved quantities H_m and the tower of
// presymplectic forms omega_0, omega_1, ..., omega_{m+1}.
//
// A tangent vector is a single function alpha; the vector field along gamma is
// -(1/2) alpha_s gamma + alpha gamma_s and the curvature moves by
//     kappa_t = Omega alpha_s = (1/2) alpha_sss + 2 kappa alpha_s + kappa_s alpha.
// The last form is a differential operator in alpha (omega_d below) and is the
// one used whenever Omega meets the derivative of a known function. Further
// powers of Omega use the mean-zero antiderivative.

#include <array>
#include <cmath>
#include <optional>
#include <vector>

#include "kdvcurve/detail/constraint_projection.hpp"
#include "kdvcurve/periodic_calculus.hpp"
#include "kdvcurve/plane.hpp"

namespace kdvcurve::eca {

struct EcaCurve {
  RealField x;
  RealField y;

  const PeriodicGrid& grid() const noexcept { return x.grid(); }
  PlaneField as_plane() const { return {x, y}; }
};

struct EcaTangent {
  RealField alpha;

  const PeriodicGrid& grid() const noexcept { return alpha.grid(); }
};

struct LevelSetSpec {
  std::vector<double> constants;
  double membership_tol = 1e-9;

  int m() const noexcept { return static_cast<int>(constants.size()); }
};

struct ValidationReport {
  double max_det_defect = 0;
  bool ok = false;
};

// ---------------------------------------------------------------------------
// Curves

inline RealField det_defect(const EcaCurve& gamma) {
  const auto xs = ds(gamma.x);
  const auto ys = ds(gamma.y);
  return det(gamma.x, gamma.y, xs, ys) - 1.0;
}

inline ValidationReport validate(const EcaCurve& gamma, double det_tol = 1e-8) {
  ValidationReport r;
  r.max_det_defect = max_abs(det_defect(gamma));
  bool nonzero = true;
  for (std::size_t j = 0; j < gamma.x.size(); ++j)
    if (gamma.x[j] == 0.0 && gamma.y[j] == 0.0) nonzero = false;
  r.ok = nonzero && r.max_det_defect <= det_tol;
  return r;
}

/// kappa = det(gamma_s, gamma_ss).
inline RealField curvature(const EcaCurve& gamma) {
  const auto dx = derivatives(gamma.x, {1, 2});
  const auto dy = derivatives(gamma.y, {1, 2});
  return det(dx[0], dy[0], dx[1], dy[1]);
}

// ---------------------------------------------------------------------------
// Recursion operator

/// Omega applied to g_s with D^{-1} g_s = g:  (1/2) g_sss + 2 kappa g_s + kappa_s g.
template <PeriodicScalar S>
PeriodicField<S> omega_d(const PeriodicField<S>& kappa, const PeriodicField<S>& g) {
  const auto dg = derivatives(g, {1, 3});
  return S(0.5) * dg[1] + S(2) * kappa * dg[0] + ds(kappa) * g;
}

/// Omega f = (1/2) f_ss + 2 kappa f + kappa_s D^{-1} f with the mean-zero antiderivative.
template <PeriodicScalar S>
PeriodicField<S> omega_op(const PeriodicField<S>& kappa, const PeriodicField<S>& f,
                          double mean_tol = default_mean_tol, int step = -1) {
  return S(0.5) * ds(f, 2) + S(2) * kappa * f + ds(kappa) * ds_inv(f, mean_tol, step);
}

template <PeriodicScalar S>
struct OmegaPower {
  PeriodicField<S> value;
  /// |mean| of the argument of every D^{-1} that was applied, in order.
  std::vector<double> intermediate_means;
};

/// Omega^n f, all antiderivatives mean-zero. A failing mean check reports the
/// index k of the application Omega(Omega^k f).
template <PeriodicScalar S>
OmegaPower<S> omega_power(const PeriodicField<S>& kappa, const PeriodicField<S>& f, int n,
                          double mean_tol = default_mean_tol) {
  OmegaPower<S> out{f, {}};
  for (int k = 0; k < n; ++k) {
    out.intermediate_means.push_back(std::abs(mean(out.value)));
    out.value = omega_op(kappa, out.value, mean_tol, k);
  }
  return out;
}

/// Omega^k alpha_s for a tangent function alpha (k >= 0). The first
/// application is exact; the trail records the means fed to the later ones.
template <PeriodicScalar S>
OmegaPower<S> omega_power_tangent(const PeriodicField<S>& kappa, const PeriodicField<S>& alpha, int k,
                                  double mean_tol = default_mean_tol) {
  if (k == 0) return {ds(alpha), {}};
  OmegaPower<S> out{omega_d(kappa, alpha), {}};
  for (int j = 1; j < k; ++j) {
    out.intermediate_means.push_back(std::abs(mean(out.value)));
    out.value = omega_op(kappa, out.value, mean_tol, j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Conserved quantities

/// Densities h_1 = kappa, h_2 = kappa^2/2, h_3 = kappa^3/2 - kappa_s^2/4.
template <PeriodicScalar S>
PeriodicField<S> hamiltonian_density(const PeriodicField<S>& kappa, int m) {
  switch (m) {
    case 1:
      return kappa;
    case 2:
      return S(0.5) * kappa * kappa;
    case 3: {
      const auto ks = ds(kappa);
      return S(0.5) * pow(kappa, 3) - S(0.25) * ks * ks;
    }
    default:
      throw UnsupportedOrderError(m);
  }
}

template <PeriodicScalar S>
S hamiltonian(const PeriodicField<S>& kappa, int m) {
  return integrate(hamiltonian_density(kappa, m));
}

/// Variational gradient G_m = dH_m/dkappa. G_1..G_3 are the Euler-operator
/// images of h_1..h_3; for m >= 4 the Lenard step G_m = D^{-1} Omega D G_{m-1}
/// with the mean-zero antiderivative. The contract is D G_{m+1} = Omega D G_m.
template <PeriodicScalar S>
PeriodicField<S> gradient(const PeriodicField<S>& kappa, int m, double mean_tol = default_mean_tol) {
  if (m < 1) throw UnsupportedOrderError(m);
  if (m == 1) return PeriodicField<S>::constant(kappa.grid(), S(1));
  if (m == 2) return kappa;
  auto g = S(1.5) * kappa * kappa + S(0.5) * ds(kappa, 2);
  for (int j = 4; j <= m; ++j) g = ds_inv(omega_d(kappa, g), mean_tol, j);
  return g;
}

/// Right-hand side of the n-th KdV equation, kappa_t = Omega^n kappa_s = Omega D G_{n+1}.
template <PeriodicScalar S>
PeriodicField<S> kdv_rhs(const PeriodicField<S>& kappa, int n, double mean_tol = default_mean_tol) {
  if (n < 1) throw UnsupportedOrderError(n);
  return omega_d(kappa, gradient(kappa, n + 1, mean_tol));
}

// ---------------------------------------------------------------------------
// Tangent vectors

inline PlaneField tangent_embed(const EcaCurve& gamma, const EcaTangent& t) {
  const auto as = ds(t.alpha);
  const auto xs = ds(gamma.x);
  const auto ys = ds(gamma.y);
  return {-0.5 * as * gamma.x + t.alpha * xs, -0.5 * as * gamma.y + t.alpha * ys};
}

/// Inverse of tangent_embed: alpha = det(gamma, V) after checking the
/// linearized constraint det(V, gamma_s) + det(gamma, V_s) = 0.
inline EcaTangent tangent_extract(const EcaCurve& gamma, const PlaneField& v, double tol = 1e-8) {
  const auto xs = ds(gamma.x);
  const auto ys = ds(gamma.y);
  const auto vs = ds(v);
  const auto residual = det(v.x, v.y, xs, ys) + det(gamma.x, gamma.y, vs.x, vs.y);
  const double scale =
      1.0 + max_abs(v) * std::max(max_abs(xs), max_abs(ys)) + max_abs(gamma.as_plane()) * max_abs(vs);
  const double r = max_abs(residual);
  if (r > tol * scale) throw NotTangentError(r);
  return {det(gamma.x, gamma.y, v.x, v.y)};
}

/// X_n with alpha = G_{n+1}, so that kappa_t = Omega D alpha is the n-th KdV flow.
inline EcaTangent xn_field(const EcaCurve& gamma, int n, double mean_tol = default_mean_tol) {
  if (n < 1) throw UnsupportedOrderError(n);
  return {gradient(curvature(gamma), n + 1, mean_tol)};
}

/// Same, from the curvature alone.
inline EcaTangent xn_field(const RealField& kappa, int n, double mean_tol = default_mean_tol) {
  if (n < 1) throw UnsupportedOrderError(n);
  return {gradient(kappa, n + 1, mean_tol)};
}

// ---------------------------------------------------------------------------
// Differentials and forms

/// dH_m(X) = integral of G_m * Omega alpha_s.
inline double differential_h(const RealField& kappa, int m, const EcaTangent& t,
                             double mean_tol = default_mean_tol) {
  return integrate(gradient(kappa, m, mean_tol) * omega_d(kappa, t.alpha));
}

/// Magnitude against which dH_m(X) is judged zero.
inline double differential_scale(const RealField& kappa, int m, const EcaTangent& t,
                                 double mean_tol = default_mean_tol) {
  return integrate(abs(gradient(kappa, m, mean_tol)) * abs(omega_d(kappa, t.alpha)));
}

inline double omega0(const EcaTangent& t1, const EcaTangent& t2) {
  return integrate(t1.alpha * ds(t2.alpha));
}

/// Throws NotLevelTangentError unless dH_j(t) vanishes for j = 1..orders.
inline void require_level_tangent(const RealField& kappa, const EcaTangent& t, int orders, double tol,
                                  double mean_tol = default_mean_tol) {
  for (int j = 1; j <= orders; ++j) {
    const double v = differential_h(kappa, j, t, mean_tol);
    if (std::abs(v) > tol * (1.0 + differential_scale(kappa, j, t, mean_tol))) throw NotLevelTangentError(j, v);
  }
}

/// omega_k(X, Y) = integral of alpha * Omega^k beta_s. For k >= 2 the second
/// argument must lie in T M(C_{k-1}).
inline double omega_k(const RealField& kappa, const EcaTangent& t1, const EcaTangent& t2, int k,
                      const LevelSetSpec& level = {}, double mean_tol = default_mean_tol) {
  if (k < 0) throw UnsupportedOrderError(k);
  if (k >= 2) require_level_tangent(kappa, t2, k - 1, level.membership_tol, mean_tol);
  return integrate(t1.alpha * omega_power_tangent(kappa, t2.alpha, k, mean_tol).value);
}

/// |integral (D^{-1} Omega D alpha) beta_s - integral alpha Omega beta_s|.
inline double lemma31_residual(const RealField& kappa, const RealField& alpha, const RealField& beta,
                               double mean_tol = default_mean_tol) {
  const double lhs = integrate(ds_inv(omega_d(kappa, alpha), mean_tol) * ds(beta));
  const double rhs = integrate(alpha * omega_d(kappa, beta));
  return std::abs(lhs - rhs);
}

/// {F, G}_k = integral gf * Omega^k D gg for variational gradients gf, gg.
inline double bracket_k(const RealField& kappa, const RealField& gf, const RealField& gg, int k,
                        double mean_tol = default_mean_tol) {
  if (k < 0) throw UnsupportedOrderError(k);
  return integrate(gf * omega_power_tangent(kappa, gg, k, mean_tol).value);
}

// ---------------------------------------------------------------------------
// Level sets

/// |H_j(kappa) - c_j| for each prescribed constant (j <= 3).
inline std::vector<double> level_membership(const RealField& kappa, const LevelSetSpec& level) {
  std::vector<double> out;
  for (int j = 1; j <= level.m(); ++j)
    out.push_back(std::abs(hamiltonian(kappa, j) - level.constants[static_cast<std::size_t>(j - 1)]));
  return out;
}

/// Removes from alpha the combination of low Fourier modes that violates
/// dH_j(alpha) = 0, j = 1..m (minimum-norm correction).
inline EcaTangent project_level_tangent(const RealField& kappa, const EcaTangent& t, const LevelSetSpec& level,
                                        double mean_tol = default_mean_tol) {
  const int m = level.m();
  if (m == 0) return t;
  const auto& grid = kappa.grid();
  auto make_basis = [&grid](int modes) {
    std::vector<EcaTangent> basis;
    for (int i = 1; i <= modes; ++i) {
      basis.push_back({RealField::sample(grid, [i](double s) { return std::cos(i * s); })});
      basis.push_back({RealField::sample(grid, [i](double s) { return std::sin(i * s); })});
    }
    return basis;
  };
  return detail::project_constraints_adaptive(
      t, make_basis, m, static_cast<int>(grid.n_points() / 4), level.membership_tol,
      [&](int j, const EcaTangent& a) { return differential_h(kappa, j, a, mean_tol); },
      [&](int j, const EcaTangent& a) { return differential_scale(kappa, j, a, mean_tol); },
      [](const EcaTangent& a, double c, const EcaTangent& b) { return EcaTangent{a.alpha + c * b.alpha}; });
}

// ---------------------------------------------------------------------------
// Group actions

inline EcaCurve sl2_apply(const Mat2& a, const EcaCurve& gamma) {
  if (std::abs(a.det() - 1.0) > 1e-12) throw NotUnimodularError(a.det());
  return {a.a * gamma.x + a.b * gamma.y, a.c * gamma.x + a.d * gamma.y};
}

/// Fundamental field of a trace-free generator: alpha = det(gamma, A gamma).
inline EcaTangent sl2_tangent(const Mat2& a, const EcaCurve& gamma) {
  if (std::abs(a.trace()) > 1e-12) throw NotTraceFreeError(a.trace());
  const auto ax = a.a * gamma.x + a.b * gamma.y;
  const auto ay = a.c * gamma.x + a.d * gamma.y;
  return {det(gamma.x, gamma.y, ax, ay)};
}

/// The S^1 action gamma -> gamma(. + sigma).
inline EcaCurve s1_apply(double sigma, const EcaCurve& gamma) {
  return {shift(gamma.x, sigma), shift(gamma.y, sigma)};
}

// ---------------------------------------------------------------------------
// Formulation through phi X = -alpha_s gamma

/// integral det(X, (D^2 + kappa) [phi^{-1} (D^2 + kappa)]^m Y) for m >= 0, and
/// integral det(X, phi Y) for m = -1. Computed entirely with vector fields
/// along the curve; for m >= 1 both tangents must lie in T M(C_m).
inline double phi_form(const EcaCurve& gamma, const EcaTangent& t1, const EcaTangent& t2, int m,
                       double mean_tol = default_mean_tol) {
  if (m < -1) throw UnsupportedOrderError(m);
  const auto g = gamma.as_plane();
  const auto x = tangent_embed(gamma, t1);
  if (m == -1) {
    const auto phi_y = -1.0 * ds(t2.alpha) * g;
    return integrate(det(x, phi_y));
  }
  const auto kappa = curvature(gamma);
  const auto gs = ds(g);
  auto hill = [&](const PlaneField& v) { return ds(v, 2) + kappa * v; };
  PlaneField v = tangent_embed(gamma, t2);
  for (int i = 0; i < m; ++i) {
    const auto w = hill(v);
    // w = a gamma + 0 * gamma_s; a = det(w, gamma_s).
    const auto a = det(w, gs);
    const auto alpha = ds_inv(-1.0 * a, mean_tol, i);
    v = tangent_embed(gamma, {alpha});
  }
  return integrate(det(x, hill(v)));
}

// ---------------------------------------------------------------------------
// Hill's equation y'' = -kappa y

struct HillSolution {
  RealField y1, y2;    // y1(0)=1, y1'(0)=0; y2(0)=0, y2'(0)=1
  RealField dy1, dy2;  // their derivatives at the nodes
  Mat2 monodromy;      // [[y1, y2], [y1', y2']] at the end of the interval
};

namespace detail {

// Classical RK4 on the first-order system over `cells` grid cells with
// `substeps` steps per cell; kappa is sampled mid-step by trigonometric
// interpolation (shifted copies of the field).
inline HillSolution hill_integrate(const RealField& kappa, int substeps, std::size_t cells) {
  if (substeps < 1) throw std::invalid_argument("substeps must be positive");
  const auto& grid = kappa.grid();
  const auto n = grid.n_points();
  const double h = grid.spacing() / substeps;
  std::vector<RealField> offsets;
  offsets.reserve(static_cast<std::size_t>(2 * substeps));
  for (int m = 0; m < 2 * substeps; ++m) offsets.push_back(shift(kappa, m * 0.5 * h));

  std::array<double, 4> u{1.0, 0.0, 0.0, 1.0};  // y1, y1', y2, y2'
  std::vector<double> y1(n, 0.0), y2(n, 0.0), d1(n, 0.0), d2(n, 0.0);
  auto f = [](double k, const std::array<double, 4>& v) {
    return std::array<double, 4>{v[1], -k * v[0], v[3], -k * v[2]};
  };
  auto axpy = [](const std::array<double, 4>& v, double c, const std::array<double, 4>& w) {
    return std::array<double, 4>{v[0] + c * w[0], v[1] + c * w[1], v[2] + c * w[2], v[3] + c * w[3]};
  };
  for (std::size_t j = 0; j < cells; ++j) {
    if (j < n) {
      y1[j] = u[0];
      d1[j] = u[1];
      y2[j] = u[2];
      d2[j] = u[3];
    }
    for (int i = 0; i < substeps; ++i) {
      const double ka = offsets[static_cast<std::size_t>(2 * i)][j % n];
      const double kb = offsets[static_cast<std::size_t>(2 * i + 1)][j % n];
      const double kc = (2 * i + 2 == 2 * substeps) ? kappa[(j + 1) % n] : offsets[static_cast<std::size_t>(2 * i + 2)][j % n];
      const auto s1 = f(ka, u);
      const auto s2 = f(kb, axpy(u, 0.5 * h, s1));
      const auto s3 = f(kb, axpy(u, 0.5 * h, s2));
      const auto s4 = f(kc, axpy(u, h, s3));
      for (int c = 0; c < 4; ++c) u[c] += h / 6.0 * (s1[c] + 2.0 * s2[c] + 2.0 * s3[c] + s4[c]);
    }
  }
  return {RealField(grid, std::move(y1)), RealField(grid, std::move(y2)), RealField(grid, std::move(d1)),
          RealField(grid, std::move(d2)), Mat2{u[0], u[2], u[1], u[3]}};
}

}  // namespace detail

/// Fundamental solutions over one period and the monodromy matrix.
inline HillSolution hill_solve(const RealField& kappa, int substeps = 16) {
  return detail::hill_integrate(kappa, substeps, kappa.grid().n_points());
}

/// Closed curve with curvature kappa: gamma = (y1, y2), whose Wronskian is 1.
/// Throws NotClosedError with the monodromy when it is not the identity.
inline EcaCurve from_curvature(const RealField& kappa, double closure_tol = 1e-8, int substeps = 16) {
  auto sol = hill_solve(kappa, substeps);
  Mat2 d = sol.monodromy;
  d.a -= 1.0;
  d.d -= 1.0;
  if (max_abs_entry(d) > closure_tol) {
    const auto& m = sol.monodromy;
    throw NotClosedError(std::array<double, 4>{m.a, m.b, m.c, m.d});
  }
  return {std::move(sol.y1), std::move(sol.y2)};
}

/// Constant c such that c + shape is the curvature of a closed curve, for a
/// shape of period 2 pi / symmetry (symmetry >= 3, dividing the grid size).
/// The period map over 2 pi / symmetry is then an elliptic element of order
/// `symmetry`, so the full monodromy is the identity.
inline double closing_shift(const RealField& shape, int symmetry, double guess = 1.0, int substeps = 16) {
  const auto n = shape.grid().n_points();
  if (symmetry < 3 || n % static_cast<std::size_t>(symmetry) != 0)
    throw std::invalid_argument("symmetry must be >= 3 and divide the grid size");
  const double target = 2.0 * std::cos(two_pi / symmetry);
  const std::size_t cells = n / static_cast<std::size_t>(symmetry);
  auto g = [&](double c) { return detail::hill_integrate(shape + c, substeps, cells).monodromy.trace() - target; };
  double c0 = guess, c1 = guess + 1e-3;
  double g0 = g(c0), g1 = g(c1);
  for (int it = 0; it < 60 && std::abs(g1) > 1e-15; ++it) {
    if (g1 == g0) break;
    const double c2 = c1 - g1 * (c1 - c0) / (g1 - g0);
    c0 = c1;
    g0 = g1;
    c1 = c2;
    g1 = g(c1);
  }
  return c1;
}

}  // namespace kdvcurve::eca
