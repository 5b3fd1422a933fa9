#pragma once

// Closed unit-speed Euclidean plane curves, curvature T_s = khat N, the mKdV
// recursion operator
//     Omega_hat = (1/2)(D^2 + khat^2 + khat_s D^{-1} khat),
// the fields X_hat_n, the conserved quantities H_hat_m and the forms
// omega_hat_k.
//
// A tangent vector is lambda T + mu N with lambda_s = khat mu. The curvature
// then moves by
//     khat_t = mu_ss + khat^2 mu + khat_s lambda = 2 Omega_hat mu,
// where the antiderivative inside Omega_hat is lambda itself (omega_hat_exact).

#include <cmath>
#include <numbers>
#include <utility>
#include <vector>

#include "kdvcurve/detail/constraint_projection.hpp"
#include "kdvcurve/eca_geometry.hpp"
#include "kdvcurve/periodic_calculus.hpp"
#include "kdvcurve/plane.hpp"

namespace kdvcurve::euc {

using eca::LevelSetSpec;

struct EucCurve {
  RealField x;
  RealField y;

  const PeriodicGrid& grid() const noexcept { return x.grid(); }
  PlaneField as_plane() const { return {x, y}; }
};

struct EucTangent {
  RealField lambda;
  RealField mu;

  const PeriodicGrid& grid() const noexcept { return mu.grid(); }
};

struct ValidationReport {
  double max_speed_defect = 0;
  bool ok = false;
};

// ---------------------------------------------------------------------------
// Curves

inline RealField speed_defect(const EucCurve& gamma) {
  const auto xs = ds(gamma.x);
  const auto ys = ds(gamma.y);
  return xs * xs + ys * ys - 1.0;
}

inline ValidationReport validate(const EucCurve& gamma, double speed_tol = 1e-8) {
  ValidationReport r;
  r.max_speed_defect = max_abs(speed_defect(gamma));
  r.ok = r.max_speed_defect <= speed_tol;
  return r;
}

/// khat = det(T, T_s) with T = gamma_s.
inline RealField curvature(const EucCurve& gamma) {
  const auto dx = derivatives(gamma.x, {1, 2});
  const auto dy = derivatives(gamma.y, {1, 2});
  return det(dx[0], dy[0], dx[1], dy[1]);
}

/// Unit tangent and left normal.
inline std::pair<PlaneField, PlaneField> frame(const EucCurve& gamma) {
  PlaneField t{ds(gamma.x), ds(gamma.y)};
  PlaneField n{-1.0 * t.y, t.x};
  return {std::move(t), std::move(n)};
}

// ---------------------------------------------------------------------------
// Recursion operator

/// Omega_hat f with the mean-zero antiderivative of khat f.
template <PeriodicScalar S>
PeriodicField<S> omega_hat_op(const PeriodicField<S>& khat, const PeriodicField<S>& f,
                              double mean_tol = default_mean_tol, int step = -1) {
  return S(0.5) * (ds(f, 2) + khat * khat * f + ds(khat) * ds_inv(khat * f, mean_tol, step));
}

/// Omega_hat mu where lambda is the chosen antiderivative of khat mu.
template <PeriodicScalar S>
PeriodicField<S> omega_hat_exact(const PeriodicField<S>& khat, const PeriodicField<S>& mu,
                                 const PeriodicField<S>& lambda) {
  return S(0.5) * (ds(mu, 2) + khat * khat * mu + ds(khat) * lambda);
}

/// Rate of change of the curvature along the tangent (lambda, mu).
template <PeriodicScalar S>
PeriodicField<S> curvature_velocity(const PeriodicField<S>& khat, const PeriodicField<S>& mu,
                                    const PeriodicField<S>& lambda) {
  return S(2) * omega_hat_exact(khat, mu, lambda);
}

inline RealField curvature_velocity(const RealField& khat, const EucTangent& t) {
  return curvature_velocity(khat, t.mu, t.lambda);
}

/// Omega_hat^k mu for a tangent (k >= 0); the first application uses lambda.
inline eca::OmegaPower<double> omega_hat_power_tangent(const RealField& khat, const EucTangent& t, int k,
                                                        double mean_tol = default_mean_tol) {
  if (k == 0) return {t.mu, {}};
  eca::OmegaPower<double> out{omega_hat_exact(khat, t.mu, t.lambda), {}};
  for (int j = 1; j < k; ++j) {
    out.intermediate_means.push_back(std::abs(mean(khat * out.value)));
    out.value = omega_hat_op(khat, out.value, mean_tol, j);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Hierarchy

/// (mu_n, lambda_n) of X_hat_n: mu_n = (1/2) Omega_hat^{n-1} khat_s and
/// lambda_n an antiderivative of khat mu_n. lambda_1 = khat^2/4 and
/// lambda_2 = 3 khat^4/32 - khat_s^2/8 + khat khat_ss/4; mean-zero beyond.
template <PeriodicScalar S>
std::pair<PeriodicField<S>, PeriodicField<S>> hierarchy(const PeriodicField<S>& khat, int n,
                                                        double mean_tol = default_mean_tol) {
  if (n < 1) throw UnsupportedOrderError(n);
  const auto d = derivatives(khat, {1, 2});
  const auto k2 = khat * khat;
  PeriodicField<S> mu = S(0.5) * d[0];
  PeriodicField<S> lambda = S(0.25) * k2;
  for (int j = 2; j <= n; ++j) {
    mu = omega_hat_exact(khat, mu, lambda);
    if (j == 2)
      lambda = S(3.0 / 32.0) * k2 * k2 - S(0.125) * d[0] * d[0] + S(0.25) * khat * d[1];
    else
      lambda = ds_inv(khat * mu, mean_tol, j);
  }
  return {std::move(mu), std::move(lambda)};
}

/// Right-hand side of the n-th mKdV equation, khat_t = Omega_hat^n khat_s.
template <PeriodicScalar S>
PeriodicField<S> mkdv_rhs(const PeriodicField<S>& khat, int n, double mean_tol = default_mean_tol) {
  const auto [mu, lambda] = hierarchy(khat, n, mean_tol);
  return curvature_velocity(khat, mu, lambda);
}

inline EucTangent xhat_field(const RealField& khat, int n, double mean_tol = default_mean_tol) {
  auto [mu, lambda] = hierarchy(khat, n, mean_tol);
  return {std::move(lambda), std::move(mu)};
}

inline EucTangent xhat_field(const EucCurve& gamma, int n, double mean_tol = default_mean_tol) {
  return xhat_field(curvature(gamma), n, mean_tol);
}

// ---------------------------------------------------------------------------
// Conserved quantities

/// h_1 = khat^2/4, h_2 = khat^4/32 - khat_s^2/8,
/// h_3 = khat^6/128 - 5 khat^2 khat_s^2/32 + khat_ss^2/16.
template <PeriodicScalar S>
PeriodicField<S> hamiltonian_density_hat(const PeriodicField<S>& khat, int m) {
  switch (m) {
    case 1:
      return S(0.25) * khat * khat;
    case 2: {
      const auto ks = ds(khat);
      return S(1.0 / 32.0) * pow(khat, 4) - S(0.125) * ks * ks;
    }
    case 3: {
      const auto d = derivatives(khat, {1, 2});
      const auto k2 = khat * khat;
      return S(1.0 / 128.0) * pow(khat, 6) - S(5.0 / 32.0) * k2 * d[0] * d[0] + S(1.0 / 16.0) * d[1] * d[1];
    }
    default:
      throw UnsupportedOrderError(m);
  }
}

template <PeriodicScalar S>
S hamiltonian_hat(const PeriodicField<S>& khat, int m) {
  return integrate(hamiltonian_density_hat(khat, m));
}

/// Variational gradient of H_hat_m (m <= 3).
template <PeriodicScalar S>
PeriodicField<S> gradient_hat(const PeriodicField<S>& khat, int m) {
  switch (m) {
    case 1:
      return S(0.5) * khat;
    case 2:
      return S(0.125) * pow(khat, 3) + S(0.25) * ds(khat, 2);
    case 3: {
      const auto d = derivatives(khat, {1, 2, 4});
      const auto k2 = khat * khat;
      return S(3.0 / 64.0) * pow(khat, 5) + S(5.0 / 16.0) * khat * d[0] * d[0] + S(5.0 / 16.0) * k2 * d[1] +
             S(0.125) * d[2];
    }
    default:
      throw UnsupportedOrderError(m);
  }
}

/// dH_hat_m(X) = integral of G_hat_m khat_t.
inline double differential_hat(const RealField& khat, int m, const EucTangent& t) {
  return integrate(gradient_hat(khat, m) * curvature_velocity(khat, t));
}

inline double differential_hat_scale(const RealField& khat, int m, const EucTangent& t) {
  return integrate(abs(gradient_hat(khat, m)) * abs(curvature_velocity(khat, t)));
}

// ---------------------------------------------------------------------------
// Tangent vectors

/// Max |lambda_s - khat mu|.
inline double tangency_residual(const RealField& khat, const EucTangent& t) {
  return max_abs(ds(t.lambda) - khat * t.mu);
}

/// Tangent from a normal component. mu is first corrected along khat so that
/// khat mu has mean zero; lambda is the antiderivative plus `lambda_const`.
inline EucTangent tangent_from_mu(const RealField& khat, const RealField& mu, double lambda_const = 0.0) {
  RealField m = mu;
  const double k2 = mean(khat * khat);
  if (k2 > 0) m = m - (mean(khat * mu) / k2) * khat;
  return {ds_inv(khat * m, 1e-9) + lambda_const, std::move(m)};
}

inline PlaneField tangent_embed(const EucCurve& gamma, const EucTangent& t) {
  const auto [tt, nn] = frame(gamma);
  return t.lambda * tt + t.mu * nn;
}

/// lambda = <V, T>, mu = <V, N>; V must satisfy the linearized speed constraint <V_s, T> = 0.
inline EucTangent tangent_extract(const EucCurve& gamma, const PlaneField& v, double tol = 1e-8) {
  const auto [tt, nn] = frame(gamma);
  const auto vs = ds(v);
  const double r = max_abs(vs.x * tt.x + vs.y * tt.y);
  if (r > tol * (1.0 + max_abs(vs))) throw NotTangentError(r);
  return {v.x * tt.x + v.y * tt.y, v.x * nn.x + v.y * nn.y};
}

// ---------------------------------------------------------------------------
// Forms

inline void require_level_tangent_hat(const RealField& khat, const EucTangent& t, int orders, double tol) {
  for (int j = 1; j <= orders; ++j) {
    const double v = differential_hat(khat, j, t);
    if (std::abs(v) > tol * (1.0 + differential_hat_scale(khat, j, t))) throw NotLevelTangentError(j, v);
  }
}

/// omega_hat_k(X, Y) = integral (khat lambda + mu_s) Omega_hat^k mu_tilde.
/// For k >= 2 the second argument must lie in the level set of H_hat_1..H_hat_{k-1}.
inline double omega_hat_k(const RealField& khat, const EucTangent& t1, const EucTangent& t2, int k,
                          const LevelSetSpec& level = {}, double mean_tol = default_mean_tol) {
  if (k < 0) throw UnsupportedOrderError(k);
  if (k >= 2) require_level_tangent_hat(khat, t2, k - 1, level.membership_tol);
  const auto left = khat * t1.lambda + ds(t1.mu);
  return integrate(left * omega_hat_power_tangent(khat, t2, k, mean_tol).value);
}

inline std::vector<double> level_membership_hat(const RealField& khat, const LevelSetSpec& level) {
  std::vector<double> out;
  for (int j = 1; j <= level.m(); ++j)
    out.push_back(std::abs(hamiltonian_hat(khat, j) - level.constants[static_cast<std::size_t>(j - 1)]));
  return out;
}

/// Corrects t by low-mode tangents so that dH_hat_j(t) = 0 for j = 1..m.
inline EucTangent project_level_tangent_hat(const RealField& khat, const EucTangent& t, const LevelSetSpec& level) {
  const int m = level.m();
  if (m == 0) return t;
  const auto& grid = khat.grid();
  auto make_basis = [&](int modes) {
    std::vector<EucTangent> basis;
    for (int i = 1; i <= modes; ++i) {
      basis.push_back(tangent_from_mu(khat, RealField::sample(grid, [i](double s) { return std::cos(i * s); })));
      basis.push_back(tangent_from_mu(khat, RealField::sample(grid, [i](double s) { return std::sin(i * s); })));
    }
    return basis;
  };
  return detail::project_constraints_adaptive(
      t, make_basis, m, static_cast<int>(grid.n_points() / 4), level.membership_tol,
      [&](int j, const EucTangent& a) { return differential_hat(khat, j, a); },
      [&](int j, const EucTangent& a) { return differential_hat_scale(khat, j, a); },
      [](const EucTangent& a, double c, const EucTangent& b) {
        return EucTangent{a.lambda + c * b.lambda, a.mu + c * b.mu};
      });
}

/// Central difference of H_hat_m along gamma + h V, V = lambda T + mu N. The
/// deformed curve is not reparametrized: tangency makes its speed 1 + O(h^2),
/// which cancels in the symmetric quotient.
inline double differential_hat_fd(const EucCurve& gamma, int m, const EucTangent& t, double h = 1e-5) {
  const auto v = tangent_embed(gamma, t);
  auto value = [&](double eps) {
    const PlaneField c{gamma.x + eps * v.x, gamma.y + eps * v.y};
    const auto d1 = ds(c);
    const auto d2 = ds(c, 2);
    const auto speed2 = d1.x * d1.x + d1.y * d1.y;
    const auto k = det(d1, d2) * speed2.map([](double q) { return std::pow(q, -1.5); });
    return hamiltonian_hat(k, m);
  };
  return (value(h) - value(-h)) / (2.0 * h);
}

// ---------------------------------------------------------------------------
// Reconstruction and group actions

/// Integrates the turning angle. The mean of khat must be an integer (the
/// rotation index) and the tangent indicatrix must close.
inline EucCurve from_curvature(const RealField& khat, double closure_tol = 1e-8) {
  const auto& grid = khat.grid();
  const double rot = mean(khat);
  const double index = std::round(rot);
  const double rotation_defect = std::abs(rot - index);
  const auto theta_periodic = ds_inv(khat - rot, 1.0);
  RealField theta(grid, [&] {
    std::vector<double> v(grid.n_points());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = theta_periodic[j] + index * grid.node(j);
    return v;
  }());
  const auto c = theta.map([](double a) { return std::cos(a); });
  const auto s = theta.map([](double a) { return std::sin(a); });
  const double closure = std::hypot(integrate(c), integrate(s));
  if (rotation_defect > closure_tol || closure > closure_tol) throw NotClosedError(closure, rotation_defect);
  return {ds_inv(c - mean(c), 1.0), ds_inv(s - mean(s), 1.0)};
}

/// gamma -> R gamma + v for orthogonal R.
inline EucCurve e2_apply(const Mat2& r, double vx, double vy, const EucCurve& gamma) {
  const Mat2 rtr{r.a * r.a + r.c * r.c, r.a * r.b + r.c * r.d, r.b * r.a + r.d * r.c, r.b * r.b + r.d * r.d};
  const double defect = max_abs_entry(Mat2{rtr.a - 1.0, rtr.b, rtr.c, rtr.d - 1.0});
  if (defect > 1e-12) throw NotOrthogonalError(defect);
  return {r.a * gamma.x + r.b * gamma.y + vx, r.c * gamma.x + r.d * gamma.y + vy};
}

inline EucCurve s1_apply(double sigma, const EucCurve& gamma) {
  return {shift(gamma.x, sigma), shift(gamma.y, sigma)};
}

}  // namespace kdvcurve::euc
