#pragma once

// Miura map from Euclidean to (complex) equicentroaffine geometry.
//
// Curvature level: kappa = khat^2 / 4 + (i/2) khat_s.
// Curve level: with the plane identified with C, z = x + i y and
// w = (-z_s)^{-1/2}, Phi(z) = (w z, w). Then det(Phi, Phi_s) = -w^2 z_s = 1.
// A Euclidean tangent (lambda, mu) corresponds to alpha = lambda + i mu.

#include <cmath>
#include <complex>

#include "kdvcurve/eca_geometry.hpp"
#include "kdvcurve/euclidean_geometry.hpp"
#include "kdvcurve/flow_engine.hpp"
#include "kdvcurve/periodic_calculus.hpp"

namespace kdvcurve::miura {

inline constexpr Complex imag_unit{0.0, 1.0};

/// An equicentroaffine curve in C^2.
struct ComplexEcaCurve {
  ComplexField x;
  ComplexField y;

  const PeriodicGrid& grid() const noexcept { return x.grid(); }
};

struct MiuraBranchReport {
  /// The branch of (-z_s)^{-1/2} returns to minus itself after one period.
  bool antiperiodic = false;
  ComplexField branch_values;
  /// |continued branch at 2 pi - w(0) exp(-(i/2) integral khat)|.
  double jump_defect = 0;
};

struct MiuraCurve {
  ComplexEcaCurve curve;
  MiuraBranchReport branch;
};

inline ComplexField miura_curvature(const RealField& khat) {
  const auto k = complexify(khat);
  return Complex(0.25) * k * k + Complex(0.0, 0.5) * ds(k);
}

inline ComplexField det_defect(const ComplexEcaCurve& gamma) {
  return gamma.x * ds(gamma.y) - gamma.y * ds(gamma.x) - Complex(1.0);
}

/// Complex curvature det(Phi_s, Phi_ss).
inline ComplexField curvature(const ComplexEcaCurve& gamma) {
  const auto dx = derivatives(gamma.x, {1, 2});
  const auto dy = derivatives(gamma.y, {1, 2});
  return dx[0] * dy[1] - dy[0] * dx[1];
}

/// Phi(gamma_hat) on a continuous branch of (-z_s)^{-1/2} that starts from the
/// principal root at s = 0. Consecutive samples take the root closer to the
/// previous one.
inline MiuraCurve miura_curve(const euc::EucCurve& gamma_hat) {
  const auto& g = gamma_hat.grid();
  const auto z = complexify(gamma_hat.x) + imag_unit * complexify(gamma_hat.y);
  const auto zs = ds(z);
  const std::size_t n = g.n_points();
  std::vector<Complex> w(n);
  auto root = [&](std::size_t j) { return 1.0 / std::sqrt(-zs[j]); };
  auto nearest = [](Complex r, Complex prev) { return std::abs(r - prev) <= std::abs(r + prev) ? r : -r; };
  w[0] = root(0);
  for (std::size_t j = 1; j < n; ++j) w[j] = nearest(root(j), w[j - 1]);
  const Complex wrapped = nearest(w[0], w[n - 1]);

  const double turning = integrate(euc::curvature(gamma_hat));
  const bool antiperiodic = std::abs(wrapped + w[0]) < std::abs(wrapped - w[0]);
  const double jump = std::abs(wrapped - w[0] * std::exp(-0.5 * imag_unit * turning));
  ComplexField branch(g, std::move(w));
  ComplexEcaCurve curve{branch * z, branch};
  return {std::move(curve), {antiperiodic, std::move(branch), jump}};
}

/// The two sides of (i D + khat) Omega_hat f = Omega (i D + khat) f, with
/// kappa = miura_curvature(khat). Both use F = D^{-1}(khat f) (mean zero), so
/// the right side is Omega applied to D(i f + F) with antiderivative i f + F.
inline std::pair<ComplexField, ComplexField> intertwine_sides(const RealField& khat, const ComplexField& f,
                                                              double mean_tol = default_mean_tol) {
  const auto k = complexify(khat);
  const auto big_f = ds_inv(k * f, mean_tol);
  const auto hat = euc::omega_hat_exact(k, f, big_f);
  const auto lhs = imag_unit * ds(hat) + k * hat;
  const auto rhs = eca::omega_d(miura_curvature(khat), imag_unit * f + big_f);
  return {lhs, rhs};
}

inline double intertwine_residual(const RealField& khat, const ComplexField& f,
                                  double mean_tol = default_mean_tol) {
  const auto [lhs, rhs] = intertwine_sides(khat, f, mean_tol);
  return max_abs_diff(lhs, rhs);
}

struct PullbackReport {
  double residual = 0;   // |Re H_m(kappa) - H_hat_m(khat)|
  double imaginary = 0;  // |Im H_m(kappa)|
};

inline PullbackReport pullback_hamiltonian(const RealField& khat, int m) {
  const Complex h = eca::hamiltonian(miura_curvature(khat), m);
  return {std::abs(h.real() - euc::hamiltonian_hat(khat, m)), std::abs(h.imag())};
}

inline double pullback_hamiltonian_residual(const RealField& khat, int m) {
  return pullback_hamiltonian(khat, m).residual;
}

/// The equicentroaffine tangent alpha = lambda + i mu of a Euclidean tangent.
inline ComplexField push_tangent(const euc::EucTangent& t) {
  return complexify(t.lambda) + imag_unit * complexify(t.mu);
}

/// omega_k evaluated on pushed-forward tangents at kappa = miura_curvature(khat):
/// integral alpha Omega^k beta_s, the first Omega applied with antiderivative beta.
inline Complex form_pullback(const RealField& khat, const euc::EucTangent& t1, const euc::EucTangent& t2, int k,
                             double mean_tol = default_mean_tol) {
  if (k < 0) throw UnsupportedOrderError(k);
  const auto a = push_tangent(t1);
  const auto b = push_tangent(t2);
  if (k == 0) return integrate(a * ds(b));
  const auto kappa = miura_curvature(khat);
  auto p = eca::omega_d(kappa, b);
  for (int j = 1; j < k; ++j) p = eca::omega_op(kappa, p, mean_tol, j);
  return integrate(a * p);
}

inline double form_pullback_residual(const RealField& khat, const euc::EucTangent& t1, const euc::EucTangent& t2,
                                     int k, double mean_tol = default_mean_tol) {
  return std::abs(form_pullback(khat, t1, t2, k, mean_tol) - euc::omega_hat_k(khat, t1, t2, k, {}, mean_tol));
}

/// max |miura(mKdV_n(t) khat0) - KdV_n(t) miura(khat0)|, each side integrated
/// independently.
inline double flow_conjugacy_residual(const RealField& khat0, int n, double t_final, double dt,
                                      flow::Integrator integrator = flow::Integrator::if_rk4) {
  const auto khat = flow::flow_to(khat0, flow::Model::euclidean, n, t_final, dt, integrator);
  const auto kappa = flow::flow_to(miura_curvature(khat0), flow::Model::eca_complex, n, t_final, dt, integrator);
  return max_abs_diff(miura_curvature(khat), kappa);
}

}  // namespace kdvcurve::miura
