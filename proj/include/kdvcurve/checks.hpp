#pragma once

// Named residuals of the structural identities, evaluated on user fixtures.
// Each residual is divided by its scale, so the tolerance is a plain number.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kdvcurve/eca_geometry.hpp"
#include "kdvcurve/euclidean_geometry.hpp"
#include "kdvcurve/miura.hpp"
#include "kdvcurve/plane.hpp"
#include "kdvcurve/sampling.hpp"

namespace kdvcurve::checks {

struct IdentityCheck {
  std::string name;
  double residual = 0;
  double tolerance = 0;
  bool pass = false;
  std::string error;  // set when evaluating the identity threw
};

struct CheckReport {
  std::vector<IdentityCheck> items;

  bool all_pass() const {
    return std::all_of(items.begin(), items.end(), [](const IdentityCheck& c) { return c.pass; });
  }
  std::vector<std::string> failures() const {
    std::vector<std::string> out;
    for (const auto& c : items)
      if (!c.pass) out.push_back(c.name);
    return out;
  }
};

struct CheckFixture {
  RealField kappa;                       // equicentroaffine curvature
  std::optional<eca::EcaCurve> curve;    // closed curve for group-action identities
  RealField khat;                        // Euclidean curvature
  std::optional<euc::EucCurve> euc_curve;
  std::uint64_t seed = 20240607;
  int random_count = 5;
};

/// Accumulates max residual per identity.
class Recorder {
 public:
  void add(const std::string& name, double residual, double tolerance) {
    for (auto& c : report_.items)
      if (c.name == name) {
        c.residual = std::max(c.residual, residual);
        c.pass = c.residual <= tolerance;
        return;
      }
    report_.items.push_back({name, residual, tolerance, residual <= tolerance, {}});
  }
  /// A throwing identity is recorded as failed with an infinite residual.
  template <class F>
  void run(const std::string& name, double tolerance, F&& f) {
    try {
      f();
    } catch (const std::exception& e) {
      add(name, std::numeric_limits<double>::infinity(), tolerance);
      for (auto& c : report_.items)
        if (c.name == name && c.error.empty()) c.error = e.what();
    }
  }
  CheckReport take() { return std::move(report_); }

 private:
  CheckReport report_;
};

inline double pair_scale(const RealField& a, const RealField& b) { return 1.0 + integrate(abs(a) * abs(b)); }

/// SL(2) element R(a) diag(e^r, e^-r) R(b) with a, b uniform on [0, 2 pi) and r on [-1/2, 1/2).
inline Mat2 random_sl2(std::mt19937_64& rng) {
  const double a = two_pi * unit_draw(rng), b = two_pi * unit_draw(rng), r = unit_draw(rng) - 0.5;
  const Mat2 ra{std::cos(a), -std::sin(a), std::sin(a), std::cos(a)};
  const Mat2 rb{std::cos(b), -std::sin(b), std::sin(b), std::cos(b)};
  return ra * Mat2{std::exp(r), 0.0, 0.0, std::exp(-r)} * rb;
}

inline void calculus_checks(const PeriodicGrid& g, std::mt19937_64& rng, int count, Recorder& rec) {
  for (int i = 0; i < count; ++i) {
    const auto f = random_field(g, rng, static_cast<int>(g.n_points() / 4), 1.0, 0.5);
    const auto h = random_field(g, rng, static_cast<int>(g.n_points() / 4), 1.0, -0.3);
    const double fs = 1.0 + max_abs(f) * max_abs(h);
    rec.add("integration_by_parts", std::abs(integrate(ds(f) * h) + integrate(f * ds(h))) / fs, 1e-11);
    const auto f0 = f - mean(f);
    rec.add("ds_of_ds_inv", max_abs_diff(ds(ds_inv(f0)), f0) / (1.0 + max_abs(f0)), 1e-11);
    const double sigma = two_pi * unit_draw(rng);
    rec.add("shift_commutes_with_ds", max_abs_diff(ds(shift(f, sigma)), shift(ds(f), sigma)) / (1.0 + max_abs(ds(f))),
            1e-11);
  }
}

inline void eca_checks(const RealField& kappa, std::mt19937_64& rng, int count, Recorder& rec) {
  using namespace eca;
  const auto& g = kappa.grid();
  auto random_tangent = [&] { return EcaTangent{random_field(g, rng, 10, 1.0, 0.5)}; };
  auto level = [&](int m) {
    LevelSetSpec l;
    for (int j = 1; j <= m; ++j) l.constants.push_back(hamiltonian(kappa, j));
    return l;
  };
  for (int i = 0; i < count; ++i) {
    rec.run("omega0_pairing", 1e-9, [&] {
      const auto t = random_tangent();
      for (int n = 1; n <= 3; ++n)
        rec.add("omega0_pairing",
                std::abs(differential_h(kappa, n, t) - omega0(xn_field(kappa, n), t)) /
                    (1 + differential_scale(kappa, n, t)),
                1e-9);
    });
    rec.run("omega1_pairing", 1e-9, [&] {
      const auto t = random_tangent();
      for (int n = 1; n <= 2; ++n)
        rec.add("omega1_pairing",
                std::abs(differential_h(kappa, n + 1, t) - omega_k(kappa, xn_field(kappa, n), t, 1)) /
                    (1 + differential_scale(kappa, n + 1, t)),
                1e-9);
    });
    rec.run("omega2_pairing", 1e-9, [&] {
      const auto l = level(1);
      const auto t = project_level_tangent(kappa, random_tangent(), l);
      rec.add("omega2_pairing",
              std::abs(differential_h(kappa, 3, t) - omega_k(kappa, xn_field(kappa, 1), t, 2, l)) /
                  (1 + differential_scale(kappa, 3, t)),
              1e-9);
    });
    rec.run("skew_symmetry", 1e-10, [&] {
      const auto l = level(2);
      const auto t1 = project_level_tangent(kappa, random_tangent(), l);
      const auto t2 = project_level_tangent(kappa, random_tangent(), l);
      for (int k = 0; k <= 3; ++k) {
        const double scale = pair_scale(t1.alpha, omega_power_tangent(kappa, t2.alpha, k).value);
        rec.add("skew_symmetry", std::abs(omega_k(kappa, t1, t2, k, l) + omega_k(kappa, t2, t1, k, l)) / scale,
                1e-10);
      }
    });
    rec.run("level_set_integrals", 1e-9, [&] {
      for (int m = 1; m <= 2; ++m) {
        const auto t = project_level_tangent(kappa, random_tangent(), level(m));
        for (int j = 1; j <= m; ++j) {
          const auto w = omega_power_tangent(kappa, t.alpha, j).value;
          rec.add("level_set_integrals", std::abs(integrate(w)) / (1 + integrate(abs(w))), 1e-9);
        }
      }
    });
    rec.run("lemma_identity", 1e-10, [&] {
      const auto a = project_level_tangent(kappa, random_tangent(), level(1)).alpha;
      const auto b = random_tangent().alpha;
      rec.add("lemma_identity", lemma31_residual(kappa, a, b) / pair_scale(a, omega_d(kappa, b)), 1e-10);
    });
    rec.run("moment_map_mu1", 1e-9, [&] {
      const EcaTangent rep{RealField::constant(g, 1.0)};
      const auto t = random_tangent();
      rec.add("moment_map_mu1",
              std::abs(omega_k(kappa, rep, t, 1) - differential_h(kappa, 1, t)) / (1 + differential_scale(kappa, 1, t)),
              1e-9);
    });
    rec.run("moment_map_mu2", 1e-9, [&] {
      const EcaTangent rep{RealField::constant(g, 1.0)};
      const auto l = level(1);
      const auto t = project_level_tangent(kappa, random_tangent(), l);
      rec.add("moment_map_mu2",
              std::abs(omega_k(kappa, rep, t, 2, l) - differential_h(kappa, 2, t)) /
                  (1 + differential_scale(kappa, 2, t)),
              1e-9);
    });
  }
}

inline void eca_curve_checks(const eca::EcaCurve& gamma, std::mt19937_64& rng, int count, Recorder& rec) {
  using namespace eca;
  rec.add("curve_det_defect", validate(gamma, 1e-8).max_det_defect, 1e-8);
  const auto kappa = curvature(gamma);
  const auto& g = kappa.grid();
  for (int i = 0; i < count; ++i) {
    rec.run("sl2_curvature_invariance", 1e-10, [&] {
      const auto moved = sl2_apply(random_sl2(rng), gamma);
      rec.add("sl2_curvature_invariance", max_abs_diff(curvature(moved), kappa) / (1 + max_abs(kappa)), 1e-10);
    });
    rec.run("sl2_kernel_of_omega1", 1e-9, [&] {
      const EcaTangent t{random_field(g, rng, 8, 1.0, 0.2)};
      const double a = unit_draw(rng) - 0.5, b = unit_draw(rng) - 0.5, c = unit_draw(rng) - 0.5;
      const auto x = sl2_tangent(Mat2{a, b, c, -a}, gamma);
      rec.add("sl2_kernel_of_omega1", std::abs(omega_k(kappa, x, t, 1)) / pair_scale(x.alpha, omega_d(kappa, t.alpha)),
              1e-9);
    });
    rec.run("phi_form_equivalence", 1e-9, [&] {
      const LevelSetSpec l{{hamiltonian(kappa, 1)}};
      const auto t1 = project_level_tangent(kappa, {random_field(g, rng, 8, 1.0, 0.3)}, l);
      const auto t2 = project_level_tangent(kappa, {random_field(g, rng, 8, 1.0, -0.2)}, l);
      const double scale = pair_scale(t1.alpha, omega_power_tangent(kappa, t2.alpha, 2).value);
      rec.add("phi_form_equivalence", std::abs(phi_form(gamma, t1, t2, 1) - omega_k(kappa, t1, t2, 2, l)) / scale,
              1e-9);
    });
  }
}

inline void euc_checks(const RealField& khat, std::mt19937_64& rng, int count, Recorder& rec) {
  using namespace euc;
  const auto& g = khat.grid();
  auto random_tangent = [&] { return tangent_from_mu(khat, random_field(g, rng, 8, 1.0), 2 * unit_draw(rng) - 1); };
  for (int i = 0; i < count; ++i) {
    rec.run("omega_hat_pairing", 1e-9, [&] {
      const auto t = random_tangent();
      const std::pair<int, int> cases[] = {{1, 0}, {2, 0}, {3, 0}, {1, 1}, {2, 1}};
      for (auto [n, k] : cases)
        rec.add("omega_hat_pairing",
                std::abs(omega_hat_k(khat, xhat_field(khat, n), t, k) - differential_hat(khat, n + k, t)) /
                    (1 + differential_hat_scale(khat, n + k, t)),
                1e-9);
    });
    rec.run("omega_hat_skew_symmetry", 1e-10, [&] {
      const LevelSetSpec l{{hamiltonian_hat(khat, 1)}};
      const auto t1 = project_level_tangent_hat(khat, random_tangent(), l);
      const auto t2 = project_level_tangent_hat(khat, random_tangent(), l);
      for (int k = 0; k <= 2; ++k) {
        const double scale =
            pair_scale(khat * t1.lambda + ds(t1.mu), omega_hat_power_tangent(khat, t2, k).value);
        rec.add("omega_hat_skew_symmetry",
                std::abs(omega_hat_k(khat, t1, t2, k, l) + omega_hat_k(khat, t2, t1, k, l)) / scale, 1e-10);
      }
    });
    rec.run("moment_map_mu1_hat", 1e-9, [&] {
      const EucTangent rep{RealField::constant(g, 1.0), RealField::constant(g, 0.0)};
      const auto t = random_tangent();
      rec.add("moment_map_mu1_hat",
              std::abs(omega_hat_k(khat, rep, t, 1) - differential_hat(khat, 1, t)) /
                  (1 + differential_hat_scale(khat, 1, t)),
              1e-9);
    });
  }
}

inline void euc_curve_checks(const euc::EucCurve& gamma, std::mt19937_64& rng, int count, Recorder& rec) {
  using namespace euc;
  rec.add("curve_speed_defect", validate(gamma, 1e-8).max_speed_defect, 1e-8);
  const auto khat = curvature(gamma);
  for (int i = 0; i < count; ++i) {
    rec.run("e2_curvature_invariance", 1e-10, [&] {
      const double a = two_pi * unit_draw(rng);
      const Mat2 r{std::cos(a), -std::sin(a), std::sin(a), std::cos(a)};
      const auto moved = e2_apply(r, 2 * unit_draw(rng) - 1, 2 * unit_draw(rng) - 1, gamma);
      rec.add("e2_curvature_invariance", max_abs_diff(curvature(moved), khat) / (1 + max_abs(khat)), 1e-10);
    });
  }
}

/// f - c with c chosen so that mean(khat f) = 0.
inline ComplexField balance(const RealField& khat, const ComplexField& f) {
  const auto k = complexify(khat);
  return f - mean(k * f) / mean(k);
}

inline void miura_checks(const RealField& khat, std::mt19937_64& rng, int count, Recorder& rec) {
  using namespace miura;
  const auto& g = khat.grid();
  const int modes = static_cast<int>(g.n_points() / 6);
  for (int i = 0; i < count; ++i) {
    rec.run("intertwining", 1e-9, [&] {
      const auto f = balance(khat, random_complex_field(g, rng, modes, 1.0));
      const auto [lhs, rhs] = intertwine_sides(khat, f);
      rec.add("intertwining", max_abs_diff(lhs, rhs) / (1.0 + max_abs(lhs)), 1e-9);
    });
    rec.run("form_pullback", 1e-9, [&] {
      const auto t1 = euc::tangent_from_mu(khat, random_field(g, rng, 16, 0.5), 2 * unit_draw(rng) - 1);
      const auto t2 = euc::tangent_from_mu(khat, random_field(g, rng, 16, 0.5), 2 * unit_draw(rng) - 1);
      for (int k = 0; k <= 1; ++k)
        rec.add("form_pullback",
                form_pullback_residual(khat, t1, t2, k) / (1.0 + std::abs(euc::omega_hat_k(khat, t1, t2, k))), 1e-9);
    });
  }
  for (int m = 1; m <= 3; ++m) {
    rec.run("hamiltonian_pullback", 1e-9, [&] {
      const double scale = 1.0 + integrate(abs(euc::hamiltonian_density_hat(khat, m)));
      const auto r = pullback_hamiltonian(khat, m);
      rec.add("hamiltonian_pullback", std::max(r.residual, r.imaginary) / scale, 1e-9);
    });
  }
}

inline CheckReport run_checks(const CheckFixture& fx) {
  Recorder rec;
  std::mt19937_64 rng(fx.seed);
  calculus_checks(fx.kappa.grid(), rng, fx.random_count, rec);
  eca_checks(fx.kappa, rng, fx.random_count, rec);
  if (fx.curve) eca_curve_checks(*fx.curve, rng, fx.random_count, rec);
  euc_checks(fx.khat, rng, fx.random_count, rec);
  if (fx.euc_curve) euc_curve_checks(*fx.euc_curve, rng, fx.random_count, rec);
  miura_checks(fx.khat, rng, fx.random_count, rec);
  return rec.take();
}

}  // namespace kdvcurve::checks
