#pragma once

// Time integration of the KdV and mKdV hierarchies, at curvature level
// (kappa_t = Omega^n kappa_s) and at curve level (gamma_t = X_n).
//
// Steppers: classical RK4, and an integrating-factor (Lawson) RK4 that treats
// the linearization about the spatial mean exactly in Fourier space. The
// linear symbol is measured from the right-hand side itself, so both
// hierarchies and every n share one code path.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <random>
#include <limits>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "kdvcurve/eca_geometry.hpp"
#include "kdvcurve/euclidean_geometry.hpp"
#include "kdvcurve/periodic_calculus.hpp"

namespace kdvcurve::flow {

enum class Model { eca, euclidean, eca_complex };
enum class Representation { curvature, curve };
enum class Integrator { rk4, if_rk4 };

/// Largest |lambda| dt inside the RK4 stability region along the imaginary axis.
inline constexpr double rk4_imaginary_limit = 2.8284271247461903;
inline constexpr double blowup_threshold = 1e8;
inline constexpr double constraint_limit = 1e-5;
inline constexpr int lawson_probe_steps = 200;
inline constexpr double lawson_probe_growth = 10.0;

struct FlowSpec {
  Model model = Model::eca;
  Representation representation = Representation::curvature;
  int hierarchy_n = 1;
  double t_final = 1.0;
  double dt = 1e-5;
  /// Steps between snapshots; 0 keeps at most 1001 snapshots.
  int record_every = 0;
  double stability_safety = 0.9;
  Integrator integrator = Integrator::rk4;
  bool dealias = false;
  double mean_tol = default_mean_tol;
};

using FlowState = std::variant<RealField, ComplexField, eca::EcaCurve, euc::EucCurve>;

struct InvariantSample {
  double t = 0;
  std::array<double, 3> h{};  // real parts of H_1..H_3 (or H_hat_1..H_hat_3)
  double defect = 0;          // det(gamma, gamma_s) - 1 or |gamma_s|^2 - 1, curve mode only
};

struct InvariantReport {
  std::array<std::string, 3> names{};
  std::string defect_name;
  std::array<Complex, 3> initial{};
  std::array<double, 3> max_abs_drift{};
  std::array<double, 3> max_rel_drift{};
  double max_defect = 0;
  std::vector<InvariantSample> series;
};

struct TrajectoryRecord {
  std::vector<double> times;
  std::vector<FlowState> states;
  InvariantReport invariants;
  double dt_used = 0;
  std::size_t steps = 0;
  double stability_bound = 0;
};

inline const char* to_string(Model m) {
  switch (m) {
    case Model::eca:
      return "eca";
    case Model::euclidean:
      return "euclidean";
    case Model::eca_complex:
      return "eca_complex";
  }
  return "?";
}
inline const char* to_string(Representation r) { return r == Representation::curve ? "curve" : "curvature"; }
inline const char* to_string(Integrator i) { return i == Integrator::if_rk4 ? "if_rk4" : "rk4"; }

// ---------------------------------------------------------------------------
// Right-hand sides

template <PeriodicScalar S>
PeriodicField<S> curvature_rhs(Model model, const PeriodicField<S>& k, int n, double mean_tol = default_mean_tol) {
  if (model == Model::euclidean) return euc::mkdv_rhs(k, n, mean_tol);
  return eca::kdv_rhs(k, n, mean_tol);
}

inline eca::EcaCurve curve_rhs(const eca::EcaCurve& gamma, int n, double mean_tol = default_mean_tol,
                               double time = 0.0) {
  const double defect = max_abs(eca::det_defect(gamma));
  if (defect > constraint_limit) throw ConstraintDriftError(defect, time);
  const auto v = eca::tangent_embed(gamma, eca::xn_field(gamma, n, mean_tol));
  return {v.x, v.y};
}

inline euc::EucCurve curve_rhs(const euc::EucCurve& gamma, int n, double mean_tol = default_mean_tol,
                               double time = 0.0) {
  const double defect = max_abs(euc::speed_defect(gamma));
  if (defect > constraint_limit) throw ConstraintDriftError(defect, time);
  const auto v = euc::tangent_embed(gamma, euc::xhat_field(gamma, n, mean_tol));
  return {v.x, v.y};
}

namespace detail {

inline void check_state(const FlowSpec& spec, const FlowState& state) {
  const bool curve = spec.representation == Representation::curve;
  bool ok = false;
  switch (spec.model) {
    case Model::eca:
      ok = curve ? std::holds_alternative<eca::EcaCurve>(state) : std::holds_alternative<RealField>(state);
      break;
    case Model::euclidean:
      ok = curve ? std::holds_alternative<euc::EucCurve>(state) : std::holds_alternative<RealField>(state);
      break;
    case Model::eca_complex:
      ok = !curve && std::holds_alternative<ComplexField>(state);
      break;
  }
  if (!ok) throw std::invalid_argument("state does not match the flow model/representation");
  if (spec.hierarchy_n < 1) throw UnsupportedOrderError(spec.hierarchy_n);
}

}  // namespace detail

/// Time derivative of the state under the n-th flow.
inline FlowState rhs(const FlowState& state, const FlowSpec& spec) {
  detail::check_state(spec, state);
  const int n = spec.hierarchy_n;
  if (const auto* k = std::get_if<RealField>(&state)) return curvature_rhs(spec.model, *k, n, spec.mean_tol);
  if (const auto* k = std::get_if<ComplexField>(&state)) return curvature_rhs(spec.model, *k, n, spec.mean_tol);
  if (const auto* g = std::get_if<eca::EcaCurve>(&state)) return curve_rhs(*g, n, spec.mean_tol);
  return curve_rhs(std::get<euc::EucCurve>(state), n, spec.mean_tol);
}

// ---------------------------------------------------------------------------
// Linear analysis

namespace detail {

using ComplexRhs = std::function<ComplexField(const ComplexField&)>;

inline ComplexField fourier_mode(const PeriodicGrid& g, long k) {
  return ComplexField::sample(g, [k](double s) { return std::polar(1.0, static_cast<double>(k) * s); });
}

inline constexpr double probe_size = 1e-3;

// Column k of the Jacobian at u, as normalized Fourier coefficients.
inline std::vector<Complex> jacobian_column(const ComplexRhs& f, const ComplexField& u, long k) {
  const auto e = fourier_mode(u.grid(), k);
  const double eps = probe_size * (1.0 + max_abs(u));
  const auto d = f(u + Complex(eps) * e) - f(u - Complex(eps) * e);
  auto c = spectrum(d);
  for (auto& v : c) v /= 2.0 * eps;
  return c;
}

inline std::size_t slot(const PeriodicGrid& g, long k) {
  const auto n = static_cast<long>(g.n_points());
  return static_cast<std::size_t>(((k % n) + n) % n);
}

/// Fourier symbol of the linearization at the constant state `base`
/// (indexed like spectrum()). Real models get a conjugate-symmetric symbol
/// with the Nyquist entry cleared.
inline std::vector<Complex> linear_symbol(const ComplexRhs& f, const ComplexField& base, bool real_model) {
  const auto& g = base.grid();
  const auto n = g.n_points();
  std::vector<Complex> sym(n, 0.0);
  for (std::size_t j = 0; j < n; ++j) {
    const long k = g.wavenumber(j);
    if (real_model && (k < 0 || j == g.nyquist())) continue;
    sym[j] = jacobian_column(f, base, k)[j];
  }
  if (real_model) {
    sym[0] = Complex(sym[0].real(), 0.0);
    for (std::size_t j = 1; j < g.nyquist(); ++j) sym[n - j] = std::conj(sym[j]);
  }
  return sym;
}

/// Largest column norm of (J - diag(symbol)) in Fourier space: the rate the
/// explicit part of the stepper has to resolve.
inline double jacobian_radius(const ComplexRhs& f, const ComplexField& u, const std::vector<Complex>* symbol) {
  const auto& g = u.grid();
  double rho = 0.0;
  for (std::size_t j = 0; j < g.n_points(); ++j) {
    auto col = jacobian_column(f, u, g.wavenumber(j));
    if (symbol) col[j] -= (*symbol)[j];
    double s = 0.0;
    for (const auto& v : col) s += std::norm(v);
    rho = std::max(rho, std::sqrt(s));
  }
  return rho;
}

inline ComplexRhs complex_rhs(Model model, int n, double mean_tol) {
  return [=](const ComplexField& k) { return curvature_rhs(model, k, n, mean_tol); };
}

inline ComplexField as_complex(const RealField& f) { return complexify(f); }
inline ComplexField as_complex(const ComplexField& f) { return f; }

}  // namespace detail

// ---------------------------------------------------------------------------
// Invariants

namespace detail {

template <PeriodicScalar S>
std::array<Complex, 3> hamiltonians(Model model, const PeriodicField<S>& k) {
  std::array<Complex, 3> h{};
  for (int m = 1; m <= 3; ++m)
    h[static_cast<std::size_t>(m - 1)] =
        Complex(model == Model::euclidean ? euc::hamiltonian_hat(k, m) : eca::hamiltonian(k, m));
  return h;
}

inline std::pair<std::array<Complex, 3>, double> measure(Model model, const FlowState& state) {
  if (const auto* k = std::get_if<RealField>(&state)) return {hamiltonians(model, *k), 0.0};
  if (const auto* k = std::get_if<ComplexField>(&state)) return {hamiltonians(model, *k), 0.0};
  if (const auto* g = std::get_if<eca::EcaCurve>(&state))
    return {hamiltonians(model, eca::curvature(*g)), max_abs(eca::det_defect(*g))};
  const auto& g = std::get<euc::EucCurve>(state);
  return {hamiltonians(model, euc::curvature(g)), max_abs(euc::speed_defect(g))};
}

class InvariantTracker {
 public:
  InvariantTracker(const FlowSpec& spec) : model_(spec.model) {
    const bool hat = spec.model == Model::euclidean;
    report_.names = hat ? std::array<std::string, 3>{"Hhat1", "Hhat2", "Hhat3"}
                        : std::array<std::string, 3>{"H1", "H2", "H3"};
    if (spec.representation == Representation::curve) report_.defect_name = hat ? "speed_defect" : "det_defect";
  }

  void record(double t, const FlowState& state) {
    const auto [h, defect] = measure(model_, state);
    if (report_.series.empty()) report_.initial = h;
    InvariantSample s{t, {}, defect};
    for (std::size_t i = 0; i < 3; ++i) {
      s.h[i] = h[i].real();
      const double drift = std::abs(h[i] - report_.initial[i]);
      const double ref = std::abs(report_.initial[i]);
      report_.max_abs_drift[i] = std::max(report_.max_abs_drift[i], drift);
      report_.max_rel_drift[i] = std::max(report_.max_rel_drift[i], ref > 0 ? drift / ref : drift);
    }
    report_.max_defect = std::max(report_.max_defect, defect);
    report_.series.push_back(s);
  }

  InvariantReport take() { return std::move(report_); }

 private:
  Model model_;
  InvariantReport report_;
};

// State as a list of component fields, so that RK4 is written once.
template <PeriodicScalar S>
using Components = std::vector<PeriodicField<S>>;

template <PeriodicScalar S>
Components<S> axpy(const Components<S>& u, double h, const Components<S>& k) {
  Components<S> out;
  out.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) out.push_back(u[i] + S(h) * k[i]);
  return out;
}

template <PeriodicScalar S>
double max_abs(const Components<S>& u) {
  double m = 0;
  for (const auto& f : u) m = std::max(m, kdvcurve::max_abs(f));
  return m;
}

template <PeriodicScalar S, class F>
Components<S> rk4_step(const Components<S>& u, double h, F& f) {
  const auto k1 = f(u);
  const auto k2 = f(axpy(u, 0.5 * h, k1));
  const auto k3 = f(axpy(u, 0.5 * h, k2));
  const auto k4 = f(axpy(u, h, k3));
  Components<S> out;
  out.reserve(u.size());
  for (std::size_t i = 0; i < u.size(); ++i)
    out.push_back(u[i] + S(h / 6.0) * (k1[i] + S(2) * k2[i] + S(2) * k3[i] + k4[i]));
  return out;
}

// Lawson RK4 in Fourier space for v' = L v + N(v).
template <PeriodicScalar S, class F>
class LawsonStepper {
 public:
  LawsonStepper(const PeriodicGrid& grid, std::vector<Complex> symbol, double h, F& f)
      : grid_(grid), symbol_(std::move(symbol)), h_(h), f_(f) {
    e_.resize(symbol_.size());
    e2_.resize(symbol_.size());
    for (std::size_t j = 0; j < symbol_.size(); ++j) {
      e_[j] = std::exp(symbol_[j] * h);
      e2_[j] = std::exp(symbol_[j] * (0.5 * h));
    }
  }

  std::vector<Complex> step(const std::vector<Complex>& v) const {
    const std::size_t n = v.size();
    std::vector<Complex> w(n);
    const auto a = nonlinear(v);
    for (std::size_t j = 0; j < n; ++j) w[j] = e2_[j] * (v[j] + 0.5 * h_ * a[j]);
    const auto b = nonlinear(w);
    for (std::size_t j = 0; j < n; ++j) w[j] = e2_[j] * v[j] + 0.5 * h_ * b[j];
    const auto c = nonlinear(w);
    for (std::size_t j = 0; j < n; ++j) w[j] = e_[j] * v[j] + h_ * e2_[j] * c[j];
    const auto d = nonlinear(w);
    std::vector<Complex> out(n);
    for (std::size_t j = 0; j < n; ++j)
      out[j] = e_[j] * v[j] + h_ / 6.0 * (e_[j] * a[j] + 2.0 * e2_[j] * (b[j] + c[j]) + d[j]);
    return out;
  }

  PeriodicField<S> field(const std::vector<Complex>& v) const { return from_spectrum<S>(grid_, v); }

 private:
  // L acts on the spectrum of the field f actually saw. For real fields the
  // conjugate-antisymmetric part of v is invisible to f and would otherwise be
  // integrated explicitly against the stiff symbol.
  std::vector<Complex> nonlinear(const std::vector<Complex>& v) const {
    const auto u = field(v);
    auto r = spectrum(f_(u));
    const auto w = spectrum(u);
    for (std::size_t j = 0; j < r.size(); ++j) r[j] -= symbol_[j] * w[j];
    return r;
  }

  PeriodicGrid grid_;
  std::vector<Complex> symbol_;
  double h_;
  F& f_;
  std::vector<Complex> e_, e2_;
};

template <PeriodicScalar S>
double lawson_growth(Model model, int n, double mean_tol, const PeriodicField<S>& k0,
                     const std::vector<Complex>& symbol, double h) {
  auto f = [&](const PeriodicField<S>& k) { return curvature_rhs(model, k, n, mean_tol); };
  LawsonStepper<S, decltype(f)> stepper(k0.grid(), symbol, h, f);
  std::mt19937_64 rng(20240607);
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  auto d = PeriodicField<S>::sample(k0.grid(), [&](double) {
    if constexpr (std::is_same_v<S, Complex>)
      return Complex(unit(rng), unit(rng));
    else
      return unit(rng);
  });
  const double eps = 1e-7 * (1.0 + max_abs(k0));
  d = d * S(eps / max_abs(d));
  auto a = spectrum(k0);
  auto b = spectrum(k0 + d);
  double growth = 1.0;
  try {
    for (int i = 0; i < lawson_probe_steps; ++i) {
      a = stepper.step(a);
      b = stepper.step(b);
      const auto ua = stepper.field(a);
      const auto diff = stepper.field(b) - ua;
      const double r = max_abs(diff) / eps;
      growth *= r;
      if (!std::isfinite(growth) || !(max_abs(ua) <= blowup_threshold)) return std::numeric_limits<double>::infinity();
      a = spectrum(ua);
      b = spectrum(ua + diff * S(1.0 / r));
    }
  } catch (const NonFiniteError&) {
    return std::numeric_limits<double>::infinity();
  }
  return growth;
}

template <class T>
Components<double> to_components(const T& curve) {
  return {curve.x, curve.y};
}

inline std::size_t step_count(double t_final, double dt) {
  if (!(t_final >= 0) || !(dt > 0)) throw std::invalid_argument("t_final must be >= 0 and dt > 0");
  return static_cast<std::size_t>(std::ceil(t_final / dt - 1e-9));
}

}  // namespace detail

/// Largest stable time step for the given state and integrator. For RK4 this
/// is stability_safety * 2 sqrt 2 / rho, rho the empirical Jacobian radius.
/// For the integrating-factor stepper the same estimate (with rho taken for
/// the remainder J - L) is halved until a small perturbation, carried along
/// the trajectory for lawson_probe_steps steps, grows by less than
/// lawson_probe_growth. Curve states are judged through their curvature.
inline double stability_bound(const FlowState& state, const FlowSpec& spec) {
  detail::check_state(spec, state);
  ComplexField k = std::visit(
      [](const auto& s) -> ComplexField {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, RealField>) return complexify(s);
        if constexpr (std::is_same_v<T, ComplexField>) return s;
        if constexpr (std::is_same_v<T, eca::EcaCurve>) return complexify(eca::curvature(s));
        if constexpr (std::is_same_v<T, euc::EucCurve>) return complexify(euc::curvature(s));
      },
      state);
  const Model m = spec.model;
  const auto f = detail::complex_rhs(m, spec.hierarchy_n, spec.mean_tol);
  double rho = 0.0;
  if (spec.integrator == Integrator::if_rk4 && spec.representation == Representation::curvature) {
    const auto base = ComplexField::constant(k.grid(), mean(k));
    const auto sym = detail::linear_symbol(f, base, m != Model::eca_complex);
    rho = detail::jacobian_radius(f, k, &sym);
    if (rho <= 0) return std::numeric_limits<double>::infinity();
    double dt = spec.stability_safety * rk4_imaginary_limit / rho;
    auto growth = [&](double h) {
      if (m == Model::eca_complex) return detail::lawson_growth(m, spec.hierarchy_n, spec.mean_tol, k, sym, h);
      return detail::lawson_growth(m, spec.hierarchy_n, spec.mean_tol, real_part(k), sym, h);
    };
    for (int i = 0; i < 60 && !(growth(dt) < lawson_probe_growth); ++i) dt *= 0.5;
    return dt;
  } else {
    rho = detail::jacobian_radius(f, k, nullptr);
  }
  if (rho <= 0) return std::numeric_limits<double>::infinity();
  return spec.stability_safety * rk4_imaginary_limit / rho;
}

/// Fixed-step integration from t = 0 to t_final. The step is t_final divided
/// by ceil(t_final / dt), so it never exceeds dt.
inline TrajectoryRecord evolve(const FlowState& initial, const FlowSpec& spec) {
  detail::check_state(spec, initial);
  const bool curve = spec.representation == Representation::curve;
  if (curve && spec.integrator == Integrator::if_rk4)
    throw std::invalid_argument("the integrating-factor stepper works at curvature level only");

  TrajectoryRecord rec;
  rec.steps = detail::step_count(spec.t_final, spec.dt);
  rec.dt_used = rec.steps ? spec.t_final / static_cast<double>(rec.steps) : 0.0;
  rec.stability_bound = stability_bound(initial, spec);
  if (spec.dt > rec.stability_bound) throw StabilityError(spec.dt, rec.stability_bound);

  const std::size_t every =
      spec.record_every > 0 ? static_cast<std::size_t>(spec.record_every) : std::max<std::size_t>(1, (rec.steps + 999) / 1000);
  detail::InvariantTracker tracker(spec);
  auto snapshot = [&](double t, FlowState s) {
    tracker.record(t, s);
    rec.times.push_back(t);
    rec.states.push_back(std::move(s));
  };
  snapshot(0.0, initial);

  const double h = rec.dt_used;
  const int n = spec.hierarchy_n;
  auto check = [&](double m, double t) {
    if (!(m <= blowup_threshold)) throw BlowupError(t);
  };
  auto time_at = [&](std::size_t i) { return static_cast<double>(i) * h; };

  auto run_curvature = [&]<PeriodicScalar S>(const PeriodicField<S>& k0) {
    auto f = [&](const PeriodicField<S>& k) { return curvature_rhs(spec.model, k, n, spec.mean_tol); };
    auto post = [&](PeriodicField<S> k) { return spec.dealias ? dealias(k) : k; };
    if (spec.integrator == Integrator::if_rk4) {
      const auto cf = detail::complex_rhs(spec.model, n, spec.mean_tol);
      const auto base = ComplexField::constant(k0.grid(), mean(detail::as_complex(k0)));
      auto sym = detail::linear_symbol(cf, base, spec.model != Model::eca_complex);
      detail::LawsonStepper<S, decltype(f)> stepper(k0.grid(), std::move(sym), h, f);
      auto v = spectrum(k0);
      for (std::size_t i = 1; i <= rec.steps; ++i) {
        v = stepper.step(v);
        auto k = post(stepper.field(v));
        v = spectrum(k);
        check(max_abs(k), time_at(i));
        if (i % every == 0 || i == rec.steps) snapshot(time_at(i), std::move(k));
      }
    } else {
      auto fc = [&](const detail::Components<S>& u) { return detail::Components<S>{f(u[0])}; };
      detail::Components<S> u{k0};
      for (std::size_t i = 1; i <= rec.steps; ++i) {
        u = detail::rk4_step(u, h, fc);
        u[0] = post(u[0]);
        check(detail::max_abs(u), time_at(i));
        if (i % every == 0 || i == rec.steps) snapshot(time_at(i), u[0]);
      }
    }
  };

  auto run_curve = [&]<class C>(const C& g0) {
    double t_now = 0.0;
    auto f = [&](const detail::Components<double>& u) {
      return detail::to_components(curve_rhs(C{u[0], u[1]}, n, spec.mean_tol, t_now));
    };
    auto u = detail::to_components(g0);
    for (std::size_t i = 1; i <= rec.steps; ++i) {
      t_now = time_at(i - 1);
      u = detail::rk4_step(u, h, f);
      if (spec.dealias)
        for (auto& c : u) c = dealias(c);
      check(detail::max_abs(u), time_at(i));
      C g{u[0], u[1]};
      const double defect =
          max_abs([&] {
            if constexpr (std::is_same_v<C, eca::EcaCurve>)
              return eca::det_defect(g);
            else
              return euc::speed_defect(g);
          }());
      if (defect > constraint_limit) throw ConstraintDriftError(defect, time_at(i));
      if (i % every == 0 || i == rec.steps) snapshot(time_at(i), std::move(g));
    }
  };

  try {
    if (const auto* k = std::get_if<RealField>(&initial))
      run_curvature(*k);
    else if (const auto* kc = std::get_if<ComplexField>(&initial))
      run_curvature(*kc);
    else if (const auto* g = std::get_if<eca::EcaCurve>(&initial))
      run_curve(*g);
    else
      run_curve(std::get<euc::EucCurve>(initial));
  } catch (const NonFiniteError&) {
    throw BlowupError(rec.times.empty() ? 0.0 : rec.times.back());
  }
  rec.invariants = tracker.take();
  return rec;
}

// ---------------------------------------------------------------------------
// Experiments

inline FlowSpec curvature_spec(Model model, int n, double t_final, double dt, Integrator integrator) {
  FlowSpec s;
  s.model = model;
  s.hierarchy_n = n;
  s.t_final = t_final;
  s.dt = dt;
  s.integrator = integrator;
  s.record_every = std::numeric_limits<int>::max();
  return s;
}

/// Final state of a curvature-level run.
template <PeriodicScalar S>
PeriodicField<S> flow_to(const PeriodicField<S>& k0, Model model, int n, double t, double dt,
                         Integrator integrator = Integrator::if_rk4) {
  auto rec = evolve(k0, curvature_spec(model, n, t, dt, integrator));
  return std::get<PeriodicField<S>>(rec.states.back());
}

/// max |phi_{n2} phi_{n1} kappa0 - phi_{n1} phi_{n2} kappa0| for the
/// equicentroaffine KdV flows, each run for t_each.
inline double commutativity_residual(const RealField& kappa0, int n1, int n2, double t_each, double dt,
                                     Integrator integrator = Integrator::if_rk4) {
  const auto a = flow_to(flow_to(kappa0, Model::eca, n1, t_each, dt, integrator), Model::eca, n2, t_each, dt, integrator);
  const auto b = flow_to(flow_to(kappa0, Model::eca, n2, t_each, dt, integrator), Model::eca, n1, t_each, dt, integrator);
  return max_abs_diff(a, b);
}

struct ConsistencyReport {
  double residual = 0;        // max |curvature(gamma(t)) - kappa(t)|
  double constraint_drift = 0;  // max constraint defect along the curve run
};

/// Evolves the curve under X_n and its curvature under the n-th flow
/// independently (classical RK4 for both) and compares at t_final. The curve
/// run is dealiased: without it, aliased products drive the top modes of the
/// coordinates and the constraint defect grows exponentially from roundoff.
template <class Curve>
ConsistencyReport curve_curvature_consistency(const Curve& gamma0, int n, double t_final, double dt) {
  constexpr bool is_eca = std::is_same_v<Curve, eca::EcaCurve>;
  const Model model = is_eca ? Model::eca : Model::euclidean;
  FlowSpec spec = curvature_spec(model, n, t_final, dt, Integrator::rk4);
  spec.representation = Representation::curve;
  spec.record_every = 1;
  spec.dealias = true;
  const auto curve_run = evolve(gamma0, spec);
  const auto& g1 = std::get<Curve>(curve_run.states.back());
  RealField k0 = [&] {
    if constexpr (is_eca)
      return eca::curvature(gamma0);
    else
      return euc::curvature(gamma0);
  }();
  const auto k1 = flow_to(k0, model, n, t_final, dt, Integrator::rk4);
  RealField kc = [&] {
    if constexpr (is_eca)
      return eca::curvature(g1);
    else
      return euc::curvature(g1);
  }();
  const double initial_defect = curve_run.invariants.series.front().defect;
  double drift = 0;
  for (const auto& s : curve_run.invariants.series) drift = std::max(drift, std::abs(s.defect - initial_defect));
  return {max_abs_diff(kc, k1), std::max(drift, 0.0)};
}

}  // namespace kdvcurve::flow
