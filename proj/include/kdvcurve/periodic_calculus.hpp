#pragma once

// Fourier-collocation calculus for 2pi-periodic functions sampled on a uniform
// grid s_j = 2 pi j / n. Fields are immutable values; every operation returns
// a new field.
//
// Spectral convention: f(s_j) = sum_k c_k exp(i k s_j) with k in
// (-n/2, n/2] and c_k = (1/n) sum_j f(s_j) exp(-i k s_j). The Nyquist mode
// k = n/2 is treated as cos(n s / 2): odd-order derivatives annihilate it,
// even-order derivatives keep it with the real factor (-1)^{p/2} (n/2)^p.

#include <algorithm>
#include <cmath>
#include <complex>
#include <concepts>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <type_traits>
#include <utility>
#include <vector>

#include "kdvcurve/detail/fft.hpp"
#include "kdvcurve/errors.hpp"

namespace kdvcurve {

inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double default_mean_tol = 1e-9;

using Complex = std::complex<double>;

class PeriodicGrid {
 public:
  explicit PeriodicGrid(std::size_t n_points) : n_(n_points) {
    if (n_points < 8 || n_points % 2 != 0)
      throw std::invalid_argument("grid size must be even and >= 8, got " + std::to_string(n_points));
  }

  std::size_t n_points() const noexcept { return n_; }
  double spacing() const noexcept { return two_pi / static_cast<double>(n_); }
  double node(std::size_t j) const noexcept { return two_pi * static_cast<double>(j) / static_cast<double>(n_); }

  /// Signed wavenumber of spectral slot j: 0, 1, ..., n/2, -n/2+1, ..., -1.
  long wavenumber(std::size_t j) const noexcept {
    return j <= n_ / 2 ? static_cast<long>(j) : static_cast<long>(j) - static_cast<long>(n_);
  }
  std::size_t nyquist() const noexcept { return n_ / 2; }

  friend bool operator==(const PeriodicGrid&, const PeriodicGrid&) = default;

 private:
  std::size_t n_;
};

template <typename T>
concept PeriodicScalar = std::same_as<T, double> || std::same_as<T, Complex>;

template <PeriodicScalar Scalar>
class PeriodicField {
 public:
  using value_type = Scalar;

  PeriodicField(PeriodicGrid grid, std::vector<Scalar> samples) : grid_(grid), samples_(std::move(samples)) {
    if (samples_.size() != grid_.n_points())
      throw std::invalid_argument("sample count " + std::to_string(samples_.size()) + " does not match grid size " +
                                  std::to_string(grid_.n_points()));
    for (const auto& v : samples_)
      if (!is_finite(v)) throw NonFiniteError("PeriodicField");
  }

  static PeriodicField constant(PeriodicGrid grid, Scalar value) {
    return PeriodicField(grid, std::vector<Scalar>(grid.n_points(), value));
  }

  template <typename F>
    requires std::invocable<F, double>
  static PeriodicField sample(PeriodicGrid grid, F&& f) {
    std::vector<Scalar> v(grid.n_points());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = static_cast<Scalar>(f(grid.node(j)));
    return PeriodicField(grid, std::move(v));
  }

  const PeriodicGrid& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return samples_.size(); }
  std::span<const Scalar> samples() const noexcept { return samples_; }
  Scalar operator[](std::size_t j) const noexcept { return samples_[j]; }

  template <typename F>
  auto map(F&& f) const {
    using R = std::invoke_result_t<F, Scalar>;
    std::vector<R> out(samples_.size());
    std::transform(samples_.begin(), samples_.end(), out.begin(), f);
    return PeriodicField<R>(grid_, std::move(out));
  }

  PeriodicField& operator+=(const PeriodicField& o) { return combine(o, std::plus<>{}); }
  PeriodicField& operator-=(const PeriodicField& o) { return combine(o, std::minus<>{}); }
  PeriodicField& operator*=(const PeriodicField& o) { return combine(o, std::multiplies<>{}); }
  PeriodicField& operator*=(Scalar c) {
    for (auto& v : samples_) v *= c;
    check_finite();
    return *this;
  }
  PeriodicField& operator+=(Scalar c) {
    for (auto& v : samples_) v += c;
    check_finite();
    return *this;
  }

  friend PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
  friend PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
  friend PeriodicField operator*(PeriodicField a, const PeriodicField& b) { return a *= b; }
  friend PeriodicField operator*(Scalar c, PeriodicField a) { return a *= c; }
  friend PeriodicField operator*(PeriodicField a, Scalar c) { return a *= c; }
  friend PeriodicField operator+(PeriodicField a, Scalar c) { return a += c; }
  friend PeriodicField operator+(Scalar c, PeriodicField a) { return a += c; }
  friend PeriodicField operator-(PeriodicField a, Scalar c) { return a += -c; }
  friend PeriodicField operator-(PeriodicField a) { return a *= Scalar(-1); }

  friend bool operator==(const PeriodicField&, const PeriodicField&) = default;

 private:
  static bool is_finite(double v) { return std::isfinite(v); }
  static bool is_finite(const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); }

  void check_finite() const {
    for (const auto& v : samples_)
      if (!is_finite(v)) throw NonFiniteError("PeriodicField arithmetic");
  }

  template <typename Op>
  PeriodicField& combine(const PeriodicField& o, Op op) {
    if (!(grid_ == o.grid_)) throw GridMismatchError(grid_.n_points(), o.grid_.n_points());
    for (std::size_t j = 0; j < samples_.size(); ++j) samples_[j] = op(samples_[j], o.samples_[j]);
    check_finite();
    return *this;
  }

  PeriodicGrid grid_;
  std::vector<Scalar> samples_;
};

using RealField = PeriodicField<double>;
using ComplexField = PeriodicField<Complex>;

// ---------------------------------------------------------------------------
// Conversions and pointwise helpers

inline ComplexField complexify(const RealField& f) {
  return f.map([](double v) { return Complex(v, 0.0); });
}
inline RealField real_part(const ComplexField& f) {
  return f.map([](const Complex& v) { return v.real(); });
}
inline RealField imag_part(const ComplexField& f) {
  return f.map([](const Complex& v) { return v.imag(); });
}

template <PeriodicScalar S>
double max_abs(const PeriodicField<S>& f) {
  double m = 0.0;
  for (const auto& v : f.samples()) m = std::max(m, std::abs(v));
  return m;
}

template <PeriodicScalar S>
double max_abs_diff(const PeriodicField<S>& a, const PeriodicField<S>& b) {
  if (!(a.grid() == b.grid())) throw GridMismatchError(a.grid().n_points(), b.grid().n_points());
  double m = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
  return m;
}

template <PeriodicScalar S>
PeriodicField<S> pow(const PeriodicField<S>& f, int p) {
  return f.map([p](S v) {
    S r(1);
    for (int i = 0; i < p; ++i) r *= v;
    return r;
  });
}

template <PeriodicScalar S>
PeriodicField<double> abs(const PeriodicField<S>& f) {
  return f.map([](S v) { return std::abs(v); });
}

// ---------------------------------------------------------------------------
// Quadrature

/// Trapezoidal rule, spectrally exact for periodic integrands.
template <PeriodicScalar S>
S integrate(const PeriodicField<S>& f) {
  S sum(0);
  for (const auto& v : f.samples()) sum += v;
  return sum * f.grid().spacing();
}

template <PeriodicScalar S>
S mean(const PeriodicField<S>& f) {
  S sum(0);
  for (const auto& v : f.samples()) sum += v;
  return sum / static_cast<double>(f.size());
}

// ---------------------------------------------------------------------------
// Spectral transforms

/// Normalized Fourier coefficients c_k in FFT slot order.
template <PeriodicScalar S>
std::vector<Complex> spectrum(const PeriodicField<S>& f) {
  const auto n = f.size();
  std::vector<Complex> in(n), out(n);
  for (std::size_t j = 0; j < n; ++j) in[j] = Complex(f[j]);
  detail::plan_for(n).forward(in, out);
  const double inv = 1.0 / static_cast<double>(n);
  for (auto& c : out) c *= inv;
  return out;
}

/// Inverse of `spectrum`; real fields keep the real part.
template <PeriodicScalar S>
PeriodicField<S> from_spectrum(const PeriodicGrid& grid, std::span<const Complex> coeffs) {
  const auto n = grid.n_points();
  if (coeffs.size() != n) throw std::invalid_argument("coefficient count does not match grid");
  std::vector<Complex> out(n);
  detail::plan_for(n).backward(coeffs, out);
  std::vector<S> v(n);
  for (std::size_t j = 0; j < n; ++j) {
    if constexpr (std::same_as<S, double>)
      v[j] = out[j].real();
    else
      v[j] = out[j];
  }
  return PeriodicField<S>(grid, std::move(v));
}

namespace detail {

// Multiplier of (d/ds)^order on spectral slot j.
inline Complex derivative_symbol(const PeriodicGrid& grid, std::size_t j, int order) {
  const long k = grid.wavenumber(j);
  if (j == grid.nyquist() && order % 2 != 0) return 0.0;
  const double kk = static_cast<double>(k);
  Complex ik(0.0, kk);
  Complex r(1.0);
  for (int p = 0; p < order; ++p) r *= ik;
  if (j == grid.nyquist()) r = Complex(r.real(), 0.0);
  return r;
}

}  // namespace detail

/// order-th derivative of the trigonometric interpolant.
template <PeriodicScalar S>
PeriodicField<S> ds(const PeriodicField<S>& f, int order = 1) {
  if (order < 0) throw std::invalid_argument("derivative order must be non-negative");
  if (order == 0) return f;
  auto c = spectrum(f);
  for (std::size_t j = 0; j < c.size(); ++j) c[j] *= detail::derivative_symbol(f.grid(), j, order);
  return from_spectrum<S>(f.grid(), c);
}

/// Several derivatives from one forward transform.
template <PeriodicScalar S>
std::vector<PeriodicField<S>> derivatives(const PeriodicField<S>& f, std::initializer_list<int> orders) {
  const auto c = spectrum(f);
  std::vector<PeriodicField<S>> out;
  out.reserve(orders.size());
  std::vector<Complex> d(c.size());
  for (int order : orders) {
    if (order == 0) {
      out.push_back(f);
      continue;
    }
    for (std::size_t j = 0; j < c.size(); ++j) d[j] = c[j] * detail::derivative_symbol(f.grid(), j, order);
    out.push_back(from_spectrum<S>(f.grid(), d));
  }
  return out;
}

/// Mean-zero periodic antiderivative. Throws NonZeroMeanError when
/// |mean(f)| > mean_tol * (1 + max|f|).
template <PeriodicScalar S>
PeriodicField<S> ds_inv(const PeriodicField<S>& f, double mean_tol = default_mean_tol, int step = -1) {
  auto c = spectrum(f);
  const double m = std::abs(c[0]);
  if (m > mean_tol * (1.0 + max_abs(f))) throw NonZeroMeanError(m, step);
  const auto& grid = f.grid();
  c[0] = 0.0;
  c[grid.nyquist()] = 0.0;
  for (std::size_t j = 1; j < c.size(); ++j) {
    if (j == grid.nyquist()) continue;
    c[j] /= Complex(0.0, static_cast<double>(grid.wavenumber(j)));
  }
  return from_spectrum<S>(grid, c);
}

/// The interpolant evaluated at s + sigma (the S^1 action).
template <PeriodicScalar S>
PeriodicField<S> shift(const PeriodicField<S>& f, double sigma) {
  if (sigma == 0.0) return f;
  auto c = spectrum(f);
  const auto& grid = f.grid();
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (j == grid.nyquist())
      c[j] *= std::cos(static_cast<double>(grid.nyquist()) * sigma);
    else
      c[j] *= std::polar(1.0, static_cast<double>(grid.wavenumber(j)) * sigma);
  }
  return from_spectrum<S>(grid, c);
}

/// Value of the interpolant at an arbitrary parameter s.
template <PeriodicScalar S>
S evaluate(const PeriodicField<S>& f, double s) {
  const auto c = spectrum(f);
  const auto& grid = f.grid();
  Complex sum(0.0);
  for (std::size_t j = 0; j < c.size(); ++j) {
    if (j == grid.nyquist())
      sum += c[j] * std::cos(static_cast<double>(grid.nyquist()) * s);
    else
      sum += c[j] * std::polar(1.0, static_cast<double>(grid.wavenumber(j)) * s);
  }
  if constexpr (std::same_as<S, double>)
    return sum.real();
  else
    return sum;
}

/// Trigonometric interpolation onto a grid with a different (even) size.
template <PeriodicScalar S>
PeriodicField<S> resample(const PeriodicField<S>& f, std::size_t n_new) {
  const PeriodicGrid target(n_new);
  const auto& src = f.grid();
  const auto c = spectrum(f);
  std::vector<Complex> d(n_new, Complex(0.0));
  const long half_new = static_cast<long>(n_new / 2);
  const long half_old = static_cast<long>(src.nyquist());
  auto slot = [](long k, std::size_t n) { return static_cast<std::size_t>(k >= 0 ? k : k + static_cast<long>(n)); };
  for (std::size_t j = 0; j < c.size(); ++j) {
    const long k = src.wavenumber(j);
    if (j == src.nyquist()) {
      if (half_old < half_new) {
        d[slot(k, n_new)] += 0.5 * c[j];
        d[slot(-k, n_new)] += 0.5 * c[j];
      } else if (half_old == half_new) {
        d[slot(k, n_new)] += c[j];
      }
      continue;
    }
    if (std::abs(k) < half_new)
      d[slot(k, n_new)] += c[j];
    else if (std::abs(k) == half_new)
      d[static_cast<std::size_t>(half_new)] += c[j];  // folds onto the cosine Nyquist mode
  }
  return from_spectrum<S>(target, d);
}

/// Two-thirds rule: zero every mode with |k| > n/3.
template <PeriodicScalar S>
PeriodicField<S> dealias(const PeriodicField<S>& f) {
  auto c = spectrum(f);
  const auto& grid = f.grid();
  const double cutoff = static_cast<double>(grid.n_points()) / 3.0;
  for (std::size_t j = 0; j < c.size(); ++j)
    if (std::abs(static_cast<double>(grid.wavenumber(j))) > cutoff) c[j] = 0.0;
  return from_spectrum<S>(grid, c);
}

}  // namespace kdvcurve
