#pragma once

// Small planar helpers shared by both curve geometries.

#include <cmath>

#include "kdvcurve/periodic_calculus.hpp"

namespace kdvcurve {

/// 2x2 matrix, row-major.
struct Mat2 {
  double a = 1, b = 0, c = 0, d = 1;

  double det() const noexcept { return a * d - b * c; }
  double trace() const noexcept { return a + d; }
  friend Mat2 operator*(const Mat2& l, const Mat2& r) noexcept {
    return {l.a * r.a + l.b * r.c, l.a * r.b + l.b * r.d, l.c * r.a + l.d * r.c, l.c * r.b + l.d * r.d};
  }
  friend bool operator==(const Mat2&, const Mat2&) = default;
};

inline double max_abs_entry(const Mat2& m) {
  return std::max(std::max(std::abs(m.a), std::abs(m.b)), std::max(std::abs(m.c), std::abs(m.d)));
}

/// A vector field along a curve, or the curve itself, as two component fields.
template <PeriodicScalar S>
struct PlaneFieldT {
  PeriodicField<S> x;
  PeriodicField<S> y;

  const PeriodicGrid& grid() const noexcept { return x.grid(); }
};

using PlaneField = PlaneFieldT<double>;
using ComplexPlaneField = PlaneFieldT<Complex>;

/// Pointwise det(u, v) = u_x v_y - u_y v_x.
template <PeriodicScalar S>
PeriodicField<S> det(const PeriodicField<S>& ux, const PeriodicField<S>& uy, const PeriodicField<S>& vx,
                     const PeriodicField<S>& vy) {
  return ux * vy - uy * vx;
}

template <PeriodicScalar S>
PeriodicField<S> det(const PlaneFieldT<S>& u, const PlaneFieldT<S>& v) {
  return det(u.x, u.y, v.x, v.y);
}

template <PeriodicScalar S>
PlaneFieldT<S> ds(const PlaneFieldT<S>& v, int order = 1) {
  return {ds(v.x, order), ds(v.y, order)};
}

template <PeriodicScalar S>
PlaneFieldT<S> operator+(const PlaneFieldT<S>& u, const PlaneFieldT<S>& v) {
  return {u.x + v.x, u.y + v.y};
}
template <PeriodicScalar S>
PlaneFieldT<S> operator-(const PlaneFieldT<S>& u, const PlaneFieldT<S>& v) {
  return {u.x - v.x, u.y - v.y};
}
/// Pointwise scaling of a vector field by a scalar field.
template <PeriodicScalar S>
PlaneFieldT<S> operator*(const PeriodicField<S>& f, const PlaneFieldT<S>& v) {
  return {f * v.x, f * v.y};
}
template <PeriodicScalar S>
PlaneFieldT<S> operator*(S c, const PlaneFieldT<S>& v) {
  return {c * v.x, c * v.y};
}

template <PeriodicScalar S>
double max_abs(const PlaneFieldT<S>& v) {
  return std::max(max_abs(v.x), max_abs(v.y));
}

}  // namespace kdvcurve
