#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "kdvcurve/errors.hpp"

namespace kdvcurve::detail {

// Minimum-norm correction t - sum c_i basis_i that makes the linear
// functionals dh(j, .), j = 1..m, vanish. `scale(j, t)` is the magnitude used
// to decide whether a value counts as zero; `axpy(t, c, b)` returns t + c b.
// A functional that vanishes on every basis direction is dropped (it is then
// identically satisfied, or the input cannot be corrected at all).
template <class T, class Dh, class Scale, class Axpy>
T project_constraints(const T& t, const std::vector<T>& basis, int m, double tol, Dh& dh, Scale& scale,
                      Axpy& axpy) {
  if (m <= 0) return t;
  const auto nb = static_cast<Eigen::Index>(basis.size());
  std::vector<Eigen::RowVectorXd> rows;
  std::vector<int> orders;
  for (int j = 1; j <= m; ++j) {
    Eigen::RowVectorXd row(nb);
    double row_scale = 1.0;
    for (Eigen::Index i = 0; i < nb; ++i) {
      const auto& b = basis[static_cast<std::size_t>(i)];
      row(i) = dh(j, b);
      row_scale += scale(j, b);
    }
    if (row.norm() <= 1e-12 * row_scale) {
      const double v = dh(j, t);
      if (std::abs(v) > tol * (1.0 + scale(j, t)))
        throw DegenerateConstraintError(std::numeric_limits<double>::infinity());
      continue;
    }
    rows.push_back(row);
    orders.push_back(j);
  }
  if (rows.empty()) return t;

  Eigen::MatrixXd a(static_cast<Eigen::Index>(rows.size()), nb);
  for (std::size_t r = 0; r < rows.size(); ++r) a.row(static_cast<Eigen::Index>(r)) = rows[r];
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  const auto& sv = svd.singularValues();
  const double smallest = sv(sv.size() - 1);
  const double cond = smallest > 0 ? sv(0) / smallest : std::numeric_limits<double>::infinity();
  if (cond > 1e12) throw DegenerateConstraintError(cond);

  T out = t;
  // The second pass removes the roundoff left by the first.
  for (int pass = 0; pass < 2; ++pass) {
    Eigen::VectorXd rhs(static_cast<Eigen::Index>(orders.size()));
    for (std::size_t r = 0; r < orders.size(); ++r) rhs(static_cast<Eigen::Index>(r)) = dh(orders[r], out);
    const Eigen::VectorXd c = svd.solve(rhs);
    for (Eigen::Index i = 0; i < nb; ++i) out = axpy(out, -c(i), basis[static_cast<std::size_t>(i)]);
  }
  return out;
}

// Same, with the basis make_basis(K) of the first K Fourier modes. K starts
// at m + 2 and doubles (up to max_modes) while some functional is invisible
// to the basis.
template <class T, class MakeBasis, class Dh, class Scale, class Axpy>
T project_constraints_adaptive(const T& t, MakeBasis&& make_basis, int m, int max_modes, double tol, Dh&& dh,
                               Scale&& scale, Axpy&& axpy) {
  for (int k = m + 2;; k *= 2) {
    const int modes = std::min(k, max_modes);
    try {
      return project_constraints(t, make_basis(modes), m, tol, dh, scale, axpy);
    } catch (const DegenerateConstraintError& e) {
      if (modes >= max_modes || std::isfinite(e.condition_number())) throw;
    }
  }
}

}  // namespace kdvcurve::detail
