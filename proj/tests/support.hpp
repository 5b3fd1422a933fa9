#pragma once

#include <random>

#include "kdvcurve/sampling.hpp"

namespace testing_support {

using kdvcurve::PeriodicGrid;
using kdvcurve::RealField;

inline double unit(std::mt19937_64& rng) { return kdvcurve::unit_draw(rng); }

using kdvcurve::random_field;

inline RealField cosine(const PeriodicGrid& grid, double base, double amplitude, int mode) {
  return kdvcurve::cosine_field(grid, base, amplitude, mode);
}

}  // namespace testing_support
