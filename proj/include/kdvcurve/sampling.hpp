#pragma once

// Analytic seeds and reproducible random band-limited fields.
//
// Generator: std::mt19937_64 seeded with the user seed; a uniform draw on
// [0, 1) takes the top 53 bits of one output. Random fields draw the cosine
// and sine coefficients of modes 1..max_mode in that order, each uniform on
// [-amplitude, amplitude] / k^2.

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "kdvcurve/periodic_calculus.hpp"

namespace kdvcurve {

inline double unit_draw(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

inline RealField random_field(const PeriodicGrid& grid, std::mt19937_64& rng, int max_mode, double amplitude,
                              double offset = 0.0) {
  std::vector<double> a(max_mode + 1), b(max_mode + 1);
  for (int k = 1; k <= max_mode; ++k) {
    a[k] = amplitude * (2 * unit_draw(rng) - 1) / (k * k);
    b[k] = amplitude * (2 * unit_draw(rng) - 1) / (k * k);
  }
  return RealField::sample(grid, [&](double s) {
    double v = offset;
    for (int k = 1; k <= max_mode; ++k) v += a[k] * std::cos(k * s) + b[k] * std::sin(k * s);
    return v;
  });
}

/// Real part first, then imaginary part.
inline ComplexField random_complex_field(const PeriodicGrid& grid, std::mt19937_64& rng, int max_mode,
                                         double amplitude) {
  const auto re = random_field(grid, rng, max_mode, amplitude);
  const auto im = random_field(grid, rng, max_mode, amplitude);
  return complexify(re) + Complex(0.0, 1.0) * complexify(im);
}

/// base + amplitude cos(mode s + phase).
inline RealField cosine_field(const PeriodicGrid& grid, double base, double amplitude, int mode, double phase = 0.0) {
  return RealField::sample(grid, [=](double s) { return base + amplitude * std::cos(mode * s + phase); });
}

}  // namespace kdvcurve
