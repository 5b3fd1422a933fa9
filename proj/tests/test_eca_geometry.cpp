#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kdvcurve/eca_geometry.hpp"
#include "support.hpp"

using namespace kdvcurve;
using namespace kdvcurve::eca;
using testing_support::cosine;
using testing_support::random_field;

namespace {

constexpr double pi = std::numbers::pi;

EcaCurve circle(std::size_t n) {
  PeriodicGrid g(n);
  return {RealField::sample(g, [](double s) { return std::cos(s); }),
          RealField::sample(g, [](double s) { return std::sin(s); })};
}

RealField trig(const PeriodicGrid& g, double (*f)(double)) { return RealField::sample(g, f); }

// kappa = c + 0.05 cos 4s with c chosen so the curve closes.
struct ClosedSeed {
  RealField kappa;
  EcaCurve gamma;
};

ClosedSeed closed_seed(std::size_t n = 64) {
  PeriodicGrid g(n);
  const auto shape = cosine(g, 0.0, 0.05, 4);
  const double c = closing_shift(shape, 4);
  auto kappa = shape + c;
  auto gamma = from_curvature(kappa, 1e-8);
  return {std::move(kappa), std::move(gamma)};
}

double pair_scale(const RealField& a, const RealField& b) { return 1.0 + integrate(abs(a) * abs(b)); }

}  // namespace

TEST(Validate, CircleScaledCircleEllipse) {
  EXPECT_LE(validate(circle(32)).max_det_defect, 1e-12);
  EXPECT_TRUE(validate(circle(32)).ok);
  const auto c = circle(32);
  const auto big = validate({2.0 * c.x, 2.0 * c.y});
  EXPECT_NEAR(big.max_det_defect, 3.0, 1e-12);
  EXPECT_FALSE(big.ok);
  EXPECT_TRUE(validate({2.0 * c.x, 0.5 * c.y}).ok);
}

TEST(Curvature, UnimodularImagesOfTheCircleHaveUnitCurvature) {
  const auto c = circle(32);
  EXPECT_LE(max_abs_diff(curvature(c), RealField::constant(c.grid(), 1.0)), 1e-12);
  EXPECT_LE(max_abs_diff(curvature({2.0 * c.x, 0.5 * c.y}), RealField::constant(c.grid(), 1.0)), 1e-11);
  const auto sheared = sl2_apply(Mat2{1, 1, 0, 1}, c);
  EXPECT_LE(max_abs_diff(curvature(sheared), RealField::constant(c.grid(), 1.0)), 1e-12);
}

TEST(Curvature, SatisfiesHillEquationOnClosedSeed) {
  const auto seed = closed_seed();
  const auto k = curvature(seed.gamma);
  const auto rx = ds(seed.gamma.x, 2) + k * seed.gamma.x;
  const auto ry = ds(seed.gamma.y, 2) + k * seed.gamma.y;
  EXPECT_LE(std::max(max_abs(rx), max_abs(ry)), 1e-8 * (1 + max_abs(k)));
}

TEST(OmegaOp, SingleModeOnCircle) {
  PeriodicGrid g(32);
  const auto one = RealField::constant(g, 1.0);
  const auto c = trig(g, [](double s) { return std::cos(s); });
  EXPECT_LE(max_abs_diff(omega_op(one, c), 1.5 * c), 1e-13);
  EXPECT_THROW(omega_op(one, one), NonZeroMeanError);
}

TEST(OmegaOp, KdvExpansionThroughExactForm) {
  // Omega kappa_s with D^{-1} kappa_s = kappa is (1/2) kappa_sss + 3 kappa kappa_s.
  PeriodicGrid g(64);
  const double e = 0.2;
  const auto kappa = cosine(g, 1.0, e, 1);
  const auto expected =
      RealField::sample(g, [e](double s) { return -2.5 * e * std::sin(s) - 1.5 * e * e * std::sin(2 * s); });
  EXPECT_LE(max_abs_diff(omega_d(kappa, kappa), expected), 1e-12);
  // The mean-zero antiderivative drops kappa_s * mean(kappa).
  EXPECT_LE(max_abs_diff(omega_op(kappa, ds(kappa)), expected - ds(kappa)), 1e-12);
}

TEST(OmegaPower, SquaresOnCircleAndComposition) {
  PeriodicGrid g(32);
  const auto one = RealField::constant(g, 1.0);
  const auto c = trig(g, [](double s) { return std::cos(s); });
  EXPECT_LE(max_abs_diff(omega_power(one, c, 2).value, 2.25 * c), 1e-11);
  EXPECT_LE(max_abs(omega_power(one, RealField::constant(g, 0.0), 3).value), 1e-15);

  const auto kappa = cosine(g, 1.0, 0.2, 1);
  const auto f = ds(kappa);
  const auto p = omega_power(kappa, f, 2);
  const auto once = omega_op(kappa, f);
  EXPECT_EQ(p.value, omega_op(kappa, once));
  ASSERT_EQ(p.intermediate_means.size(), 2u);
  EXPECT_DOUBLE_EQ(p.intermediate_means[0], std::abs(mean(f)));
  EXPECT_DOUBLE_EQ(p.intermediate_means[1], std::abs(mean(once)));
}

TEST(OmegaPower, ReportsFailingStep) {
  PeriodicGrid g(32);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  // Omega sin 2s has a nonzero mean, so the second application must fail.
  const auto f = trig(g, [](double s) { return std::sin(2 * s) + std::cos(s); });
  try {
    omega_power(kappa, omega_op(kappa, f), 3);
    SUCCEED();
  } catch (const NonZeroMeanError& e) {
    EXPECT_GE(e.step(), 0);
  }
  try {
    omega_power(kappa, RealField::constant(g, 1.0), 2);
    FAIL();
  } catch (const NonZeroMeanError& e) {
    EXPECT_EQ(e.step(), 0);
  }
}

TEST(Gradient, ClosedFormsAndLenardRecursion) {
  PeriodicGrid g(64);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  EXPECT_EQ(gradient(kappa, 1), RealField::constant(g, 1.0));
  EXPECT_EQ(gradient(kappa, 2), kappa);
  const auto g3 = RealField::sample(g, [](double s) {
    const double k = 1 + 0.2 * std::cos(s);
    return 1.5 * k * k - 0.1 * std::cos(s);
  });
  EXPECT_LE(max_abs_diff(gradient(kappa, 3), g3), 1e-13);
  for (int m = 1; m <= 4; ++m)
    EXPECT_LE(max_abs_diff(ds(gradient(kappa, m + 1)), omega_d(kappa, gradient(kappa, m))), 1e-10) << m;
  EXPECT_THROW(gradient(kappa, 0), UnsupportedOrderError);
}

TEST(Gradient, MatchesFiniteDifferenceOfHamiltonians) {
  std::mt19937_64 rng(7);
  PeriodicGrid g(64);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  for (int m = 1; m <= 3; ++m) {
    const auto dk = random_field(g, rng, 8, 1.0);
    const double h = 1e-5;
    const double fd = (hamiltonian(kappa + h * dk, m) - hamiltonian(kappa - h * dk, m)) / (2 * h);
    EXPECT_NEAR(fd, integrate(gradient(kappa, m) * dk), 1e-8) << m;
  }
}

TEST(Hamiltonian, ValuesOnCircleAndSeed) {
  PeriodicGrid g(32);
  const auto one = RealField::constant(g, 1.0);
  EXPECT_NEAR(hamiltonian(one, 1), 2 * pi, 1e-13);
  EXPECT_NEAR(hamiltonian(one, 2), pi, 1e-13);
  EXPECT_NEAR(hamiltonian(one, 3), pi, 1e-13);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  EXPECT_NEAR(hamiltonian(kappa, 1), 2 * pi, 1e-13);
  EXPECT_NEAR(hamiltonian(kappa, 2), pi * 1.02, 1e-13);
  EXPECT_THROW(hamiltonian(kappa, 4), UnsupportedOrderError);
}

TEST(XnField, CircleAndSeed) {
  const auto c = circle(32);
  // alpha is constant, i.e. X_n only reparametrizes the circle. Higher n
  // differentiate the sampled curve more often, hence the looser bound.
  for (int n = 1; n <= 3; ++n) EXPECT_LE(max_abs(ds(xn_field(c, n).alpha)), 1e-8) << n;
  for (int n = 1; n <= 3; ++n)
    EXPECT_LE(max_abs(ds(xn_field(RealField::constant(c.grid(), 1.0), n).alpha)), 1e-14) << n;

  PeriodicGrid g(64);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  const auto a1 = xn_field(kappa, 1).alpha;
  EXPECT_LE(max_abs_diff(a1 - mean(a1), cosine(g, 0.0, 0.2, 1)), 1e-13);
  const auto a2 = xn_field(kappa, 2).alpha;
  const auto expected = RealField::sample(g, [](double s) { return 0.5 * std::cos(s) + 0.03 * std::cos(2 * s); });
  EXPECT_LE(max_abs_diff(a2 - mean(a2), expected), 1e-13);
  EXPECT_LE(max_abs_diff(ds(a2), omega_d(kappa, kappa)), 1e-12);
}

TEST(Tangent, EmbedExamples) {
  const auto c = circle(32);
  const auto& g = c.grid();
  const auto v1 = tangent_embed(c, {RealField::constant(g, 1.0)});
  EXPECT_LE(max_abs_diff(v1.x, ds(c.x)), 1e-14);
  EXPECT_LE(max_abs_diff(v1.y, ds(c.y)), 1e-14);
  EXPECT_LE(max_abs(tangent_embed(c, {RealField::constant(g, 0.0)})), 0.0);
  const auto v = tangent_embed(c, {trig(g, [](double s) { return std::sin(s); })});
  const auto ex = RealField::sample(g, [](double s) { return -0.5 * std::cos(s) * std::cos(s) - std::sin(s) * std::sin(s); });
  const auto ey = RealField::sample(g, [](double s) { return -0.5 * std::cos(s) * std::sin(s) + std::sin(s) * std::cos(s); });
  EXPECT_LE(max_abs_diff(v.x, ex), 1e-14);
  EXPECT_LE(max_abs_diff(v.y, ey), 1e-14);
}

TEST(Tangent, ExtractRoundTripAndRadialRejection) {
  std::mt19937_64 rng(11);
  const auto c = circle(64);
  const EcaCurve ellipse{2.0 * c.x, 0.5 * c.y};
  const auto alpha = random_field(c.grid(), rng, 8, 1.0, 0.5);
  EXPECT_LE(max_abs_diff(tangent_extract(ellipse, tangent_embed(ellipse, {alpha})).alpha, alpha), 1e-11);
  EXPECT_LE(max_abs_diff(tangent_extract(ellipse, {ds(ellipse.x), ds(ellipse.y)}).alpha,
                         RealField::constant(c.grid(), 1.0)),
            1e-12);
  EXPECT_THROW(tangent_extract(ellipse, ellipse.as_plane()), NotTangentError);

  // On a reconstructed curve the round trip is limited by det(gamma, gamma_s) - 1.
  const auto seed = closed_seed();
  const double defect = validate(seed.gamma).max_det_defect;
  const auto back = tangent_extract(seed.gamma, tangent_embed(seed.gamma, {alpha}));
  EXPECT_LE(max_abs_diff(back.alpha, alpha), 1e-11 + 2 * defect * max_abs(alpha));
  EXPECT_THROW(tangent_extract(seed.gamma, seed.gamma.as_plane()), NotTangentError);
}

TEST(Differential, ExamplesAndFiniteDifference) {
  PeriodicGrid g(64);
  const auto one = RealField::constant(g, 1.0);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  const EcaTangent t{trig(g, [](double s) { return std::sin(s); })};
  EXPECT_LE(std::abs(differential_h(one, 1, t)), 1e-13);
  EXPECT_NEAR(differential_h(kappa, 1, t), 0.2 * pi, 1e-13);

  std::mt19937_64 rng(5);
  for (int m = 1; m <= 3; ++m) {
    const EcaTangent r{random_field(g, rng, 8, 1.0, 0.3)};
    const auto dk = omega_d(kappa, r.alpha);
    const double h = 1e-5;
    const double fd = (hamiltonian(kappa + h * dk, m) - hamiltonian(kappa - h * dk, m)) / (2 * h);
    const double exact = differential_h(kappa, m, r);
    EXPECT_LE(std::abs(fd - exact), 1e-7 * (std::abs(exact) + differential_scale(kappa, m, r))) << m;
  }
}

TEST(Omega0, Examples) {
  PeriodicGrid g(32);
  const EcaTangent s{trig(g, [](double x) { return std::sin(x); })};
  const EcaTangent c{trig(g, [](double x) { return std::cos(x); })};
  EXPECT_NEAR(omega0(s, c), -pi, 1e-13);
  EXPECT_LE(std::abs(omega0(c, c)), 1e-12);
  EXPECT_LE(std::abs(omega0({RealField::constant(g, 1.0)}, c)), 1e-14);
}

TEST(OmegaK, CircleExamples) {
  PeriodicGrid g(32);
  const auto one = RealField::constant(g, 1.0);
  const EcaTangent s{trig(g, [](double x) { return std::sin(x); })};
  const EcaTangent c{trig(g, [](double x) { return std::cos(x); })};
  EXPECT_NEAR(omega_k(one, s, c, 1), -1.5 * pi, 1e-12);
  EXPECT_NEAR(omega_k(one, s, c, 2, {{2 * pi}}), -2.25 * pi, 1e-12);
}

TEST(OmegaK, RejectsNonLevelTangentSecondArgument) {
  PeriodicGrid g(64);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  const EcaTangent s{trig(g, [](double x) { return std::sin(x); })};
  try {
    omega_k(kappa, s, s, 2, {{hamiltonian(kappa, 1)}});
    FAIL();
  } catch (const NotLevelTangentError& e) {
    EXPECT_EQ(e.order(), 1);
  }
}

TEST(AntiderivativeTransfer, Examples) {
  PeriodicGrid g(64);
  const auto one = RealField::constant(g, 1.0);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  const auto s = trig(g, [](double x) { return std::sin(x); });
  const auto c = trig(g, [](double x) { return std::cos(x); });
  EXPECT_LE(lemma31_residual(one, s, c), 1e-12);
  const auto s2 = trig(g, [](double x) { return std::sin(2 * x); });
  const auto c3 = trig(g, [](double x) { return std::cos(3 * x); });
  EXPECT_LE(lemma31_residual(kappa, s2, c3), 1e-10);
  EXPECT_LE(lemma31_residual(kappa, s2, s2), 1e-10);
}

TEST(ProjectLevelTangent, Examples) {
  PeriodicGrid g(64);
  const auto one = RealField::constant(g, 1.0);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  const EcaTangent s{trig(g, [](double x) { return std::sin(x); })};
  const EcaTangent c{trig(g, [](double x) { return std::cos(x); })};
  EXPECT_EQ(project_level_tangent(one, s, {{2 * pi}}).alpha, s.alpha);
  EXPECT_LE(max_abs_diff(project_level_tangent(kappa, c, {{2 * pi}}).alpha, c.alpha), 1e-13);
  const auto p = project_level_tangent(kappa, s, {{2 * pi}});
  EXPECT_LE(std::abs(differential_h(kappa, 1, p)), 1e-10);
  const auto p2 = project_level_tangent(kappa, s, {{2 * pi, pi * 1.02}});
  EXPECT_LE(std::abs(differential_h(kappa, 1, p2)), 1e-10);
  EXPECT_LE(std::abs(differential_h(kappa, 2, p2)), 1e-10);
}

TEST(Bracket, Examples) {
  PeriodicGrid g(64);
  const auto kappa = cosine(g, 1.0, 0.2, 1);
  const auto one = RealField::constant(g, 1.0);
  EXPECT_LE(std::abs(bracket_k(kappa, one, kappa, 1)), 1e-12);
  EXPECT_LE(std::abs(bracket_k(kappa, kappa, kappa, 1)), 1e-10);
  EXPECT_LE(std::abs(bracket_k(kappa, gradient(kappa, 2), gradient(kappa, 3), 1)), 1e-9);
  std::mt19937_64 rng(3);
  const auto f = random_field(g, rng, 8, 1.0, 0.2);
  const auto h = random_field(g, rng, 8, 1.0, -0.4);
  EXPECT_LE(std::abs(bracket_k(kappa, f, h, 1) + bracket_k(kappa, h, f, 1)), 1e-10);
  EXPECT_LE(std::abs(bracket_k(kappa, f, h, 0) + bracket_k(kappa, h, f, 0)), 1e-12);
}

TEST(Sl2, ApplyAndTangentExamples) {
  const auto c = circle(32);
  const auto& g = c.grid();
  EXPECT_EQ(sl2_apply(Mat2{}, c).x, c.x);
  EXPECT_THROW(sl2_apply(Mat2{2, 0, 0, 2}, c), NotUnimodularError);
  EXPECT_THROW(sl2_tangent(Mat2{1, 0, 0, 1}, c), NotTraceFreeError);
  EXPECT_LE(max_abs(sl2_tangent(Mat2{0, 0, 0, 0}, c).alpha), 0.0);
  // [[0,1],[-1,0]] turns clockwise, so det(gamma, A gamma) = -1.
  EXPECT_LE(max_abs_diff(sl2_tangent(Mat2{0, 1, -1, 0}, c).alpha, RealField::constant(g, -1.0)), 1e-14);
  EXPECT_LE(max_abs_diff(sl2_tangent(Mat2{1, 0, 0, -1}, c).alpha, trig(g, [](double s) { return -std::sin(2 * s); })),
            1e-14);
}

TEST(FromCurvature, CircleAndAntiperiodicCase) {
  PeriodicGrid g(64);
  const auto gamma = from_curvature(RealField::constant(g, 1.0));
  EXPECT_LE(max_abs_diff(gamma.x, trig(g, [](double s) { return std::cos(s); })), 1e-9);
  EXPECT_LE(max_abs_diff(gamma.y, trig(g, [](double s) { return std::sin(s); })), 1e-9);
  try {
    from_curvature(RealField::constant(g, 0.25));
    FAIL();
  } catch (const NotClosedError& e) {
    EXPECT_NEAR(e.monodromy()[0], -1.0, 1e-9);
    EXPECT_NEAR(e.monodromy()[1], 0.0, 1e-9);
    EXPECT_NEAR(e.monodromy()[2], 0.0, 1e-9);
    EXPECT_NEAR(e.monodromy()[3], -1.0, 1e-9);
  }
}

TEST(FromCurvature, SmallThirdModeIsNotClosedButUnimodular) {
  PeriodicGrid g(96);
  const auto kappa = cosine(g, 1.0, 0.01, 3);
  const auto sol = hill_solve(kappa);
  EXPECT_NEAR(sol.monodromy.det(), 1.0, 1e-10);
  try {
    const auto gamma = from_curvature(kappa);
    EXPECT_LE(max_abs_diff(curvature(gamma), kappa), 1e-8);
  } catch (const NotClosedError& e) {
    const auto& m = e.monodromy();
    EXPECT_NEAR(m[0] * m[3] - m[1] * m[2], 1.0, 1e-10);
  }
}

TEST(FromCurvature, ClosingShiftRoundTrip) {
  for (std::size_t n : {64u, 128u}) {
    const auto seed = closed_seed(n);
    EXPECT_LE(validate(seed.gamma).max_det_defect, 1e-9);
    EXPECT_LE(max_abs_diff(curvature(seed.gamma), seed.kappa), 1e-8) << n;
  }
}

// ---------------------------------------------------------------------------
// Properties

class EcaProperties : public ::testing::TestWithParam<int> {
 protected:
  PeriodicGrid grid{128};
  RealField kappa = cosine(grid, 1.0, 0.2, 1);
  std::mt19937_64 rng{static_cast<std::uint64_t>(500 + GetParam())};
  EcaTangent random_tangent() { return {random_field(grid, rng, 10, 1.0, 0.5)}; }
};

TEST_P(EcaProperties, SkewSymmetry) {
  const LevelSetSpec level{{hamiltonian(kappa, 1), hamiltonian(kappa, 2)}};
  auto t1 = project_level_tangent(kappa, random_tangent(), level);
  auto t2 = project_level_tangent(kappa, random_tangent(), level);
  for (int k = 0; k <= 3; ++k) {
    const double a = omega_k(kappa, t1, t2, k, level);
    const double b = omega_k(kappa, t2, t1, k, level);
    const double scale = pair_scale(t1.alpha, omega_power_tangent(kappa, t2.alpha, k).value);
    EXPECT_LE(std::abs(a + b), 1e-10 * scale) << "k=" << k;
  }
}

TEST_P(EcaProperties, HamiltonianPairingOmega0) {
  const auto t = random_tangent();
  for (int n = 1; n <= 3; ++n) {
    const auto x = xn_field(kappa, n);
    const double scale = 1 + differential_scale(kappa, n, t);
    EXPECT_LE(std::abs(differential_h(kappa, n, t) - omega0(x, t)), 1e-9 * scale) << n;
  }
}

TEST_P(EcaProperties, HamiltonianPairingOmegaK) {
  for (int k = 1; k <= 2; ++k) {
    LevelSetSpec level;
    for (int j = 1; j < k; ++j) level.constants.push_back(hamiltonian(kappa, j));
    const auto t = project_level_tangent(kappa, random_tangent(), level);
    for (int n = 1; n <= 2; ++n) {
      const auto x = xn_field(kappa, n);
      const double scale = 1 + differential_scale(kappa, n + k, t);
      EXPECT_LE(std::abs(differential_h(kappa, n + k, t) - omega_k(kappa, x, t, k, level)), 1e-9 * scale)
          << "n=" << n << " k=" << k;
    }
  }
}

TEST_P(EcaProperties, LevelSetIntegralsVanish) {
  for (int m = 1; m <= 2; ++m) {
    LevelSetSpec level;
    for (int j = 1; j <= m; ++j) level.constants.push_back(hamiltonian(kappa, j));
    const auto t = project_level_tangent(kappa, random_tangent(), level);
    for (int j = 1; j <= m; ++j) {
      const auto w = omega_power_tangent(kappa, t.alpha, j).value;
      EXPECT_LE(std::abs(integrate(w)), 1e-9 * (1 + integrate(abs(w)))) << m << " " << j;
    }
  }
}

TEST_P(EcaProperties, AntiderivativeTransfer) {
  // D^{-1} Omega D alpha needs dH_1(alpha) = 0.
  const auto a = project_level_tangent(kappa, random_tangent(), {{hamiltonian(kappa, 1)}}).alpha;
  const auto b = random_tangent().alpha;
  EXPECT_LE(lemma31_residual(kappa, a, b), 1e-10 * pair_scale(a, omega_d(kappa, b)));
}

TEST_P(EcaProperties, MomentMaps) {
  const EcaTangent rep{RealField::constant(grid, 1.0)};
  const auto t = random_tangent();
  EXPECT_LE(std::abs(omega_k(kappa, rep, t, 1) - differential_h(kappa, 1, t)),
            1e-9 * (1 + differential_scale(kappa, 1, t)));
  for (int m = 1; m <= 2; ++m) {
    LevelSetSpec level;
    for (int j = 1; j <= m; ++j) level.constants.push_back(hamiltonian(kappa, j));
    const auto tl = project_level_tangent(kappa, random_tangent(), level);
    EXPECT_LE(std::abs(omega_k(kappa, rep, tl, m + 1, level) - differential_h(kappa, m + 1, tl)),
              1e-9 * (1 + differential_scale(kappa, m + 1, tl)))
        << m;
  }
}

INSTANTIATE_TEST_SUITE_P(Random, EcaProperties, ::testing::Range(0, 5));

class ClosedCurveProperties : public ::testing::TestWithParam<int> {
 protected:
  ClosedSeed seed = closed_seed(64);
  std::mt19937_64 rng{static_cast<std::uint64_t>(900 + GetParam())};
};

TEST_P(ClosedCurveProperties, Sl2DirectionsAreInTheKernelOfOmega1) {
  const auto& g = seed.kappa.grid();
  const EcaTangent t{random_field(g, rng, 8, 1.0, 0.2)};
  const double a = testing_support::unit(rng) - 0.5, b = testing_support::unit(rng) - 0.5,
               c = testing_support::unit(rng) - 0.5;
  const auto x = sl2_tangent(Mat2{a, b, c, -a}, seed.gamma);
  EXPECT_LE(std::abs(omega_k(seed.kappa, x, t, 1)), 1e-9 * pair_scale(x.alpha, omega_d(seed.kappa, t.alpha)));
}

TEST_P(ClosedCurveProperties, CurvatureIsSl2AndShiftInvariant) {
  const double a = 2 * testing_support::unit(rng) - 1, b = 2 * testing_support::unit(rng) - 1,
               c = 2 * testing_support::unit(rng) - 1;
  const double d = (1 + b * c) / (std::abs(a) < 0.1 ? 0.1 : a);
  const double aa = std::abs(a) < 0.1 ? 0.1 : a;
  const auto moved = sl2_apply(Mat2{aa, b, c, d}, seed.gamma);
  EXPECT_LE(max_abs_diff(curvature(moved), curvature(seed.gamma)), 1e-10 * (1 + max_abs(seed.kappa)) * 100);
  const double sigma = testing_support::unit(rng) * 6;
  EXPECT_LE(max_abs_diff(curvature(s1_apply(sigma, seed.gamma)), shift(curvature(seed.gamma), sigma)), 1e-10);
}

TEST_P(ClosedCurveProperties, PhiFormulationMatchesOmegaPowers) {
  const LevelSetSpec level{{hamiltonian(seed.kappa, 1)}};
  const auto& g = seed.kappa.grid();
  const auto t1 = project_level_tangent(seed.kappa, {random_field(g, rng, 8, 1.0, 0.3)}, level);
  const auto t2 = project_level_tangent(seed.kappa, {random_field(g, rng, 8, 1.0, -0.2)}, level);
  const double scale = pair_scale(t1.alpha, omega_power_tangent(seed.kappa, t2.alpha, 2).value);
  EXPECT_LE(std::abs(phi_form(seed.gamma, t1, t2, 1) - omega_k(seed.kappa, t1, t2, 2, level)), 1e-9 * scale);
  EXPECT_LE(std::abs(phi_form(seed.gamma, t1, t2, 0) - omega_k(seed.kappa, t1, t2, 1)), 1e-9 * scale);
  EXPECT_LE(std::abs(phi_form(seed.gamma, t1, t2, -1) - omega0(t1, t2)), 1e-9 * scale);
}

INSTANTIATE_TEST_SUITE_P(Random, ClosedCurveProperties, ::testing::Range(0, 5));
