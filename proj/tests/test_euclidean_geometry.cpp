#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "kdvcurve/euclidean_geometry.hpp"
#include "support.hpp"

using namespace kdvcurve;
using namespace kdvcurve::euc;
using testing_support::cosine;
using testing_support::random_field;

namespace {

constexpr double pi = std::numbers::pi;

EucCurve circle(std::size_t n, double orientation = 1.0) {
  PeriodicGrid g(n);
  return {RealField::sample(g, [](double s) { return std::cos(s); }),
          RealField::sample(g, [=](double s) { return orientation * std::sin(s); })};
}

RealField trig(const PeriodicGrid& g, double (*f)(double)) { return RealField::sample(g, f); }

double scale_of(const RealField& a, const RealField& b) { return 1.0 + integrate(abs(a) * abs(b)); }

}  // namespace

TEST(Curvature, CirclesAndOrientation) {
  const auto ccw = circle(32);
  const auto& g = ccw.grid();
  EXPECT_LE(max_abs_diff(curvature(ccw), RealField::constant(g, 1.0)), 1e-13);
  EXPECT_LE(max_abs_diff(curvature(circle(32, -1.0)), RealField::constant(g, -1.0)), 1e-13);
  const auto moved = e2_apply(Mat2{}, 3.0, -2.0, ccw);
  EXPECT_LE(max_abs_diff(curvature(moved), RealField::constant(g, 1.0)), 1e-13);
  EXPECT_TRUE(validate(ccw).ok);
  EXPECT_FALSE(validate({2.0 * ccw.x, 2.0 * ccw.y}).ok);
}

TEST(OmegaHat, SingleModesOnCircle) {
  PeriodicGrid g(32);
  const auto one = RealField::constant(g, 1.0);
  EXPECT_LE(max_abs(omega_hat_op(one, trig(g, [](double s) { return std::cos(s); }))), 1e-13);
  const auto c2 = trig(g, [](double s) { return std::cos(2 * s); });
  EXPECT_LE(max_abs_diff(omega_hat_op(one, c2), -1.5 * c2), 1e-13);
  EXPECT_THROW(omega_hat_op(one, one), NonZeroMeanError);
}

TEST(OmegaHat, MkdvExpansion) {
  // With D^{-1}(khat khat_s) = khat^2/2 this is (1/2) khat_sss + (3/4) khat^2 khat_s.
  PeriodicGrid g(64);
  const double e = 0.2;
  const auto khat = cosine(g, 1.0, e, 1);
  const auto expected = RealField::sample(g, [e](double s) {
    return -0.25 * e * std::sin(s) - 0.75 * e * e * std::sin(2 * s) -
           0.75 * e * e * e * std::sin(s) * std::cos(s) * std::cos(s);
  });
  EXPECT_LE(max_abs_diff(omega_hat_exact(khat, ds(khat), 0.5 * khat * khat), expected), 1e-12);
  EXPECT_LE(max_abs_diff(mkdv_rhs(khat, 1), expected), 1e-12);
  // The mean-zero antiderivative shifts the result along khat_s.
  const double shift_coeff = -0.25 * mean(khat * khat);
  EXPECT_LE(max_abs_diff(omega_hat_op(khat, ds(khat)), expected + shift_coeff * ds(khat)), 1e-12);
}

TEST(XhatField, CircleAndSeed) {
  PeriodicGrid g(64);
  for (int n = 1; n <= 3; ++n) {
    const auto x = xhat_field(RealField::constant(g, 1.0), n);
    EXPECT_LE(max_abs(x.mu), 1e-15);
    EXPECT_LE(max_abs(ds(x.lambda)), 1e-15);
  }
  const auto khat = cosine(g, 1.0, 0.2, 1);
  const auto x1 = xhat_field(khat, 1);
  EXPECT_LE(max_abs_diff(x1.mu, trig(g, [](double s) { return -0.1 * std::sin(s); })), 1e-14);
  const auto k2 = khat * khat;
  EXPECT_LE(max_abs_diff(x1.lambda - mean(x1.lambda), 0.25 * (k2 - mean(k2))), 1e-14);
  for (int n = 1; n <= 3; ++n) EXPECT_LE(tangency_residual(khat, xhat_field(khat, n)), 1e-10) << n;
}

TEST(XhatField, NormalComponentsFollowTheRecursion) {
  // mu_{n+1} = (1/2) Omega_hat^n khat_s = (1/2) khat_t under X_hat_n.
  PeriodicGrid g(64);
  const auto khat = cosine(g, 1.0, 0.2, 1);
  for (int n = 1; n <= 3; ++n)
    EXPECT_LE(max_abs_diff(0.5 * curvature_velocity(khat, xhat_field(khat, n)), xhat_field(khat, n + 1).mu), 1e-12)
        << n;
  const auto x2 = xhat_field(khat, 2);
  EXPECT_LE(max_abs_diff(ds(x2.lambda), khat * x2.mu), 1e-11);
}

TEST(HamiltonianHat, Values) {
  PeriodicGrid g(32);
  const auto one = RealField::constant(g, 1.0);
  EXPECT_NEAR(hamiltonian_hat(one, 1), pi / 2, 1e-14);
  EXPECT_NEAR(hamiltonian_hat(one, 2), pi / 16, 1e-14);
  EXPECT_NEAR(hamiltonian_hat(one, 3), pi / 64, 1e-14);
  EXPECT_NEAR(hamiltonian_hat(cosine(g, 1.0, 0.2, 1), 1), pi / 2 + 0.01 * pi, 1e-14);
  const auto zero = RealField::constant(g, 0.0);
  for (int m = 1; m <= 3; ++m) EXPECT_EQ(hamiltonian_hat(zero, m), 0.0);
  EXPECT_THROW(hamiltonian_hat(one, 4), UnsupportedOrderError);
}

TEST(GradientHat, MatchesFiniteDifference) {
  std::mt19937_64 rng(17);
  PeriodicGrid g(64);
  const auto khat = cosine(g, 1.0, 0.2, 1);
  for (int m = 1; m <= 3; ++m) {
    const auto dk = random_field(g, rng, 8, 1.0);
    const double h = 1e-5;
    const double fd = (hamiltonian_hat(khat + h * dk, m) - hamiltonian_hat(khat - h * dk, m)) / (2 * h);
    EXPECT_NEAR(fd, integrate(gradient_hat(khat, m) * dk), 1e-8) << m;
  }
}

TEST(OmegaHatK, CircleExamples) {
  PeriodicGrid g(32);
  const auto one = RealField::constant(g, 1.0);
  const EucTangent t1{trig(g, [](double s) { return 0.5 * std::sin(2 * s) + 1.0; }),
                      trig(g, [](double s) { return std::cos(2 * s); })};
  const EucTangent t2{trig(g, [](double s) { return -0.5 * std::cos(2 * s); }),
                      trig(g, [](double s) { return std::sin(2 * s); })};
  EXPECT_NEAR(omega_hat_k(one, t1, t2, 0), -1.5 * pi, 1e-13);
  EXPECT_NEAR(omega_hat_k(one, t1, t2, 1), 2.25 * pi, 1e-12);
  for (int k = 0; k <= 2; ++k) EXPECT_LE(std::abs(omega_hat_k(one, t1, t1, k, {{pi / 2}})), 1e-10) << k;
}

TEST(Tangent, FromMuEmbedExtract) {
  std::mt19937_64 rng(23);
  const auto gamma = from_curvature(cosine(PeriodicGrid(128), 1.0, 0.2, 2));
  const auto khat = curvature(gamma);
  const auto t = tangent_from_mu(khat, random_field(khat.grid(), rng, 8, 1.0), 0.3);
  EXPECT_LE(tangency_residual(khat, t), 1e-12);
  EXPECT_NEAR(mean(t.lambda), 0.3, 1e-14);
  const auto back = tangent_extract(gamma, tangent_embed(gamma, t));
  EXPECT_LE(max_abs_diff(back.lambda, t.lambda), 1e-10);
  EXPECT_LE(max_abs_diff(back.mu, t.mu), 1e-10);
  EXPECT_THROW(tangent_extract(gamma, gamma.as_plane()), NotTangentError);
}

TEST(FromCurvature, CircleHalfIndexAndRoundTrip) {
  PeriodicGrid g(64);
  const auto c = from_curvature(RealField::constant(g, 1.0));
  EXPECT_LE(max_abs_diff(c.x * c.x + c.y * c.y, RealField::constant(g, 1.0)), 1e-13);
  try {
    from_curvature(RealField::constant(g, 0.5));
    FAIL();
  } catch (const NotClosedError& e) {
    EXPECT_NEAR(e.rotation_defect(), 0.5, 1e-14);
  }
  EXPECT_THROW(from_curvature(cosine(g, 1.0, 0.2, 1)), NotClosedError);
  const auto khat = cosine(PeriodicGrid(128), 1.0, 0.3, 2);
  const auto gamma = from_curvature(khat);
  EXPECT_LE(validate(gamma).max_speed_defect, 1e-12);
  EXPECT_LE(max_abs_diff(curvature(gamma), khat), 1e-8);
}

TEST(E2, Actions) {
  const auto c = from_curvature(cosine(PeriodicGrid(64), 1.0, 0.2, 2));
  const auto k = curvature(c);
  EXPECT_EQ(e2_apply(Mat2{}, 0, 0, c).x, c.x);
  EXPECT_LE(max_abs_diff(curvature(e2_apply(Mat2{0, -1, 1, 0}, 1, 2, c)), k), 1e-12);
  EXPECT_LE(max_abs_diff(curvature(e2_apply(Mat2{1, 0, 0, -1}, 0, 0, c)), -1.0 * k), 1e-12);
  EXPECT_THROW(e2_apply(Mat2{1, 1, 0, 1}, 0, 0, c), NotOrthogonalError);
}

TEST(Stationarity, ConstantCurvatureIsFixed) {
  PeriodicGrid g(32);
  for (double c : {0.5, 1.0, 2.0})
    for (int n = 1; n <= 3; ++n) EXPECT_EQ(max_abs(mkdv_rhs(RealField::constant(g, c), n)), 0.0);
}

// ---------------------------------------------------------------------------
// Properties on a closed curve.

class EucProperties : public ::testing::TestWithParam<int> {
 protected:
  EucCurve gamma = from_curvature(cosine(PeriodicGrid(128), 1.0, 0.2, 2));
  RealField khat = curvature(gamma);
  std::mt19937_64 rng{static_cast<std::uint64_t>(700 + GetParam())};
  EucTangent random_tangent() {
    return tangent_from_mu(khat, random_field(khat.grid(), rng, 8, 1.0), 2 * testing_support::unit(rng) - 1);
  }
};

TEST_P(EucProperties, SkewSymmetry) {
  const LevelSetSpec level{{hamiltonian_hat(khat, 1)}};
  const auto t1 = project_level_tangent_hat(khat, random_tangent(), level);
  const auto t2 = project_level_tangent_hat(khat, random_tangent(), level);
  EXPECT_LE(std::abs(differential_hat(khat, 1, t1)), 1e-9 * (1 + differential_hat_scale(khat, 1, t1)));
  for (int k = 0; k <= 2; ++k) {
    const double a = omega_hat_k(khat, t1, t2, k, level);
    const double b = omega_hat_k(khat, t2, t1, k, level);
    const double scale = scale_of(khat * t1.lambda + ds(t1.mu), omega_hat_power_tangent(khat, t2, k).value);
    EXPECT_LE(std::abs(a + b), 1e-10 * scale) << k;
  }
}

TEST_P(EucProperties, HamiltonianPairingAgainstFiniteDifferences) {
  const auto t = random_tangent();
  const std::pair<int, int> cases[] = {{1, 0}, {2, 0}, {3, 0}, {1, 1}, {2, 1}};
  for (auto [n, k] : cases) {
    const auto x = xhat_field(khat, n);
    const double form = omega_hat_k(khat, x, t, k);
    const double exact = differential_hat(khat, n + k, t);
    const double fd = differential_hat_fd(gamma, n + k, t);
    const double scale = 1 + differential_hat_scale(khat, n + k, t);
    EXPECT_LE(std::abs(form - exact), 1e-9 * scale) << n << "," << k;
    EXPECT_LE(std::abs(fd - exact), 1e-7 * scale) << n << "," << k;
  }
}

TEST_P(EucProperties, KernelAndMomentMap) {
  const auto t = random_tangent();
  const EucTangent rep{RealField::constant(khat.grid(), 1.0), RealField::constant(khat.grid(), 0.0)};
  EXPECT_LE(std::abs(omega_hat_k(khat, t, rep, 0)), 1e-10);
  EXPECT_LE(std::abs(omega_hat_k(khat, rep, t, 1) - differential_hat(khat, 1, t)),
            1e-9 * (1 + differential_hat_scale(khat, 1, t)));
}

TEST_P(EucProperties, LevelProjection) {
  const LevelSetSpec level{{hamiltonian_hat(khat, 1), hamiltonian_hat(khat, 2)}};
  const auto t = project_level_tangent_hat(khat, random_tangent(), level);
  EXPECT_LE(tangency_residual(khat, t), 1e-10);
  for (int j = 1; j <= 2; ++j)
    EXPECT_LE(std::abs(differential_hat(khat, j, t)), 1e-10 * (1 + differential_hat_scale(khat, j, t)));
}

TEST_P(EucProperties, CurvatureInvariance) {
  const double angle = 6 * testing_support::unit(rng);
  const Mat2 r{std::cos(angle), -std::sin(angle), std::sin(angle), std::cos(angle)};
  const auto moved = e2_apply(r, testing_support::unit(rng), -testing_support::unit(rng), gamma);
  EXPECT_LE(max_abs_diff(curvature(moved), khat), 1e-10);
  const double sigma = 6 * testing_support::unit(rng);
  EXPECT_LE(max_abs_diff(curvature(s1_apply(sigma, gamma)), shift(khat, sigma)), 1e-10);
}

INSTANTIATE_TEST_SUITE_P(Random, EucProperties, ::testing::Range(0, 5));
