#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>

#include "chainmi/error.hpp"
#include "chainmi/psi_envelope.hpp"

using namespace chainmi;

namespace {

PsiEnvelope quadratic(double sigma2) {
  return PsiEnvelope::general([sigma2](double l) { return 0.5 * sigma2 * l * l; });
}

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an Error";
  return Errc::InvalidArgument;
}

}  // namespace

TEST(PsiStar, Examples) {
  const auto sg = PsiEnvelope::subgaussian(1.0);
  EXPECT_DOUBLE_EQ(psi_star(sg, 2.0), 2.0);
  EXPECT_EQ(psi_star(sg, 0.0), 0.0);
  EXPECT_EQ(psi_star(quadratic(1.0), 0.0), 0.0);
  EXPECT_NEAR(psi_star(quadratic(1.0), 2.0), 2.0, 1e-8);
}

TEST(PsiStarInverse, Examples) {
  const auto sg = PsiEnvelope::subgaussian(1.0);
  EXPECT_DOUBLE_EQ(psi_star_inverse(sg, 0.5), 1.0);
  EXPECT_EQ(psi_star_inverse(sg, 0.0), 0.0);
  EXPECT_NEAR(psi_star_inverse(quadratic(4.0), 2.0), 4.0, 1e-8);
  EXPECT_TRUE(std::isinf(psi_star_inverse(sg, INFINITY)));
  EXPECT_EQ(code_of([&] { psi_star_inverse(sg, -1.0); }), Errc::OutOfRange);
}

TEST(PsiStarInverse, GeneralMatchesClosedFormOnGrid) {
  for (double s2 : {0.25, 1.0, 3.0, 10.0}) {
    const auto env = quadratic(s2);
    for (double y : {1e-4, 0.01, 0.3, 1.0, 2.5, 7.0, 40.0}) {
      EXPECT_NEAR(psi_star_inverse(env, y), std::sqrt(2.0 * s2 * y), 1e-8) << s2 << " " << y;
    }
  }
}

TEST(PsiStarInverse, RoundTrip) {
  const PsiEnvelope envs[] = {PsiEnvelope::subgaussian(2.0), quadratic(2.0),
                              PsiEnvelope::general([](double l) { return std::cosh(l) - 1.0; }, 50.0)};
  for (const auto& env : envs) {
    for (double x = 0.0; x <= 5.0; x += 0.25) {
      EXPECT_NEAR(psi_star_inverse(env, psi_star(env, x)), x, 1e-7) << x;
    }
  }
}

TEST(Envelope, RejectsInvalidShapes) {
  EXPECT_EQ(code_of([] { PsiEnvelope::subgaussian(0.0); }), Errc::InvalidEnvelope);
  EXPECT_EQ(code_of([] { PsiEnvelope::general([](double l) { return l + 1.0; }); }), Errc::InvalidEnvelope);
  EXPECT_EQ(code_of([] { PsiEnvelope::general([](double l) { return std::sqrt(l); }); }), Errc::InvalidEnvelope);
  EXPECT_EQ(code_of([] { PsiEnvelope::from_grid({{0, 0}, {1, 2}, {2, 3}}); }), Errc::InvalidEnvelope);
  EXPECT_EQ(code_of([] { PsiEnvelope::from_grid({{0, 1}, {1, 2}}); }), Errc::InvalidEnvelope);
}

TEST(Envelope, GridDualAndDomainCap) {
  // psi(l) = max(0, 2(l - 1)) piecewise: slopes 0 then 2.
  const auto env = PsiEnvelope::from_grid({{0, 0}, {1, 0}, {2, 2}}, 100.0);
  EXPECT_DOUBLE_EQ(env(1.5), 1.0);
  EXPECT_DOUBLE_EQ(env(3.0), 4.0);
  // For 0 < x < 2 the supremum sits at the kink: psi*(x) = x.
  EXPECT_NEAR(psi_star(env, 1.0), 1.0, 1e-9);
  EXPECT_EQ(code_of([&] { psi_star(env, 3.0); }), Errc::DomainCapReached);
}

TEST(Envelope, ScaledMatchesVarianceChange) {
  const auto env = quadratic(1.0).scaled(4.0);
  EXPECT_NEAR(psi_star_inverse(env, 2.0), std::sqrt(2.0 * 4.0 * 2.0), 1e-8);
}

TEST(Chernoff, GaussianTailWithinDualBound) {
  std::mt19937_64 rng(77);
  for (double s2 : {0.5, 1.0, 2.0}) {
    std::normal_distribution<double> normal(0.0, std::sqrt(s2));
    const auto env = PsiEnvelope::subgaussian(s2);
    const int n = 100000;
    std::vector<double> xs(n);
    for (double& x : xs) x = normal(rng);
    for (double x : {0.0, 0.5, 1.0, 2.0, 3.0}) {
      double hits = 0;
      for (double v : xs) hits += v >= x ? 1.0 : 0.0;
      const double freq = hits / n;
      const double se = std::sqrt(freq * (1 - freq) / n);
      EXPECT_LE(freq, std::exp(-psi_star(env, x)) + 3.0 * se) << s2 << " " << x;
    }
  }
}
