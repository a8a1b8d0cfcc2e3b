#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "lqsd/errors.hpp"
#include "lqsd/levy_model.hpp"
#include "lqsd/spectral.hpp"
#include "oracles.hpp"

using namespace lqsd;

namespace {

LevyModel mero() { return LevyModel::meromorphic(-1.0, 0.5, {{2.0, 2.0}, {3.0, 3.0}}); }
LevyModel mero_bv() { return LevyModel::meromorphic(-1.0, 0.0, {{2.0, 2.0}, {3.0, 3.0}}); }

std::vector<LevyModel> all_models() {
  return {LevyModel::bm_drift(1.0, 1.0), LevyModel::cp_exp_drift(2.0, 1.0, 1.0),
          LevyModel::cp_exp_drift(1.0, 1.0, 4.0), mero(), mero_bv()};
}

}  // namespace

TEST(Psi, ClosedFormValues) {
  EXPECT_DOUBLE_EQ(psi(LevyModel::bm_drift(1.0, 1.0), 1.0).value(), 1.5);
  EXPECT_DOUBLE_EQ(psi(LevyModel::cp_exp_drift(2.0, 1.0, 1.0), 1.0).value(), 1.5);
  EXPECT_DOUBLE_EQ(psi(LevyModel::bm_drift(1.0, 1.0), -5.0).value(), 7.5);
  for (const auto& m : all_models()) EXPECT_EQ(psi(m, 0.0).value(), 0.0);
}

TEST(Psi, InfiniteBeyondMomentBoundary) {
  const auto cp = LevyModel::cp_exp_drift(2.0, 1.0, 1.0);
  EXPECT_TRUE(psi(cp, -1.0).is_infinite());
  EXPECT_TRUE(psi(cp, -3.0).is_infinite());
  EXPECT_TRUE(psi(cp, -0.999).is_finite());
  EXPECT_TRUE(psi(mero(), -2.0).is_infinite());
  EXPECT_TRUE(std::isinf(LevyModel::bm_drift(1.0, 1.0).moment_boundary()));
  EXPECT_EQ(mero().moment_boundary(), 2.0);
}

TEST(Psi, MeromorphicMatchesDisplayedFormula) {
  const std::vector<oracle::Atom> atoms{{2.0, 2.0}, {3.0, 3.0}};
  for (double sigma : {0.0, 0.5}) {
    const auto m = LevyModel::meromorphic(-1.0, sigma, {{2.0, 2.0}, {3.0, 3.0}});
    for (double b : {-1.9, -1.0, -0.3, 0.2, 1.0, 7.5}) {
      const double expect = oracle::mero_psi(-1.0, sigma, atoms, b);
      EXPECT_NEAR(psi(m, b).value(), expect, 1e-13 * std::max(1.0, std::abs(expect))) << b;
    }
  }
}

TEST(Psi, DerivativesMatchFiniteDifferences) {
  for (const auto& m : all_models()) {
    for (double b : {-0.5, 0.0, 0.7, 2.0}) {
      const double h = 1e-4;
      const auto f = [&](double x) { return psi(m, x).value(); };
      const double d1 = (f(b + h) - f(b - h)) / (2 * h);
      const double d2 = (f(b + h) - 2 * f(b) + f(b - h)) / (h * h);
      const auto g = [&](double x) { return psi_derivative(m, x, 1); };
      const double d3 = (g(b + h) - 2 * g(b) + g(b - h)) / (h * h);
      EXPECT_NEAR(psi_derivative(m, b, 1), d1, 1e-7 * std::max(1.0, std::abs(d1)));
      EXPECT_NEAR(psi_derivative(m, b, 2), d2, 1e-4 * std::max(1.0, std::abs(d2)));
      EXPECT_NEAR(psi_derivative(m, b, 3), d3, 1e-4 * std::max(1.0, std::abs(d3)));
    }
  }
}

TEST(Psi, DerivativeOutsideDomainThrows) {
  EXPECT_THROW(psi_derivative(LevyModel::cp_exp_drift(2.0, 1.0, 1.0), -1.0, 1), DomainError);
  EXPECT_THROW(psi_derivative(LevyModel::bm_drift(1.0, 1.0), 0.0, 4), DomainError);
}

TEST(Psi, ConvexOnDomain) {
  std::mt19937_64 gen(7);
  for (const auto& m : all_models()) {
    const double r = std::min(m.moment_boundary(), 5.0);
    std::uniform_real_distribution<double> u(-0.999 * r, 10.0);
    for (int i = 0; i < 500; ++i) {
      const double a = u(gen);
      const double b = u(gen);
      const double mid = psi(m, 0.5 * (a + b)).value();
      const double avg = 0.5 * (psi(m, a).value() + psi(m, b).value());
      EXPECT_LE(mid, avg + 1e-12 * std::max(1.0, std::abs(avg)));
    }
  }
}

TEST(Validate, Classification) {
  const auto bm = validate(LevyModel::bm_drift(1.0, 1.0));
  EXPECT_EQ(bm.condition, PathCondition::kGaussian);
  EXPECT_TRUE(bm.qsd_exists);
  EXPECT_DOUBLE_EQ(bm.psi_prime_at_zero, 1.0);

  const auto cp = validate(LevyModel::cp_exp_drift(2.0, 1.0, 1.0));
  EXPECT_EQ(cp.condition, PathCondition::kBoundedVariation);
  EXPECT_DOUBLE_EQ(cp.psi_prime_at_zero, 1.0);
  EXPECT_EQ(cp.moment_boundary, 1.0);
  EXPECT_TRUE(cp.qsd_exists);

  const auto flat = validate(LevyModel::cp_exp_drift(1.0, 1.0, 1.0));
  EXPECT_DOUBLE_EQ(flat.psi_prime_at_zero, 0.0);
  EXPECT_FALSE(flat.qsd_exists);

  EXPECT_EQ(validate(mero_bv()).condition, PathCondition::kBoundedVariation);
  EXPECT_EQ(validate(mero()).condition, PathCondition::kGaussian);
}

TEST(Validate, FactoriesRejectBadParameters) {
  EXPECT_THROW(LevyModel::bm_drift(1.0, 0.0), ModelError);
  EXPECT_THROW(LevyModel::bm_drift(0.0, 1.0), ModelError);
  EXPECT_THROW(LevyModel::bm_drift(NAN, 1.0), ModelError);
  EXPECT_THROW(LevyModel::cp_exp_drift(0.0, 1.0, 1.0), ModelError);
  EXPECT_THROW(LevyModel::cp_exp_drift(1.0, -1.0, 1.0), ModelError);
  EXPECT_THROW(LevyModel::cp_exp_drift(1.0, 1.0, 0.0), ModelError);
  EXPECT_THROW(LevyModel::meromorphic(-1.0, 0.5, {}), ModelError);
  EXPECT_THROW(LevyModel::meromorphic(-1.0, 0.5, {{1.0, 3.0}, {1.0, 2.0}}), ModelError);
  EXPECT_THROW(LevyModel::meromorphic(-1.0, 0.5, {{-1.0, 2.0}}), ModelError);
  EXPECT_THROW(LevyModel::meromorphic(-1.0, -0.5, {{1.0, 2.0}}), ModelError);
  // sigma = 0 needs a strictly positive downward drift
  EXPECT_THROW(LevyModel::meromorphic(5.0, 0.0, {{1.0, 2.0}}), ModelError);
}

TEST(Validate, JumpIntensity) {
  EXPECT_DOUBLE_EQ(LevyModel::cp_exp_drift(2.0, 1.5, 1.0).jump_intensity(), 1.5);
  EXPECT_EQ(LevyModel::bm_drift(1.0, 1.0).jump_intensity(), 0.0);
  EXPECT_NEAR(mero().jump_intensity(), 2.0 * std::exp(-2.0) + 3.0 * std::exp(-3.0), 1e-15);
}

TEST(Esscher, ExponentIdentityPointwise) {
  for (const auto& m : all_models()) {
    const SpectralData s = compute_spectral(m);
    for (double frac : {0.0, 0.5, 1.0}) {
      const double theta = frac * s.theta0();
      const LevyModel t = esscher(m, theta);
      EXPECT_EQ(t.family(), m.family());
      const double shift = psi(m, -theta).value();
      for (double b : {0.0, 0.3, 1.0, 4.0}) {
        const double expect = psi(m, b - theta).value() - shift;
        EXPECT_NEAR(psi(t, b).value(), expect, 1e-12 * std::max(1.0, std::abs(expect)))
            << m.describe() << " theta=" << theta << " b=" << b;
      }
    }
  }
}

TEST(Esscher, BeyondTheta0Rejected) {
  const auto m = LevyModel::bm_drift(1.0, 1.0);
  EXPECT_THROW(esscher(m, 1.5), DomainError);
  EXPECT_THROW(esscher(m, -0.1), DomainError);
  EXPECT_THROW(esscher(LevyModel::cp_exp_drift(2.0, 1.0, 1.0), 1.0), DomainError);
}

TEST(Esscher, TiltAtTheta0HasZeroSlope) {
  for (const auto& m : all_models()) {
    const SpectralData s = compute_spectral(m);
    if (!(s.lambda0() > 0.0)) continue;
    const LevyModel t = esscher(m, s.theta0());
    EXPECT_NEAR(validate(t).psi_prime_at_zero, 0.0, 1e-9) << m.describe();
  }
}
