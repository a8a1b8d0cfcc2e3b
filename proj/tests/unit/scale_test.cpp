#include <gtest/gtest.h>

#include <cmath>

#include "lqsd/errors.hpp"
#include "lqsd/scale.hpp"
#include "oracles.hpp"

using namespace lqsd;

namespace {

LevyModel mero(double sigma = 0.5) {
  return LevyModel::meromorphic(-1.0, sigma, {{2.0, 2.0}, {3.0, 3.0}});
}

double sup_against(const ScaleGrid& g, const std::function<double(double)>& f) {
  double m = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) m = std::max(m, std::abs(g[i] - f(g.x(i))));
  return m;
}

}  // namespace

TEST(ClosedForm, Examples) {
  const auto bm = LevyModel::bm_drift(1.0, 1.0);
  EXPECT_NEAR(scale_closed_form(bm, -0.5, 1.0), 2.0 * std::exp(-1.0), 1e-15);
  EXPECT_NEAR(scale_closed_form(bm, 0.0, 1.0), 1.0 - std::exp(-2.0), 1e-15);
  EXPECT_EQ(scale_closed_form(bm, 0.3, -1.0), 0.0);
  EXPECT_NEAR(scale_closed_form(LevyModel::cp_exp_drift(2.0, 1.0, 1.0), 0.0, 0.0), 0.5, 1e-15);
  EXPECT_EQ(scale_closed_form(mero(), 0.0, -1.0), 0.0);
}

TEST(ClosedForm, BrownianAgainstPartialFractions) {
  const auto m = LevyModel::bm_drift(1.0, 1.0);
  for (double q : {2.0, 0.0, -0.25, -0.5, -0.6, -3.0}) {
    for (double x : {1e-6, 0.01, 0.5, 3.0, 20.0}) {
      const double expect = oracle::bm_scale(1.0, 1.0, q, x);
      EXPECT_NEAR(scale_closed_form(m, q, x), expect, 1e-12 * std::max(1.0, std::abs(expect)))
          << "q=" << q << " x=" << x;
    }
  }
}

TEST(ClosedForm, CompoundPoissonAgainstPartialFractions) {
  const auto m = LevyModel::cp_exp_drift(2.0, 1.0, 1.0);
  // includes both degenerate points -(sqrt(2) -+ 1)^2 and the oscillating band between
  for (double q : {1.0, 0.0, -0.1, -0.3, -3.0, -5.9, -7.0}) {
    for (double x : {0.0, 0.01, 0.5, 3.0, 20.0}) {
      const double expect = oracle::cp_scale(2.0, 1.0, 1.0, q, x);
      EXPECT_NEAR(scale_closed_form(m, q, x), expect, 1e-11 * std::max(1.0, std::abs(expect)))
          << "q=" << q << " x=" << x;
    }
  }
}

TEST(ClosedForm, ContinuousThroughDegeneratePoints) {
  const auto cp = LevyModel::cp_exp_drift(2.0, 1.0, 1.0);
  for (double qd : {-std::pow(std::sqrt(2.0) - 1.0, 2), -std::pow(std::sqrt(2.0) + 1.0, 2)}) {
    for (double x : {0.5, 5.0}) {
      const double at = scale_closed_form(cp, qd, x);
      EXPECT_NEAR(scale_closed_form(cp, qd + 1e-9, x), at, 1e-7 * std::max(1.0, std::abs(at)));
      EXPECT_NEAR(scale_closed_form(cp, qd - 1e-9, x), at, 1e-7 * std::max(1.0, std::abs(at)));
    }
  }
  const auto s = compute_spectral(mero());
  for (double x : {0.5, 5.0, 20.0}) {
    const double at = scale_closed_form(s, -s.lambda0(), x);
    EXPECT_NEAR(scale_closed_form(s, -s.lambda0() + 1e-6, x), at, 1e-4 * std::abs(at));
  }
}

TEST(ClosedForm, MeromorphicLaplaceTransformByQuadrature) {
  for (double sigma : {0.5, 0.0}) {
    const auto m = mero(sigma);
    const auto s = compute_spectral(m);
    const std::vector<oracle::Atom> atoms{{2.0, 2.0}, {3.0, 3.0}};
    for (double q : {0.0, 0.5, -0.5 * s.lambda0()}) {
      const ClosedFormScale w(s, q);
      const double beta = phi(s, std::abs(q)) + 1.0;
      const double integral =
          oracle::simpson([&](double x) { return std::exp(-beta * x) * w(x); }, 0.0, 60.0, 60000);
      EXPECT_NEAR(integral, 1.0 / (oracle::mero_psi(-1.0, sigma, atoms, beta) - q), 1e-9);
    }
  }
}

TEST(ClosedForm, ValueAtZero) {
  // W(0) = 0 with a Gaussian part, 1/drift without.
  EXPECT_NEAR(scale_closed_form(mero(), 0.3, 0.0), 0.0, 1e-12);
  EXPECT_NEAR(scale_closed_form(LevyModel::bm_drift(1.0, 2.0), 0.3, 0.0), 0.0, 1e-15);
  const auto bv = mero(0.0);
  EXPECT_NEAR(scale_closed_form(bv, 0.3, 0.0), 1.0 / bv.jump_diffusion().drift, 1e-12);
}

TEST(MeromorphicRoots, InterlaceAndSolve) {
  for (double sigma : {0.5, 0.0}) {
    const auto m = mero(sigma);
    const auto s = compute_spectral(m);
    for (double q : {-0.5 * s.lambda0(), 0.0, 2.0}) {
      const auto z = meromorphic_roots(s, q);
      ASSERT_EQ(z.size(), sigma > 0.0 ? 3u : 2u);
      EXPECT_LT(z[0], 2.0);
      EXPECT_GT(z[1], 2.0);
      EXPECT_LT(z[1], 3.0);
      if (sigma > 0.0) EXPECT_GT(z[2], 3.0);
      for (double zeta : z) {
        EXPECT_NEAR(meromorphic_continuation(m, -zeta, 0), q, 1e-9 * std::max(1.0, std::abs(q)));
      }
    }
  }
}

TEST(MeromorphicRoots, RejectsOtherFamilies) {
  EXPECT_THROW(meromorphic_roots(compute_spectral(LevyModel::bm_drift(1.0, 1.0)), 0.0),
               DomainError);
}

TEST(Series, SingleTermAtZero) {
  const auto s = compute_spectral(LevyModel::cp_exp_drift(2.0, 1.0, 1.0));
  const GridSpec g{1e-3, 5.0};
  EXPECT_LE(scale_series(s, 0.0, g).sup_distance(scale_grid_closed_form(s, 0.0, g)), 1e-12);
}

TEST(Series, BrownianDegenerate) {
  const auto s = compute_spectral(LevyModel::bm_drift(1.0, 1.0));
  const auto g = scale_series(s, -0.5, {1e-3, 5.0});
  EXPECT_EQ(g.method(), ScaleMethod::kSeries);
  EXPECT_LE(sup_against(g, [](double x) { return 2.0 * x * std::exp(-x); }), 1e-6);
}

TEST(Series, CompoundPoisson) {
  const auto s = compute_spectral(LevyModel::cp_exp_drift(2.0, 1.0, 1.0));
  const auto g = scale_series(s, -0.1, {1e-3, 5.0});
  EXPECT_LE(sup_against(g, [](double x) { return oracle::cp_scale(2.0, 1.0, 1.0, -0.1, x); }),
            1e-6);
}

TEST(Series, ErrorEstimateBoundsActualError) {
  const auto s = compute_spectral(LevyModel::cp_exp_drift(2.0, 1.0, 1.0));
  const auto g = scale_series(s, -0.15, {2e-3, 5.0});
  const double actual =
      sup_against(g, [](double x) { return oracle::cp_scale(2.0, 1.0, 1.0, -0.15, x); });
  EXPECT_LE(actual, 2.0 * g.err_estimate());
}

TEST(Renewal, IdentityWhenQEqualsR) {
  const auto s = compute_spectral(LevyModel::bm_drift(1.0, 1.0));
  const GridSpec g{1e-3, 5.0};
  EXPECT_EQ(scale_renewal(s, 0.7, 0.7, g).sup_distance(scale_grid_closed_form(s, 0.7, g)), 0.0);
}

TEST(Renewal, BrownianDegenerate) {
  const auto s = compute_spectral(LevyModel::bm_drift(1.0, 1.0));
  const auto g = scale_renewal(s, -0.5, 0.0, {1e-3, 5.0});
  EXPECT_LE(sup_against(g, [](double x) { return 2.0 * x * std::exp(-x); }), 1e-6);
}

TEST(Renewal, MeromorphicCrossValidation) {
  for (double sigma : {0.5, 0.0}) {
    const auto s = compute_spectral(mero(sigma));
    const double q = -0.5 * s.lambda0();
    const GridSpec g{1e-3, 5.0};
    EXPECT_LE(scale_renewal(s, q, 0.0, g).sup_distance(scale_grid_closed_form(s, q, g)), 1e-5);
  }
}

TEST(Renewal, FromPositiveReference) {
  const auto s = compute_spectral(LevyModel::cp_exp_drift(2.0, 1.0, 1.0));
  const auto g = scale_renewal(s, -0.1, 0.5, {1e-3, 5.0});
  EXPECT_LE(sup_against(g, [](double x) { return oracle::cp_scale(2.0, 1.0, 1.0, -0.1, x); }),
            1e-6);
  EXPECT_THROW(scale_renewal(s, -0.1, -0.5, {1e-3, 5.0}), DomainError);
}

TEST(Renewal, SecondOrderConvergence) {
  const auto s = compute_spectral(LevyModel::cp_exp_drift(2.0, 1.0, 1.0));
  const auto exact = [](double x) { return oracle::cp_scale(2.0, 1.0, 1.0, -0.5, x); };
  const double e1 = sup_against(scale_renewal(s, -0.5, 0.0, {4e-3, 4.0}), exact);
  const double e2 = sup_against(scale_renewal(s, -0.5, 0.0, {2e-3, 4.0}), exact);
  EXPECT_GE(std::log2(e1 / e2), 1.9);
}

TEST(ScaleGrid, IncreasingForNonNegativeQ) {
  for (const auto& m : {LevyModel::bm_drift(1.0, 1.0), LevyModel::cp_exp_drift(2.0, 1.0, 1.0),
                        mero()}) {
    const auto s = compute_spectral(m);
    for (double q : {0.0, 0.5}) {
      const auto g = scale_grid(s, q, {1e-2, 20.0});
      for (std::size_t i = 1; i < g.size(); ++i) {
        // W(x) = 1 - e^{-2x} for the Brownian case saturates in double precision
        if (q > 0.0) ASSERT_GT(g[i], g[i - 1]) << m.describe();
        else ASSERT_GE(g[i], g[i - 1]) << m.describe();
      }
    }
  }
}

TEST(ScaleGrid, ConvolutionBound) {
  // |W^(q)(x)| <= W(x) exp(|q| int_0^x W)
  const auto s = compute_spectral(LevyModel::cp_exp_drift(2.0, 1.0, 1.0));
  const GridSpec grid{1e-3, 10.0};
  const auto w0 = scale_grid_closed_form(s, 0.0, grid);
  for (double q : {-0.3, 0.4}) {
    const auto w = scale_grid(s, q, grid);
    double integral = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (i > 0) integral += 0.5 * grid.h * (w0[i] + w0[i - 1]);
      EXPECT_LE(std::abs(w[i]), w0[i] * std::exp(std::abs(q) * integral) * (1 + 1e-12));
    }
  }
}

TEST(ScaleGrid, InterpolationAndAccessors) {
  const auto s = compute_spectral(LevyModel::bm_drift(1.0, 1.0));
  const auto g = scale_grid(s, 0.0, {0.5, 2.0});
  EXPECT_EQ(g.size(), 5u);
  EXPECT_DOUBLE_EQ(g.x(4), 2.0);
  EXPECT_EQ(g.value_at(-1.0), 0.0);
  EXPECT_DOUBLE_EQ(g.value_at(0.25), 0.5 * (g[0] + g[1]));
  EXPECT_DOUBLE_EQ(g.value_at(10.0), g[4]);
}

TEST(LaplaceResidual, SmallAcrossFamilies) {
  for (const auto& m : {LevyModel::bm_drift(1.0, 1.0), LevyModel::cp_exp_drift(2.0, 1.0, 1.0),
                        mero()}) {
    const auto s = compute_spectral(m);
    for (double q : {-0.5 * s.lambda0(), 0.0, 1.0}) {
      const auto g = scale_grid(s, q, {1e-3, 50.0});
      for (double extra : {0.1, 1.0, 3.0}) {
        EXPECT_LE(laplace_residual(s, g, phi(s, std::abs(q)) + extra), 1e-6) << m.describe();
      }
    }
  }
}

TEST(LaplaceResidual, RejectsBetaBelowPhi) {
  const auto s = compute_spectral(LevyModel::bm_drift(1.0, 1.0));
  const auto g = scale_grid(s, 1.0, {1e-2, 10.0});
  EXPECT_THROW(laplace_residual(s, g, 0.5 * phi(s, 1.0)), DomainError);
}

TEST(PotentialDensity, ClosedFormAndSign) {
  const auto s = compute_spectral(LevyModel::bm_drift(1.0, 1.0));
  const double q = 1.0;
  const double b = std::sqrt(3.0) - 1.0;
  for (double x : {0.0, 0.5, 2.0}) {
    for (double y : {0.1, 1.0, 3.0}) {
      const double expect = std::exp(-x * b) * oracle::bm_scale(1, 1, q, y) -
                            oracle::bm_scale(1, 1, q, y - x);
      EXPECT_NEAR(potential_density(s, q, x, y), expect, 1e-12);
      EXPECT_GE(potential_density(s, q, x, y), 0.0);
    }
  }
}

TEST(LemmaSuite, WPhiMonotoneAndLimit) {
  for (const auto& m : {LevyModel::bm_drift(1.0, 1.0), LevyModel::cp_exp_drift(2.0, 1.0, 1.0),
                        mero()}) {
    const auto s = compute_spectral(m);
    const double lambda = 0.5 * s.lambda0();
    double prev = w_phi(s, lambda, 0.0);
    for (double x = 0.1; x <= 50.0; x += 0.1) {
      const double v = w_phi(s, lambda, x);
      EXPECT_GE(v, prev * (1.0 - 1e-12));
      prev = v;
    }
    EXPECT_NEAR(w_phi(s, lambda, 50.0), phi_prime(s, -lambda), 1e-4);
  }
}

TEST(LemmaSuite, TiltedIntegral) {
  for (const auto& m : {LevyModel::bm_drift(1.0, 1.0), LevyModel::cp_exp_drift(2.0, 1.0, 1.0),
                        mero()}) {
    const auto s = compute_spectral(m);
    const double lambda = 0.5 * s.lambda0();
    const auto g = scale_grid(s, -lambda, {1e-3, 50.0});
    for (double r : {0.0, 0.25 * lambda, 0.5 * lambda}) {
      EXPECT_NEAR(tilted_integral(s, g, r), 1.0 / (lambda - r), 1e-5) << m.describe();
    }
  }
}
