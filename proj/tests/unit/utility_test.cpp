#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "rdual/model.hpp"
#include "rdual/utility.hpp"

namespace rdual {
namespace {

double grid_conjugate(const UtilitySpec& u, double y, double lo, double hi, int points) {
  double best = -kInf;
  for (int i = 0; i <= points; ++i) {
    const double x = lo + (hi - lo) * i / points;
    best = std::max(best, u.u(x) - x * y);
  }
  return best;
}

TEST(Conjugate, ExponentialExamples) {
  const UtilitySpec u = exponential_utility();
  EXPECT_DOUBLE_EQ(conjugate(u, 1.0), -1.0);
  EXPECT_EQ(conjugate(u, 0.0), 0.0);
  EXPECT_NEAR(conjugate(u, 2.0), 2.0 * std::log(2.0) - 2.0, 1e-15);
  EXPECT_NEAR(grid_conjugate(u, 2.0, -10.0, 10.0, 200000), conjugate(u, 2.0), 1e-8);
  EXPECT_THROW(conjugate(u, -0.1), std::domain_error);
  EXPECT_EQ(u.v(-1.0), kInf);
}

TEST(Conjugate, NumericMatchesExponentialClosedForm) {
  const UtilitySpec analytic = exponential_utility();
  const UtilitySpec numeric = analytic.numeric();
  for (int i = 0; i < 100; ++i) {
    const double y = std::pow(10.0, -4.0 + 7.0 * i / 99.0);
    EXPECT_NEAR(numeric.v(y), y * std::log(y) - y, 1e-8) << "y = " << y;
    EXPECT_NEAR(numeric.v_prime(y), std::log(y), 1e-8);
  }
}

TEST(Conjugate, GluedClosedFormMatchesNumericAndGrid) {
  const UtilitySpec glued = glued_utility();
  const UtilitySpec numeric = glued.numeric();
  EXPECT_EQ(glued.v_at_zero(), kInf);
  for (int i = 0; i < 100; ++i) {
    const double y = std::pow(10.0, -4.0 + 7.0 * i / 99.0);
    EXPECT_NEAR(glued.v(y), numeric.v(y), 1e-8 * std::max(1.0, std::abs(glued.v(y)))) << "y = " << y;
  }
  for (double y : {0.3, 0.8, 1.0, 1.7, 4.0}) {
    EXPECT_NEAR(glued.v(y), grid_conjugate(glued, y, -10.0, 20.0, 300000), 1e-6) << "y = " << y;
  }
  // Both branches meet at y = 1 with value 0 and slope 0.
  EXPECT_DOUBLE_EQ(glued.v(1.0), 0.0);
  EXPECT_NEAR(glued.v(1.0 - 1e-9), 0.0, 1e-12);
  EXPECT_NEAR(glued.v_prime(1.0), 0.0, 1e-15);
}

TEST(Conjugate, IsConvex) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> d(0.0, 6.0);
  for (const UtilitySpec& u : {exponential_utility(), glued_utility(), exponential_mixture_utility({{0.5, 1.0}, {0.5, 3.0}})}) {
    for (int k = 0; k < 200; ++k) {
      const double a = std::exp(d(rng) - 3.0);
      const double b = std::exp(d(rng) - 3.0);
      EXPECT_LE(u.v(0.5 * (a + b)), 0.5 * u.v(a) + 0.5 * u.v(b) + 1e-10) << u.name();
    }
  }
}

TEST(Conjugate, BiconjugationRecoversUtility) {
  for (const UtilitySpec& u : {exponential_utility(), glued_utility()}) {
    for (double x : {-2.0, -0.5, 0.0, 0.7, 2.5}) {
      double best = kInf;
      for (int i = 0; i <= 20000; ++i) {
        const double y = std::exp(-6.0 + 12.0 * i / 20000.0);
        best = std::min(best, u.v(y) + x * y);
      }
      EXPECT_NEAR(best, u.u(x), 1e-4) << u.name() << " x = " << x;
    }
  }
}

TEST(Perspective, ThreeCases) {
  const UtilitySpec u = exponential_utility();
  EXPECT_EQ(perspective(u, 0.0, 0.0), 0.0);
  EXPECT_EQ(perspective(u, 1.0, 0.0), kInf);
  EXPECT_EQ(perspective(u, -1.0, 0.0), kInf);
  EXPECT_EQ(perspective(u, -1.0, 2.0), kInf);
  EXPECT_NEAR(perspective(u, 1.0, 2.0), std::log(0.5) - 1.0, 1e-15);
  EXPECT_EQ(perspective(glued_utility(), 0.0, 1.0), kInf);
  EXPECT_EQ(perspective(u, 0.0, 1.0), 0.0);
  EXPECT_THROW(perspective(u, 1.0, -1.0), std::domain_error);
}

TEST(Perspective, HomogeneityAndJointConvexity) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> d(0.01, 3.0);
  for (const UtilitySpec& u : {exponential_utility(), glued_utility()}) {
    for (int k = 0; k < 1000; ++k) {
      const double y1 = d(rng), z1 = d(rng), y2 = d(rng), z2 = d(rng), t = d(rng);
      const double base = perspective(u, y1, z1);
      EXPECT_NEAR(perspective(u, t * y1, t * z1), t * base, 1e-12 * std::max(1.0, std::abs(t * base)));
      const double mid = perspective(u, 0.5 * (y1 + y2), 0.5 * (z1 + z2));
      EXPECT_LE(mid, 0.5 * base + 0.5 * perspective(u, y2, z2) + 1e-12);
    }
  }
}

TEST(Perspective, DerivativesMatchFiniteDifferences) {
  for (const UtilitySpec& u : {exponential_utility(), glued_utility()}) {
    for (auto [y, z] : {std::pair{0.4, 1.3}, std::pair{2.0, 0.5}, std::pair{1.0, 1.0}}) {
      const auto d = perspective_derivatives(u, y, z);
      const double h = 1e-6;
      EXPECT_NEAR(d.value, perspective(u, y, z), 1e-14);
      EXPECT_NEAR(d.dy, (perspective(u, y + h, z) - perspective(u, y - h, z)) / (2 * h), 1e-6);
      EXPECT_NEAR(d.dz, (perspective(u, y, z + h) - perspective(u, y, z - h)) / (2 * h), 1e-6);
    }
  }
}

TEST(YoungGap, Examples) {
  const UtilitySpec u = exponential_utility();
  EXPECT_NEAR(young_gap(u, 0.0, 1.0), 0.0, 1e-15);
  EXPECT_NEAR(young_gap(u, 0.0, 2.0), 2.0 * std::log(2.0) - 1.0, 1e-15);
  for (const UtilitySpec& w : {exponential_utility(), glued_utility(), glued_utility().numeric()}) {
    for (double x = -4.0; x <= 4.0; x += 0.37) {
      EXPECT_NEAR(young_gap(w, x, w.u_prime(x)), 0.0, 1e-8) << w.name() << " x = " << x;
      EXPECT_GE(young_gap(w, x, 0.3), -1e-10);
      EXPECT_GE(young_gap(w, x, 3.0), -1e-10);
    }
  }
}

TEST(Utility, Validation) {
  EXPECT_NO_THROW(validate_utility(exponential_utility()));
  EXPECT_NO_THROW(validate_utility(glued_utility()));
  EXPECT_NO_THROW(validate_utility(exponential_mixture_utility({{1.0, 0.5}, {2.0, 2.0}})));
  UtilitySpec::Functions linear;
  linear.u = [](double x) { return x; };
  linear.u_prime = [](double) { return 1.0; };
  linear.u_second = [](double) { return 0.0; };
  const UtilitySpec bad("linear", linear, kInf, ConjugateMode::kNumeric);
  EXPECT_THROW(validate_utility(bad), ValidationError);
  EXPECT_THROW(exponential_utility(-1.0), std::invalid_argument);
}

TEST(Utility, RiskAversionScaling) {
  const UtilitySpec u = exponential_utility(2.0);
  const UtilitySpec n = u.numeric();
  for (double y : {0.1, 1.0, 5.0}) EXPECT_NEAR(u.v(y), n.v(y), 1e-10);
  EXPECT_NEAR(u.marginal_inverse(0.5), std::log(2.0) / 2.0, 1e-12);
}

}  // namespace
}  // namespace rdual
