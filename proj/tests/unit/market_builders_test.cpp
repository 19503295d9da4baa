#include <gtest/gtest.h>

#include "rdual/market_builders.hpp"
#include "rdual/martingale.hpp"

namespace rdual {
namespace {

TEST(MarketBuilders, MultiplicativeTreeShape) {
  const Market m = multiplicative_tree(2.0, {1.1, 0.9}, 3);
  EXPECT_EQ(m.scenario_count(), 8u);
  EXPECT_EQ(m.horizon(), 3u);
  EXPECT_EQ(m.decision_count(), 1u + 2u + 4u);
  // scenario 0 is up-up-up, scenario 7 is down-down-down
  EXPECT_NEAR(m.price_at(3, 0, 0), 2.0 * 1.1 * 1.1 * 1.1, 1e-14);
  EXPECT_NEAR(m.price_at(3, 7, 0), 2.0 * 0.9 * 0.9 * 0.9, 1e-14);
  EXPECT_NEAR(m.price_at(1, 3, 0), 2.2, 1e-14);
  EXPECT_NEAR(m.price_at(1, 4, 0), 1.8, 1e-14);
}

TEST(MarketBuilders, OnePeriod) {
  const Market m = one_period_market({1.0, 2.0}, {{1.1, 2.0}, {0.9, 2.5}, {1.0, 1.5}});
  EXPECT_EQ(m.scenario_count(), 3u);
  EXPECT_EQ(m.asset_count(), 2u);
  EXPECT_EQ(m.price_at(1, 1, 1), 2.5);
  EXPECT_EQ(m.price_at(0, 2, 1), 2.0);
  EXPECT_THROW(one_period_market({1.0}, {{1.0, 2.0}}), std::invalid_argument);
}

TEST(MarketBuilders, CompleteBinomialMeasure) {
  const auto q = find_equivalent_mm(build_constraints(complete_binomial()));
  ASSERT_TRUE(q.has_value());
  EXPECT_NEAR((*q)[0], 1.0 / 3.0, 1e-12);
}

TEST(MarketBuilders, UniformSpace) {
  const ScenarioSpace s = uniform_space(4);
  for (double w : s.weights()) EXPECT_DOUBLE_EQ(w, 0.25);
}

}  // namespace
}  // namespace rdual
