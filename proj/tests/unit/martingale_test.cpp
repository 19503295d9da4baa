#include <gtest/gtest.h>

#include <cmath>

#include "rdual/market_builders.hpp"
#include "rdual/martingale.hpp"

namespace rdual {
namespace {

TEST(Martingale, BinomialMembership) {
  const auto c = build_constraints(complete_binomial());
  ASSERT_EQ(c.rows.size(), 1u);
  EXPECT_TRUE(is_member(c, Vector{1.0 / 3.0, 2.0 / 3.0}));
  EXPECT_FALSE(is_member(c, Vector{0.5, 0.5}));
  EXPECT_NEAR(c.residual(Vector{0.5, 0.5}), 0.25, 1e-15);
}

TEST(Martingale, GainsAreTransposeOfRows) {
  const Market m = multiplicative_tree(1.0, {1.5, 1.0, 0.5}, 2);
  const auto c = build_constraints(m);
  EXPECT_EQ(c.rows.size(), m.decision_count());
  Vector flat(m.decision_count());
  for (std::size_t i = 0; i < flat.size(); ++i) flat[i] = 0.3 * static_cast<double>(i) - 0.5;
  const Vector direct = terminal_gain(m, Strategy::from_flat(m, flat));
  const Vector via_rows = c.gains(flat);
  for (std::size_t w = 0; w < direct.size(); ++w) EXPECT_NEAR(direct[w], via_rows[w], 1e-14);
}

TEST(Martingale, EquivalentMeasureIsInterior) {
  const auto c = build_constraints(multiplicative_tree(1.0, {1.2, 1.0, 0.9}, 2));
  const auto q = find_equivalent_mm(c);
  ASSERT_TRUE(q.has_value());
  double total = 0.0;
  for (double v : *q) {
    EXPECT_GT(v, 1e-3);
    total += v;
  }
  EXPECT_NEAR(total, 1.0, 1e-12);
  EXPECT_TRUE(is_member(c, *q));
}

TEST(Martingale, ArbitrageHasNoEquivalentMeasure) {
  const Market m = one_period_market({1.0}, {{2.0}, {1.5}});
  EXPECT_FALSE(find_equivalent_mm(build_constraints(m)).has_value());
  EXPECT_THROW(require_equivalent_mm(m, PriorSet({{0.5, 0.5}}), exponential_utility()), ValidationError);
  // Weak arbitrage: one state leaves the price unchanged.
  const Market weak = one_period_market({1.0}, {{1.0}, {1.5}});
  EXPECT_FALSE(find_equivalent_mm(build_constraints(weak)).has_value());
}

TEST(Martingale, DualDomainMembership) {
  const auto c = build_constraints(complete_binomial());
  const Vector q{1.0 / 3.0, 2.0 / 3.0};
  EXPECT_TRUE(in_m_v(exponential_utility(), PriorSet({{0.5, 0.5}}), c, q));
  EXPECT_TRUE(in_m_v(glued_utility(), PriorSet({{0.5, 0.5}}), c, q));
  // q charges a scenario every prior ignores.
  EXPECT_FALSE(in_m_v(exponential_utility(), PriorSet({{1.0, 0.0}}), c, q));
}

TEST(Martingale, PriceBoundsCompleteAndIncomplete) {
  const auto c = build_constraints(complete_binomial());
  const auto [lo, hi] = martingale_price_bounds(c, Vector{1.0, 0.0});
  EXPECT_NEAR(lo, 1.0 / 3.0, 1e-12);
  EXPECT_NEAR(hi, 1.0 / 3.0, 1e-12);

  const auto t = build_constraints(one_period_market({1.0}, {{1.5}, {1.0}, {0.5}}));
  const auto [tlo, thi] = martingale_price_bounds(t, Vector{1.0, 0.0, 0.0});
  EXPECT_NEAR(tlo, 0.0, 1e-12);
  EXPECT_NEAR(thi, 0.5, 1e-12);
}

TEST(Martingale, TwoAssetRowsPerNode) {
  const Market m = one_period_market({1.0, 1.0}, {{1.2, 0.9}, {0.9, 1.2}, {1.0, 1.0}, {0.8, 0.8}});
  const auto c = build_constraints(m);
  EXPECT_EQ(c.rows.size(), 2u);
  EXPECT_EQ(c.labels[1].asset, 1u);
}

}  // namespace
}  // namespace rdual
