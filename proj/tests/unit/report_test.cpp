#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "rdual/report.hpp"

namespace rdual {
namespace {

TEST(Report, NumberRounding) {
  EXPECT_EQ(report_number(1.0 / 3.0).get<double>(), 0.333333333333);
  EXPECT_EQ(report_number(123456789.123456789).get<double>(), 123456789.123);
  EXPECT_EQ(report_number(0.0).get<double>(), 0.0);
  EXPECT_EQ(report_number(kInf), "inf");
  EXPECT_EQ(report_number(-kInf), "-inf");
  EXPECT_TRUE(report_number(std::numeric_limits<double>::quiet_NaN()).is_null());
}

TEST(Report, RoundingIsStableUnderNoise) {
  const double a = 0.1 + 0.2;
  const double b = 0.3;
  EXPECT_EQ(report_number(a).dump(), report_number(b).dump());
}

TEST(Report, Envelope) {
  const auto r = make_report("solve", {{"x", 1}});
  EXPECT_EQ(r["schema"], kReportSchema);
  EXPECT_EQ(r["command"], "solve");
  EXPECT_EQ(r["x"], 1);
}

TEST(Report, VectorsAndMixingRows) {
  const auto v = report_vector({1.0, kInf});
  ASSERT_EQ(v.size(), 2u);
  EXPECT_EQ(v[1], "inf");
  const auto rows = to_json(std::vector<MixingRow>{{0.01, -0.5, 1e-7}});
  ASSERT_TRUE(rows.is_array());
  EXPECT_EQ(rows[0]["epsilon"].get<double>(), 0.01);
}

TEST(Report, PriceReportFields) {
  PriceReport p;
  p.p_b = 0.25;
  p.p_s = 0.5;
  p.oracle_price = std::numeric_limits<double>::quiet_NaN();
  const auto j = to_json(p);
  EXPECT_EQ(j["p_b"].get<double>(), 0.25);
  EXPECT_TRUE(j["oracle_price"].is_null());
}

}  // namespace
}  // namespace rdual
