#include <gtest/gtest.h>

#include <cmath>
#include <sstream>

#include "ilrip/bdrate.hpp"
#include "oracles.hpp"

using namespace ilrip;

namespace {

const RdCurve kAnchor{{{0.30, 30.1}, {0.55, 33.0}, {0.95, 35.9}, {1.60, 38.7}}};
const RdCurve kTest{{{0.27, 30.4}, {0.50, 33.2}, {0.88, 36.0}, {1.49, 38.9}}};

oracle::Curve points(const RdCurve& c) {
  oracle::Curve out{};
  for (std::size_t i = 0; i < 4; ++i) out[i] = {c.points[i].rate_bpp, c.points[i].psnr_db};
  return out;
}

}  // namespace

TEST(BdRate, IdenticalCurvesGiveZero) { EXPECT_NEAR(bd_rate(kAnchor, kAnchor), 0.0, 1e-9); }

TEST(BdRate, HalvedRateGivesMinusFifty) {
  RdCurve half = kAnchor;
  for (auto& p : half.points) p.rate_bpp /= 2;
  EXPECT_NEAR(bd_rate(kAnchor, half), -50.0, 1e-6);
  EXPECT_NEAR(bd_rate(half, kAnchor), 100.0, 1e-6);
}

TEST(BdRate, MatchesDenseTrapezoidOracle) {
  const double got = bd_rate(kAnchor, kTest);
  const double want = oracle::bd_rate_dense(points(kAnchor), points(kTest));
  EXPECT_NEAR(got, want, 0.01);
  EXPECT_LT(got, 0.0);
}

TEST(BdRate, RejectsBadCurves) {
  RdCurve far = kAnchor;
  for (auto& p : far.points) p.psnr_db += 50;
  EXPECT_THROW(bd_rate(kAnchor, far), Error);
  RdCurve three{{{0.1, 30}, {0.2, 31}, {0.3, 32}}};
  EXPECT_THROW(bd_rate(three, kAnchor), Error);
  RdCurve zero = kAnchor;
  zero.points[0].rate_bpp = 0;
  EXPECT_THROW(bd_rate(zero, kAnchor), Error);
}

TEST(BdRate, ParsesCsvWithHeader) {
  std::istringstream in("rate_bpp,psnr_db\n0.95,35.9\n0.30,30.1\n0.55,33.0\n1.60,38.7\n");
  const auto c = parse_rd_csv(in);
  ASSERT_EQ(c.points.size(), 4u);
  EXPECT_DOUBLE_EQ(c.points[0].rate_bpp, 0.30);
  EXPECT_NEAR(bd_rate(c, kAnchor), 0.0, 1e-9);
  std::istringstream bad("0.1,30\nnope\n");
  EXPECT_THROW(parse_rd_csv(bad), FormatError);
}
