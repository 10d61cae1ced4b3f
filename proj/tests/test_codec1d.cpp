#include <gtest/gtest.h>

#include <random>

#include "ilrip/codec1d.hpp"
#include "ilrip/synthetic.hpp"
#include "oracles.hpp"

using namespace ilrip;

namespace {

SampleBlock row4(std::array<int, 4> v) { return SampleBlock(1, 4, std::vector<int>(v.begin(), v.end())); }

std::array<int, 4> random4(std::mt19937& rng) {
  return {static_cast<int>(rng() % 256), static_cast<int>(rng() % 256), static_cast<int>(rng() % 256),
          static_cast<int>(rng() % 256)};
}

double p_lambda(int qp) { return RdParams::from_qp(qp).lambda; }

}  // namespace

TEST(Search1D, RadiusZeroUsesQuantizedMinres) {
  std::mt19937 rng(1);
  for (int t = 0; t < 100; ++t) {
    const auto o = random4(rng);
    const int r2 = static_cast<int>(rng() % 256), r1 = static_cast<int>(rng() % 256);
    const auto s = search_ilr_1d(row4(o), r2, r1, RdParams::from_qp(27), {0});
    EXPECT_EQ(s.evaluated, 1u);
    const auto expect = oracle::minres_levels_1d(o, r2, r1, 27);
    ASSERT_EQ(s.best.record.ilr_levels->v, std::vector<int>(expect.begin(), expect.end()));
    ASSERT_NEAR(s.best.cost, oracle::cost_1d_ilr(o, r2, r1, expect, 27), 1e-6);
  }
}

TEST(Search1D, RadiusOneMatchesBruteForceOracle) {
  std::mt19937 rng(2);
  for (int t = 0; t < 10; ++t) {
    const auto o = random4(rng);
    const int r2 = static_cast<int>(rng() % 256), r1 = static_cast<int>(rng() % 256);
    const int qp = 22 + 5 * (t % 4);
    const auto s = search_ilr_1d(row4(o), r2, r1, RdParams::from_qp(qp), {1});
    EXPECT_EQ(s.evaluated, 81u);
    const auto base = oracle::minres_levels_1d(o, r2, r1, qp);
    double best = std::numeric_limits<double>::infinity();
    for (int d0 = -1; d0 <= 1; ++d0)
      for (int d1 = -1; d1 <= 1; ++d1)
        for (int d2 = -1; d2 <= 1; ++d2)
          for (int d3 = -1; d3 <= 1; ++d3) {
            const std::array<int, 4> lv{base[0] + d0, base[1] + d1, base[2] + d2, base[3] + d3};
            best = std::min(best, oracle::cost_1d_ilr(o, r2, r1, lv, qp));
          }
    ASSERT_NEAR(s.best.cost, best, 1e-6);
  }
}

TEST(Search1D, LargerRadiusNeverWorse) {
  std::mt19937 rng(3);
  for (int t = 0; t < 20; ++t) {
    const auto o = random4(rng);
    const int r2 = static_cast<int>(rng() % 256), r1 = static_cast<int>(rng() % 256);
    const auto p = RdParams::from_qp(32);
    double prev = std::numeric_limits<double>::infinity();
    for (int b = 0; b <= 2; ++b) {
      const double c = search_ilr_1d(row4(o), r2, r1, p, {b}).best.cost;
      ASSERT_LE(c, prev);
      prev = c;
    }
  }
}

TEST(Search1D, FlatBlockZeroIlrSignal) {
  const auto s = search_ilr_1d(row4({10, 10, 10, 10}), 10, 10, RdParams::from_qp(27), {2});
  EXPECT_EQ(s.minres_levels, LevelBlock(1, 4, 0));
  EXPECT_EQ(s.best.recon, row4({10, 10, 10, 10}));
  EXPECT_EQ(s.best.distortion, 0);
}

TEST(Search1D, NegativeRadiusRejected) {
  EXPECT_THROW(search_ilr_1d(row4({0, 0, 0, 0}), 0, 0, RdParams::from_qp(27), {-1}), Error);
}

TEST(Codec1D, ConstantRowChoosesRegular) {
  std::vector<std::uint8_t> row(32, 90);
  const auto e = encode_row_1d(row, RdParams::from_qp(27), {2});
  ASSERT_EQ(e.trace.blocks.size(), 8u);
  // The first block starts from mid-gray references; after it every block
  // is extrapolated exactly from a constant reconstruction.
  for (std::size_t i = 1; i < e.trace.blocks.size(); ++i) EXPECT_EQ(e.trace.blocks[i].algorithm, Algorithm::regular);
  for (auto v : e.recon) EXPECT_EQ(v, e.recon[0]);
  EXPECT_LE(std::abs(static_cast<int>(e.recon[0]) - 90), 4);
}

TEST(Codec1D, ConstantBlockWithMatchingRefsTiesToRegular) {
  const auto o = row4({90, 90, 90, 90});
  const auto p = RdParams::from_qp(27);
  const auto reg = evaluate_regular_1d(o, 90, 90, p);
  const auto ilr = search_ilr_1d(o, 90, 90, p, {2});
  EXPECT_EQ(reg.distortion, 0);
  EXPECT_EQ(ilr.best.distortion, 0);
  EXPECT_LT(reg.cost, ilr.best.cost);
}

TEST(Codec1D, StepEdgeChoosesIlr) {
  // Refs 10,10 extrapolate flat; the jump to 200 lands mid-block. With the
  // full radius the search finds an ILR signal that bends the prediction.
  const auto o = row4({10, 10, 200, 200});
  for (int qp : {27, 32}) {
    const auto p = RdParams::from_qp(qp);
    const auto reg = evaluate_regular_1d(o, 10, 10, p);
    const auto ilr = search_ilr_1d(o, 10, 10, p, {});
    EXPECT_EQ(ilr.evaluated, 194481u);
    EXPECT_LT(ilr.best.cost, reg.cost) << qp;
  }
}

TEST(Codec1D, RoundTripBitExact) {
  for (int qp : {22, 27, 32, 37}) {
    const auto img = synth::step_rows(32, 6, 100 + static_cast<std::uint64_t>(qp));
    const auto e = encode_image_1d(img, RdParams::from_qp(qp), {1});
    EXPECT_EQ(decode_image_1d(e.bitstream), e.recon) << qp;
    EXPECT_EQ(e.blocks_ilr + e.blocks_regular, 48u);
  }
}

TEST(Codec1D, RowWrappersRoundTrip) {
  std::vector<std::uint8_t> row{10, 10, 200, 200, 30, 60, 90, 120, 5, 250, 5, 250};
  const auto e = encode_row_1d(row, RdParams::from_qp(22), {2});
  EXPECT_EQ(decode_row_1d(e.bitstream), e.recon);
}

TEST(Codec1D, DecoderRejectsDamage) {
  const auto img = synth::step_rows(16, 4, 7);
  const auto e = encode_image_1d(img, RdParams::from_qp(27), {1});
  auto cut = e.bitstream;
  cut.pop_back();
  EXPECT_THROW(decode_image_1d(cut), Error);
  EXPECT_THROW(decode_image_1d(std::span(e.bitstream).first(10)), FormatError);
  auto wrong_mode = e.bitstream;
  wrong_mode[5] = 0;
  EXPECT_THROW(decode_image_1d(wrong_mode), FormatError);
}

TEST(Codec1D, WidthMustBeMultipleOfFour) {
  EXPECT_THROW(encode_image_1d(PixelGrid(6, 2), RdParams::from_qp(27), {0}), GeometryError);
  std::vector<std::uint8_t> row(5, 0);
  EXPECT_THROW(encode_row_1d(row, RdParams::from_qp(27), {0}), GeometryError);
}

TEST(Codec1D, ChosenCostIsArgminOfCandidates) {
  const auto img = synth::step_rows(32, 4, 11);
  const auto e = encode_image_1d(img, RdParams::from_qp(32), {1});
  for (const auto& b : e.trace.blocks) {
    ASSERT_EQ(b.candidate_costs.size(), 2u);
    const double m = std::min(b.candidate_costs[0], b.candidate_costs[1]);
    EXPECT_EQ(b.chosen_cost, m);
    EXPECT_EQ(b.candidate_costs[static_cast<std::size_t>(b.chosen)], m);
    EXPECT_GE(b.chosen_cost, p_lambda(32) * b.rate_bits - 1e-9);
  }
}

TEST(Codec1D, IlrLowersTotalCostOnEdgyRows) {
  const auto p = RdParams::from_qp(32);
  double on_cost = 0, off_cost = 0;
  std::size_t ilr_blocks = 0;
  for (std::uint64_t seed = 21; seed < 25; ++seed) {
    const auto img = synth::step_rows(64, 4, seed);
    const auto on = encode_image_1d(img, p, {4}, {true});
    const auto off = encode_image_1d(img, p, {4}, {false});
    EXPECT_EQ(off.blocks_ilr, 0u);
    EXPECT_EQ(decode_image_1d(on.bitstream), on.recon);
    on_cost += on.total_cost;
    off_cost += off.total_cost;
    ilr_blocks += on.blocks_ilr;
  }
  EXPECT_GT(ilr_blocks, 0u);
  EXPECT_LT(on_cost, off_cost);
}

TEST(Codec1D, EmptyRowRoundTrips) {
  const auto e = encode_row_1d({}, RdParams::from_qp(27), {2});
  EXPECT_TRUE(e.recon.empty());
  EXPECT_TRUE(e.trace.blocks.empty());
  EXPECT_TRUE(decode_row_1d(e.bitstream).empty());
}
