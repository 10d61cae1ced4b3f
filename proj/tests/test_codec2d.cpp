#include <gtest/gtest.h>

#include <random>

#include "ilrip/codec2d.hpp"
#include "ilrip/synthetic.hpp"
#include "ilrip/vq.hpp"
#include "oracles.hpp"

using namespace ilrip;

namespace {

Codebook random_codebook(std::mt19937& rng, std::size_t n, int qp) {
  Codebook cb;
  cb.qp = qp;
  std::uniform_real_distribution<double> u(-60.0, 60.0);
  for (std::size_t i = 0; i < n; ++i) {
    IlrSignal c(4, 4);
    for (auto& v : c.v) v = u(rng);
    cb.centroids.push_back(c);
  }
  return cb;
}

ReferenceContext random_refs(std::mt19937& rng) {
  auto r = ReferenceContext::uniform(4, 4, 0);
  for (auto& v : r.top) v = static_cast<int>(rng() % 256);
  for (auto& v : r.left) v = static_cast<int>(rng() % 256);
  return r;
}

SampleBlock corner_block(int base, int corner) {
  SampleBlock b(4, 4, base);
  for (int r = 2; r < 4; ++r)
    for (int c = 2; c < 4; ++c) b.at(r, c) = corner;
  return b;
}

RateState fresh(std::size_t n) { return RateState{BitCounter{}, ContextSet{}, n, true}; }

}  // namespace

TEST(Baseline, Examples) {
  const auto flat = ReferenceContext::uniform(4, 4, 100);
  for (int m = 0; m < 4; ++m) EXPECT_EQ(predict_baseline(flat, static_cast<BaselineMode>(m)), SampleBlock(4, 4, 100));
  auto refs = ReferenceContext::uniform(4, 4, 0);
  refs.top = {0, 10, 20, 30, 40};
  refs.left = {1, 2, 3, 4};
  const auto v = predict_baseline(refs, BaselineMode::vertical);
  const auto h = predict_baseline(refs, BaselineMode::horizontal);
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) {
      EXPECT_EQ(v.at(r, c), 10 * (c + 1));
      EXPECT_EQ(h.at(r, c), r + 1);
    }
  // top sum 100, left sum 10, corner excluded: round(110 / 8) = 14
  const auto dc = predict_baseline(refs, BaselineMode::dc);
  EXPECT_EQ(dc, SampleBlock(4, 4, 14));
}

TEST(Baseline, DcUsesOnlyAvailableSides) {
  PixelGrid g(8, 8, std::uint8_t{60});
  EXPECT_EQ(predict_baseline(ReferenceContext::from_grid(g, {4, 4, 0, 0}), BaselineMode::dc), SampleBlock(4, 4, 128));
  EXPECT_EQ(predict_baseline(ReferenceContext::from_grid(g, {4, 4, 4, 0}), BaselineMode::dc), SampleBlock(4, 4, 60));
  EXPECT_EQ(predict_baseline(ReferenceContext::from_grid(g, {4, 4, 0, 4}), BaselineMode::dc), SampleBlock(4, 4, 60));
}

TEST(ExploreCodebook, SingletonPicksIndexZero) {
  std::mt19937 rng(1);
  const auto cb = random_codebook(rng, 1, 27);
  const auto e = explore_codebook(corner_block(50, 200), ReferenceContext::uniform(4, 4, 50), cb,
                                  RdParams::from_qp(27), fresh(1));
  EXPECT_EQ(e.index, 0);
  EXPECT_EQ(e.costs.size(), 1u);
}

TEST(ExploreCodebook, EmptyCodebookThrows) {
  EXPECT_THROW(explore_codebook(SampleBlock(4, 4), ReferenceContext::uniform(4, 4, 0), Codebook{},
                                RdParams::from_qp(27), fresh(0)),
               Error);
}

TEST(ExploreCodebook, MinresCentroidIsLosslessAtFineStep) {
  std::mt19937 rng(2);
  const RdParams fine{0, 1.0 / 64.0, 1e-9};
  for (int t = 0; t < 20; ++t) {
    auto cb = random_codebook(rng, 8, 0);
    SampleBlock orig(4, 4);
    for (auto& v : orig.v) v = static_cast<int>(rng() % 256);
    const auto refs = random_refs(rng);
    cb.centroids[3] = compute_minres(orig, refs, raster_4x4());
    const auto e = explore_codebook(orig, refs, cb, fine, fresh(cb.size()));
    EXPECT_EQ(e.best.distortion, 0);
    EXPECT_EQ(evaluate_centroid(orig, refs, cb.centroids[3], 3, fine, fresh(cb.size())).distortion, 0);
  }
}

TEST(ExploreCodebook, MatchesIndependentCostOracle) {
  std::mt19937 rng(3);
  for (int t = 0; t < 100; ++t) {
    const int qp = 22 + 5 * (t % 4);
    const auto cb = random_codebook(rng, 16, qp);
    SampleBlock orig(4, 4);
    const int base = static_cast<int>(rng() % 200);
    for (auto& v : orig.v) v = base + static_cast<int>(rng() % 56);
    const auto refs = random_refs(rng);
    const auto e = explore_codebook(orig, refs, cb, RdParams::from_qp(qp), fresh(16));

    oracle::Refs4 o{};
    std::copy(refs.top.begin(), refs.top.end(), o.top.begin());
    std::copy(refs.left.begin(), refs.left.end(), o.left.begin());
    double best = std::numeric_limits<double>::infinity();
    for (const auto& c : cb.centroids) best = std::min(best, oracle::cost_2d_ilr(orig.v, o, c.v, 4, qp, true));
    ASSERT_NEAR(e.best.cost, best, 1e-6);
    ASSERT_NEAR(e.costs[static_cast<std::size_t>(e.index)], best, 1e-6);
    for (double c : e.costs) ASSERT_GE(c, e.best.cost);
  }
}

TEST(EncodeBlock, FlatBlockPicksDcWithZeroResidual) {
  std::mt19937 rng(4);
  const auto cb = random_codebook(rng, 16, 27);
  const auto be = encode_block_2d(SampleBlock(4, 4, 77), ReferenceContext::uniform(4, 4, 77), &cb,
                                  RdParams::from_qp(27), fresh(16));
  EXPECT_EQ(be.chosen.record.flag, Algorithm::regular);
  EXPECT_EQ(be.chosen.record.mode, BaselineMode::dc);
  EXPECT_EQ(be.chosen.record.res_levels, LevelBlock(4, 4, 0));
  EXPECT_EQ(be.decision.candidate_costs.size(), 4u + 16u);
  EXPECT_EQ(be.decision.chosen, 0);
}

TEST(EncodeBlock, CornerEdgeBlockPicksIlrWithTrainedCodebook) {
  // Training blocks: flat with an uncorrelated bottom-right 2x2 corner.
  TrainingSet set;
  for (int base : {40, 50, 60, 70})
    for (int corner : {180, 200, 220}) set.samples.push_back({corner_block(base, corner), ReferenceContext::uniform(4, 4, base)});
  for (int base : {30, 90, 150}) set.samples.push_back({SampleBlock(4, 4, base), ReferenceContext::uniform(4, 4, base)});
  const auto p = RdParams::from_qp(27);
  const auto cb = train(set, 4, p).codebook;
  const auto be = encode_block_2d(corner_block(50, 200), ReferenceContext::uniform(4, 4, 50), &cb, p, fresh(4));
  EXPECT_EQ(be.chosen.record.flag, Algorithm::ilr);

  PixelGrid img(8, 8, std::uint8_t{50});
  for (int y = 6; y < 8; ++y)
    for (int x = 6; x < 8; ++x) img.set(x, y, 200);
  const auto e = encode_image(img, cb, p);
  EXPECT_EQ(e.trace.blocks.back().algorithm, Algorithm::ilr);
  EXPECT_EQ(decode_image(e.bitstream, &cb), e.recon);
}

TEST(EncodeImage, ConstantImageIsTiny) {
  const auto e = encode_image(PixelGrid(4, 4, std::uint8_t{128}), Codebook{}, RdParams::from_qp(27));
  EXPECT_EQ(e.blocks_regular, 1u);
  EXPECT_LE(e.payload_bytes, 2u);
  EXPECT_EQ(decode_image(e.bitstream, nullptr), PixelGrid(4, 4, std::uint8_t{128}));
}

TEST(EncodeImage, RoundTripAcrossQpAndCodebooks) {
  std::mt19937 rng(5);
  const std::vector<PixelGrid> imgs{synth::gradient(32, 24, 1), synth::step_edges(32, 32, 2), synth::noise(16, 16, 3)};
  for (int qp : {22, 27, 32, 37}) {
    const auto cb = random_codebook(rng, 16, qp);
    for (const auto& img : imgs) {
      for (const Codebook* book : {&cb, static_cast<const Codebook*>(nullptr)}) {
        const auto e = encode_image(img, book ? *book : Codebook{}, RdParams::from_qp(qp));
        DecodeStats st;
        ASSERT_EQ(decode_image(e.bitstream, book, &st), e.recon);
        EXPECT_EQ(st.blocks, e.trace.blocks.size());
        EXPECT_LE(st.max_centroids_per_block, 1u);
        EXPECT_EQ(st.centroid_evaluations, e.blocks_ilr);
      }
    }
  }
}

TEST(EncodeImage, DecisionsAreArgminAndRateAccountingHolds) {
  std::mt19937 rng(6);
  const auto cb = random_codebook(rng, 16, 27);
  const auto e = encode_image(synth::step_edges(64, 64, 9), cb, RdParams::from_qp(27));
  double sum = 0;
  for (const auto& b : e.trace.blocks) {
    ASSERT_EQ(b.candidate_costs.size(), 4u + cb.size());
    for (double c : b.candidate_costs) ASSERT_LE(b.chosen_cost, c);
    ASSERT_EQ(b.candidate_costs[static_cast<std::size_t>(b.chosen)], b.chosen_cost);
    sum += b.rate_bits;
  }
  const double payload_bits = 8.0 * static_cast<double>(e.payload_bytes);
  EXPECT_GE(payload_bits - sum, -1e-6);
  EXPECT_LT(payload_bits - sum, 8.0);
  EXPECT_EQ(e.bitstream.size(), e.payload_bytes + 17);
}

TEST(EncodeImage, RejectsBadGeometry) {
  EXPECT_THROW(encode_image(PixelGrid(6, 4), Codebook{}, RdParams::from_qp(27)), GeometryError);
  Codebook wrong;
  wrong.h = 2;
  wrong.w = 2;
  wrong.centroids.push_back(IlrSignal(2, 2));
  EXPECT_THROW(encode_image(PixelGrid(4, 4), wrong, RdParams::from_qp(27)), GeometryError);
}

TEST(EncodeImage, QpMismatchWarnsAndProceeds) {
  std::mt19937 rng(7);
  const auto cb = random_codebook(rng, 4, 22);
  std::vector<std::string> warnings;
  EncodeOptions2D opts;
  opts.warn = [&](const std::string& m) { warnings.push_back(m); };
  const auto e = encode_image(synth::gradient(8, 8, 4), cb, RdParams::from_qp(27), opts);
  ASSERT_EQ(warnings.size(), 1u);
  EXPECT_NE(warnings[0].find("22"), std::string::npos);
  EXPECT_EQ(decode_image(e.bitstream, &cb), e.recon);
}

TEST(DecodeImage, RejectsWrongCodebookAndDamage) {
  std::mt19937 rng(8);
  const auto cb = random_codebook(rng, 16, 27);
  const auto other = random_codebook(rng, 16, 27);
  const auto e = encode_image(synth::step_edges(32, 32, 5), cb, RdParams::from_qp(27));
  EXPECT_THROW(decode_image(e.bitstream, &other), FormatError);
  EXPECT_THROW(decode_image(e.bitstream, nullptr), FormatError);
  auto cut = e.bitstream;
  cut.resize(cut.size() - 3);
  EXPECT_THROW(decode_image(cut, &cb), Error);
  auto bad_magic = e.bitstream;
  bad_magic[0] = 'X';
  EXPECT_THROW(decode_image(bad_magic, &cb), FormatError);
}

TEST(Container, HeaderLayout) {
  const StreamHeader h{StreamMode::k2D, 0x0102, 0x0304, 27, 0x0010, 0xA1B2C3D4u};
  const std::vector<std::uint8_t> payload{0xEE};
  const auto bytes = write_container(h, payload);
  const std::vector<std::uint8_t> expect{'I', 'L', 'R', 'B', 1, 0, 0x01, 0x02, 0x03, 0x04, 27,
                                         0x00, 0x10, 0xA1, 0xB2, 0xC3, 0xD4, 0xEE};
  EXPECT_EQ(bytes, expect);
  const auto parsed = read_container(bytes);
  EXPECT_EQ(parsed.header.width, 0x0102);
  EXPECT_EQ(parsed.header.codebook_hash, 0xA1B2C3D4u);
  EXPECT_EQ(parsed.payload.size(), 1u);
}

TEST(CodebookFile, RoundTripAndHash) {
  std::mt19937 rng(9);
  const auto cb = random_codebook(rng, 3, 32);
  const auto bytes = cb.serialize();
  EXPECT_EQ(bytes.size(), 9u + 3 * 16 * 8);
  const auto back = Codebook::parse(bytes);
  EXPECT_EQ(back.centroids, cb.centroids);
  EXPECT_EQ(back.qp, 32);
  EXPECT_EQ(back.hash(), cb.hash());
  EXPECT_EQ(cb.hash(), fnv1a32(bytes));
  auto shorter = bytes;
  shorter.pop_back();
  EXPECT_THROW(Codebook::parse(shorter), FormatError);
  // FNV-1a reference value for "a"
  const std::vector<std::uint8_t> a{'a'};
  EXPECT_EQ(fnv1a32(a), 0xE40C292Cu);
}
