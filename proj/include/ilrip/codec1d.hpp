#pragma once

// 1D testbed codec: every image row is split into 1x4 blocks coded left to
// right. Each block chooses, by RD cost, between planar extrapolation from
// the two preceding reconstructed samples and ILR prediction whose ILR
// signal is found by exhaustive search around the quantized transform of
// the block's minimum residual.
//
// Block syntax: ilr flag (context) | [ILR levels] | residual levels, both
// level blocks with the shared coefficient binarization.

#include <array>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "ilrip/container.hpp"
#include "ilrip/decision.hpp"
#include "ilrip/entropy.hpp"
#include "ilrip/predict.hpp"
#include "ilrip/transform.hpp"

namespace ilrip {

struct SearchParams1D {
  int radius = 10;  // every ILR coefficient moves within [-radius, radius]

  std::size_t candidates() const {
    const auto side = static_cast<std::size_t>(2 * radius + 1);
    return side * side * side * side;
  }
};

struct Block1DRecord {
  Algorithm flag = Algorithm::regular;
  std::optional<LevelBlock> ilr_levels;
  LevelBlock res_levels{1, kLen1D};
};

struct Candidate1D {
  Block1DRecord record;
  SampleBlock pred{1, kLen1D};
  SampleBlock recon{1, kLen1D};
  std::int64_t distortion = 0;
  double rate = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

template <typename Coder>
void write_block_1d(Coder& c, ContextSet& ctx, const Block1DRecord& rec) {
  c.encode_bin(ctx.ilr_flag, rec.flag == Algorithm::ilr ? 1 : 0);
  if (rec.flag == Algorithm::ilr) write_levels(c, ctx, *rec.ilr_levels);
  write_levels(c, ctx, rec.res_levels);
}

namespace detail {

inline Candidate1D finish_candidate_1d(const SampleBlock& orig, SampleBlock pred, Block1DRecord rec, const RdParams& p,
                                       const BitCounter& at, const ContextSet& ctx) {
  Candidate1D out;
  RealBlock res(1, kLen1D);
  for (int i = 0; i < kLen1D; ++i) res[i] = orig[i] - pred[i];
  rec.res_levels = quantize(dct_forward(std::move(res)), p);
  out.recon = reconstruct(pred, reconstruct_residual(rec.res_levels, p));
  out.distortion = ssd(orig, out.recon);
  out.rate = estimate_rate(at, ctx, [&](BitCounter& c, ContextSet& cs) { write_block_1d(c, cs, rec); });
  out.cost = rd_cost(out.distortion, out.rate, p);
  out.pred = std::move(pred);
  out.record = std::move(rec);
  return out;
}

}  // namespace detail

inline Candidate1D evaluate_regular_1d(const SampleBlock& orig, int r_prev2, int r_prev1, const RdParams& p,
                                       const BitCounter& at = {}, const ContextSet& ctx = {}) {
  Block1DRecord rec;
  rec.flag = Algorithm::regular;
  return detail::finish_candidate_1d(orig, predict_1d_regular(r_prev2, r_prev1), std::move(rec), p, at, ctx);
}

inline Candidate1D evaluate_ilr_1d(const SampleBlock& orig, int r_prev2, int r_prev1, const LevelBlock& ilr_levels,
                                   const RdParams& p, const BitCounter& at = {}, const ContextSet& ctx = {}) {
  const RealBlock ilr = reconstruct_residual(ilr_levels, p);
  Block1DRecord rec;
  rec.flag = Algorithm::ilr;
  rec.ilr_levels = ilr_levels;
  auto pred = predict_1d_ilr(r_prev2, r_prev1, ilr.v).pred;
  return detail::finish_candidate_1d(orig, std::move(pred), std::move(rec), p, at, ctx);
}

struct SearchResult1D {
  LevelBlock minres_levels{1, kLen1D};  // quantized transform of the minimum residual
  std::array<int, 4> displacement{};    // offset of the winner from minres_levels
  Candidate1D best;
  std::size_t evaluated = 0;
};

// Exhaustive search over minres_levels + d, d in [-b, b]^4. Candidates are
// visited in lexicographic order of d and only a strictly lower cost
// replaces the incumbent, so ties resolve to the smallest d.
inline SearchResult1D search_ilr_1d(const SampleBlock& orig, int r_prev2, int r_prev1, const RdParams& p,
                                    const SearchParams1D& search, const BitCounter& at = {},
                                    const ContextSet& ctx = {}) {
  if (search.radius < 0) throw Error("search radius must be non-negative");
  SearchResult1D out;
  out.minres_levels = quantize(dct_forward(compute_minres_1d(orig, r_prev2, r_prev1)), p);
  const int b = search.radius;
  LevelBlock cand(1, kLen1D);
  for (int d0 = -b; d0 <= b; ++d0)
    for (int d1 = -b; d1 <= b; ++d1)
      for (int d2 = -b; d2 <= b; ++d2)
        for (int d3 = -b; d3 <= b; ++d3) {
          const std::array<int, 4> d{d0, d1, d2, d3};
          for (int i = 0; i < kLen1D; ++i) cand[i] = out.minres_levels[i] + d[static_cast<std::size_t>(i)];
          auto c = evaluate_ilr_1d(orig, r_prev2, r_prev1, cand, p, at, ctx);
          ++out.evaluated;
          if (c.cost < out.best.cost) {
            out.best = std::move(c);
            out.displacement = d;
          }
        }
  return out;
}

struct Options1D {
  bool enable_ilr = true;
};

struct Encoded1D {
  std::vector<std::uint8_t> bitstream;  // container + payload
  PixelGrid recon;
  EncodeTrace trace;
  std::size_t blocks_ilr = 0;
  std::size_t blocks_regular = 0;
  double total_cost = 0.0;
};

namespace detail {

inline std::pair<int, int> refs_1d(std::span<const std::uint8_t> recon_row, int x) {
  const int r1 = x >= 1 ? recon_row[static_cast<std::size_t>(x - 1)] : kMidGray;
  const int r2 = x >= 2 ? recon_row[static_cast<std::size_t>(x - 2)] : kMidGray;
  return {r2, r1};
}

}  // namespace detail

// Codes one row into `enc`, writing the reconstruction into `recon_row`.
inline void encode_row_1d(std::span<const std::uint8_t> row, std::span<std::uint8_t> recon_row, const RdParams& p,
                          const SearchParams1D& search, const Options1D& opts, ArithmeticEncoder& enc,
                          ContextSet& ctx, Encoded1D& stats) {
  if (row.size() % kLen1D != 0) throw GeometryError("row length must be a multiple of 4");
  if (recon_row.size() != row.size()) throw GeometryError("reconstruction row size mismatch");
  for (std::size_t x = 0; x < row.size(); x += kLen1D) {
    SampleBlock orig(1, kLen1D);
    for (int i = 0; i < kLen1D; ++i) orig[i] = row[x + static_cast<std::size_t>(i)];
    const auto [r2, r1] = detail::refs_1d(recon_row, static_cast<int>(x));
    const BitCounter at = enc.counter();

    BlockDecision dec;
    Candidate1D best = evaluate_regular_1d(orig, r2, r1, p, at, ctx);
    dec.candidate_costs.push_back(best.cost);
    if (opts.enable_ilr) {
      auto s = search_ilr_1d(orig, r2, r1, p, search, at, ctx);
      dec.candidate_costs.push_back(s.best.cost);
      // Ties keep the regular branch.
      if (s.best.cost < best.cost) {
        best = std::move(s.best);
        dec.chosen = 1;
      }
    }
    const double before = enc.bits();
    write_block_1d(enc, ctx, best.record);
    dec.rate_bits = enc.bits() - before;
    dec.chosen_cost = best.cost;
    dec.algorithm = best.record.flag;
    stats.total_cost += best.cost;
    (best.record.flag == Algorithm::ilr ? stats.blocks_ilr : stats.blocks_regular) += 1;
    stats.trace.blocks.push_back(std::move(dec));
    for (int i = 0; i < kLen1D; ++i) recon_row[x + static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(best.recon[i]);
  }
}

inline Encoded1D encode_image_1d(const PixelGrid& img, const RdParams& p, const SearchParams1D& search,
                                 const Options1D& opts = {}) {
  if (img.width() % kLen1D != 0) throw GeometryError("image width must be a multiple of 4");
  Encoded1D out;
  std::vector<std::uint8_t> recon(img.samples().size());
  ArithmeticEncoder enc;
  ContextSet ctx;
  const auto w = static_cast<std::size_t>(img.width());
  for (int y = 0; y < img.height(); ++y) {
    const auto off = static_cast<std::size_t>(y) * w;
    encode_row_1d(img.samples().subspan(off, w), std::span(recon).subspan(off, w), p, search, opts, enc, ctx, out);
  }
  const auto payload = enc.finish();
  StreamHeader h{StreamMode::k1D, img.width(), img.height(), p.qp, 0, 0};
  out.bitstream = write_container(h, payload);
  out.recon = PixelGrid(img.width(), img.height(), std::move(recon));
  return out;
}

// Decodes a 1D stream. No search runs here: the ILR levels are read directly.
inline PixelGrid decode_image_1d(std::span<const std::uint8_t> bitstream) {
  const auto parsed = read_container(bitstream);
  const auto& h = parsed.header;
  if (h.mode != StreamMode::k1D) throw FormatError("not a 1D stream");
  if (h.width % kLen1D != 0) throw FormatError("1D stream width must be a multiple of 4");
  const RdParams p = RdParams::from_qp(h.qp);
  ArithmeticDecoder dec(parsed.payload);
  ContextSet ctx;
  std::vector<std::uint8_t> recon(static_cast<std::size_t>(h.width) * static_cast<std::size_t>(h.height));
  for (int y = 0; y < h.height; ++y) {
    const std::span<std::uint8_t> row =
        std::span(recon).subspan(static_cast<std::size_t>(y) * static_cast<std::size_t>(h.width),
                                 static_cast<std::size_t>(h.width));
    for (int x = 0; x < h.width; x += kLen1D) {
      const auto [r2, r1] = detail::refs_1d(row, x);
      const bool ilr = dec.decode_bin(ctx.ilr_flag) != 0;
      SampleBlock pred(1, kLen1D);
      if (ilr) {
        const LevelBlock ilr_levels = read_levels(dec, ctx, 1, kLen1D);
        pred = predict_1d_ilr(r2, r1, reconstruct_residual(ilr_levels, p).v).pred;
      } else {
        pred = predict_1d_regular(r2, r1);
      }
      const LevelBlock res = read_levels(dec, ctx, 1, kLen1D);
      const SampleBlock rec = reconstruct(pred, reconstruct_residual(res, p));
      for (int i = 0; i < kLen1D; ++i) row[static_cast<std::size_t>(x + i)] = static_cast<std::uint8_t>(rec[i]);
    }
  }
  dec.finish();
  return PixelGrid(h.width, h.height, std::move(recon));
}

struct RowEncoding1D {
  std::vector<std::uint8_t> bitstream;
  std::vector<std::uint8_t> recon;
  EncodeTrace trace;
};

// Single-row convenience wrappers (a 1-row image).
inline RowEncoding1D encode_row_1d(std::span<const std::uint8_t> row, const RdParams& p, const SearchParams1D& search,
                                   const Options1D& opts = {}) {
  auto e = encode_image_1d(PixelGrid(static_cast<int>(row.size()), 1, std::vector(row.begin(), row.end())), p, search,
                           opts);
  return {std::move(e.bitstream), std::vector(e.recon.samples().begin(), e.recon.samples().end()), std::move(e.trace)};
}

inline std::vector<std::uint8_t> decode_row_1d(std::span<const std::uint8_t> bitstream) {
  const auto img = decode_image_1d(bitstream);
  if (img.height() != 1) throw FormatError("stream holds more than one row");
  return {img.samples().begin(), img.samples().end()};
}

}  // namespace ilrip
