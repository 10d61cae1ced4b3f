#pragma once

// 2D codec on a regular grid of 4x4 blocks. Each block picks the lower RD
// cost of a 4-mode baseline predictor and ILR prediction driven by the best
// codebook centroid.
//
// Block syntax (payload, raster block order):
//   [ilr flag, context-coded; present iff the stream's codebook is non-empty]
//   regular: mode, 2 bypass bits      ilr: index, ceil(log2 N) bypass bits
//   residual levels (shared coefficient binarization)

#include <functional>
#include <iostream>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ilrip/codebook.hpp"
#include "ilrip/container.hpp"
#include "ilrip/decision.hpp"
#include "ilrip/entropy.hpp"
#include "ilrip/predict.hpp"
#include "ilrip/transform.hpp"

namespace ilrip {

constexpr int kBlock2D = 4;

enum class BaselineMode : std::uint8_t { dc = 0, planar = 1, horizontal = 2, vertical = 3 };
constexpr int kBaselineModeCount = 4;
constexpr int kBaselineModeBits = 2;

inline const char* to_string(BaselineMode m) {
  switch (m) {
    case BaselineMode::dc: return "DC";
    case BaselineMode::planar: return "PLANAR";
    case BaselineMode::horizontal: return "HORIZONTAL";
    case BaselineMode::vertical: return "VERTICAL";
  }
  return "?";
}

inline const ScanOrder& raster_4x4() {
  static const ScanOrder s = ScanOrder::raster(kBlock2D, kBlock2D);
  return s;
}

// Baseline intra predictor. DC averages the available top and left samples
// (mid-gray when none are); PLANAR blends horizontal and vertical linear
// interpolations towards the last top and last left reference.
inline SampleBlock predict_baseline(const ReferenceContext& refs, BaselineMode mode) {
  const int h = refs.h;
  const int w = refs.w;
  SampleBlock out(h, w);
  auto top = [&](int c) { return refs.top[static_cast<std::size_t>(c + 1)]; };
  auto left = [&](int r) { return refs.left[static_cast<std::size_t>(r)]; };
  switch (mode) {
    case BaselineMode::dc: {
      int sum = 0;
      int n = 0;
      for (int c = 0; c < w; ++c)
        if (refs.top_available[static_cast<std::size_t>(c + 1)]) sum += top(c), ++n;
      for (int r = 0; r < h; ++r)
        if (refs.left_available[static_cast<std::size_t>(r)]) sum += left(r), ++n;
      const int dc = n == 0 ? kMidGray : (sum + n / 2) / n;
      out.v.assign(out.v.size(), dc);
      break;
    }
    case BaselineMode::planar: {
      const int top_right = top(w - 1);
      const int bottom_left = left(h - 1);
      const int shift = std::bit_width(static_cast<unsigned>(w * h));  // log2(w) + log2(h) + 1
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
          const int hor = (w - 1 - c) * left(r) + (c + 1) * top_right;
          const int ver = (h - 1 - r) * top(c) + (r + 1) * bottom_left;
          out.at(r, c) = (hor * h + ver * w + w * h) >> shift;
        }
      break;
    }
    case BaselineMode::horizontal:
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out.at(r, c) = left(r);
      break;
    case BaselineMode::vertical:
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) out.at(r, c) = top(c);
      break;
  }
  return out;
}

struct Block2DRecord {
  Algorithm flag = Algorithm::regular;
  BaselineMode mode = BaselineMode::dc;  // regular only
  int index = 0;                         // ilr only
  LevelBlock res_levels{kBlock2D, kBlock2D};
};

// `codebook_n` == 0 means the ILR tool is off and no flag is coded.
// `with_flag` == false drops the flag (used for codebook training distances).
template <typename Coder>
void write_block_2d(Coder& c, ContextSet& ctx, const Block2DRecord& rec, std::size_t codebook_n,
                    bool with_flag = true) {
  if (codebook_n > 0 && with_flag) c.encode_bin(ctx.ilr_flag, rec.flag == Algorithm::ilr ? 1 : 0);
  if (rec.flag == Algorithm::ilr)
    write_fixed(c, static_cast<std::uint32_t>(rec.index), index_bits(codebook_n));
  else
    write_fixed(c, static_cast<std::uint32_t>(rec.mode), kBaselineModeBits);
  write_levels(c, ctx, rec.res_levels);
}

struct Candidate2D {
  Block2DRecord record;
  SampleBlock pred{kBlock2D, kBlock2D};
  SampleBlock recon{kBlock2D, kBlock2D};
  std::int64_t distortion = 0;
  double rate = 0.0;
  double cost = std::numeric_limits<double>::infinity();
};

// Where rate is measured from: coder state, contexts, and the stream's codebook size.
struct RateState {
  BitCounter at;
  ContextSet ctx;
  std::size_t codebook_n = 0;
  bool with_flag = true;
};

namespace detail {

inline Candidate2D finish_candidate_2d(const SampleBlock& orig, SampleBlock pred, Block2DRecord rec, const RdParams& p,
                                       const RateState& rs) {
  Candidate2D out;
  RealBlock res(orig.h, orig.w);
  for (int i = 0; i < orig.size(); ++i) res[i] = orig[i] - pred[i];
  rec.res_levels = quantize(dct_forward(std::move(res)), p);
  out.recon = reconstruct(pred, reconstruct_residual(rec.res_levels, p));
  out.distortion = ssd(orig, out.recon);
  out.rate = estimate_rate(rs.at, rs.ctx, [&](BitCounter& c, ContextSet& cs) {
    write_block_2d(c, cs, rec, rs.codebook_n, rs.with_flag);
  });
  out.cost = rd_cost(out.distortion, out.rate, p);
  out.pred = std::move(pred);
  out.record = std::move(rec);
  return out;
}

}  // namespace detail

inline Candidate2D evaluate_baseline(const SampleBlock& orig, const ReferenceContext& refs, BaselineMode mode,
                                     const RdParams& p, const RateState& rs) {
  Block2DRecord rec;
  rec.flag = Algorithm::regular;
  rec.mode = mode;
  return detail::finish_candidate_2d(orig, predict_baseline(refs, mode), std::move(rec), p, rs);
}

// Cost of coding `orig` with `centroid` as ILR signal. The residual is taken
// against the uncorrected prediction x^.
inline Candidate2D evaluate_centroid(const SampleBlock& orig, const ReferenceContext& refs, const IlrSignal& centroid,
                                     int index, const RdParams& p, const RateState& rs) {
  Block2DRecord rec;
  rec.flag = Algorithm::ilr;
  rec.index = index;
  auto pred = predict_block_ilr(refs, centroid, raster_4x4()).pred;
  return detail::finish_candidate_2d(orig, std::move(pred), std::move(rec), p, rs);
}

struct Exploration {
  int index = 0;
  Candidate2D best;
  std::vector<double> costs;  // per centroid
};

// Full codebook exploration; ties resolve to the lowest index.
inline Exploration explore_codebook(const SampleBlock& orig, const ReferenceContext& refs, const Codebook& cb,
                                    const RdParams& p, const RateState& rs) {
  if (cb.empty()) throw Error("explore_codebook: empty codebook");
  Exploration out;
  out.costs.reserve(cb.size());
  for (std::size_t i = 0; i < cb.size(); ++i) {
    auto c = evaluate_centroid(orig, refs, cb.centroids[i], static_cast<int>(i), p, rs);
    out.costs.push_back(c.cost);
    if (c.cost < out.best.cost) {
      out.index = static_cast<int>(i);
      out.best = std::move(c);
    }
  }
  return out;
}

struct BlockEncoding2D {
  Candidate2D chosen;
  BlockDecision decision;
};

// Evaluates the four baseline modes then (with a non-empty codebook) every
// centroid, and keeps the first strict minimum. The decision lists the four
// baseline costs followed by one cost per centroid.
inline BlockEncoding2D encode_block_2d(const SampleBlock& orig, const ReferenceContext& refs, const Codebook* cb,
                                       const RdParams& p, const RateState& rs) {
  BlockEncoding2D out;
  for (int m = 0; m < kBaselineModeCount; ++m) {
    auto c = evaluate_baseline(orig, refs, static_cast<BaselineMode>(m), p, rs);
    out.decision.candidate_costs.push_back(c.cost);
    if (c.cost < out.chosen.cost) {
      out.chosen = std::move(c);
      out.decision.chosen = m;
    }
  }
  if (cb && !cb->empty()) {
    auto e = explore_codebook(orig, refs, *cb, p, rs);
    out.decision.candidate_costs.insert(out.decision.candidate_costs.end(), e.costs.begin(), e.costs.end());
    if (e.best.cost < out.chosen.cost) {
      out.chosen = std::move(e.best);
      out.decision.chosen = kBaselineModeCount + e.index;
    }
  }
  out.decision.chosen_cost = out.chosen.cost;
  out.decision.algorithm = out.chosen.record.flag;
  return out;
}

struct EncodeOptions2D {
  // Receives non-fatal diagnostics such as a codebook/stream QP mismatch.
  std::function<void(const std::string&)> warn = [](const std::string& m) { std::cerr << "warning: " << m << '\n'; };
};

struct Encoded2D {
  std::vector<std::uint8_t> bitstream;
  PixelGrid recon;
  EncodeTrace trace;
  std::size_t blocks_ilr = 0;
  std::size_t blocks_regular = 0;
  double total_cost = 0.0;
  std::size_t payload_bytes = 0;
};

inline void check_codebook_geometry(const Codebook& cb) {
  if (!cb.empty() && (cb.h != kBlock2D || cb.w != kBlock2D)) throw GeometryError("2D codec needs a 4x4 codebook");
}

// Encodes `img` with the given codebook; an empty codebook disables ILR.
inline Encoded2D encode_image(const PixelGrid& img, const Codebook& cb, const RdParams& p,
                              const EncodeOptions2D& opts = {}) {
  if (img.width() % kBlock2D != 0 || img.height() % kBlock2D != 0)
    throw GeometryError("image dimensions must be multiples of 4");
  check_codebook_geometry(cb);
  if (!cb.empty() && cb.qp != p.qp && opts.warn)
    opts.warn("codebook trained for QP " + std::to_string(cb.qp) + " used at QP " + std::to_string(p.qp));

  Encoded2D out;
  PixelGrid recon(img.width(), img.height(), std::uint8_t{0});
  ArithmeticEncoder enc;
  ContextSet ctx;
  const Codebook* book = cb.empty() ? nullptr : &cb;
  for (int by = 0; by < img.height(); by += kBlock2D)
    for (int bx = 0; bx < img.width(); bx += kBlock2D) {
      const BlockGeom g{kBlock2D, kBlock2D, bx, by};
      const auto orig = extract_block(img, g);
      const auto refs = ReferenceContext::from_grid(recon, g);
      auto be = encode_block_2d(orig, refs, book, p, RateState{enc.counter(), ctx, cb.size(), true});
      const double before = enc.bits();
      write_block_2d(enc, ctx, be.chosen.record, cb.size());
      be.decision.rate_bits = enc.bits() - before;
      store_block(recon, g, be.chosen.recon);
      out.total_cost += be.chosen.cost;
      (be.chosen.record.flag == Algorithm::ilr ? out.blocks_ilr : out.blocks_regular) += 1;
      out.trace.blocks.push_back(std::move(be.decision));
    }
  const auto payload = enc.finish();
  out.payload_bytes = payload.size();
  const StreamHeader h{StreamMode::k2D, img.width(), img.height(), p.qp, static_cast<int>(cb.size()),
                       cb.empty() ? 0u : cb.hash()};
  out.bitstream = write_container(h, payload);
  out.recon = std::move(recon);
  return out;
}

struct DecodeStats {
  std::size_t blocks = 0;
  std::size_t centroid_evaluations = 0;  // ILR predictions run
  std::size_t max_centroids_per_block = 0;
};

// Decodes a 2D stream. `cb` may be null for streams coded without ILR.
inline PixelGrid decode_image(std::span<const std::uint8_t> bitstream, const Codebook* cb,
                              DecodeStats* stats = nullptr) {
  const auto parsed = read_container(bitstream);
  const auto& h = parsed.header;
  if (h.mode != StreamMode::k2D) throw FormatError("not a 2D stream");
  if (h.width % kBlock2D != 0 || h.height % kBlock2D != 0) throw FormatError("stream dimensions not multiples of 4");
  const std::size_t n = static_cast<std::size_t>(h.codebook_n);
  if (n > 0) {
    if (!cb) throw FormatError("stream requires a codebook");
    check_codebook_geometry(*cb);
    if (cb->size() != n || cb->hash() != h.codebook_hash) throw FormatError("codebook hash mismatch");
  }
  const RdParams p = RdParams::from_qp(h.qp);
  ArithmeticDecoder dec(parsed.payload);
  ContextSet ctx;
  PixelGrid recon(h.width, h.height, std::uint8_t{0});
  DecodeStats local;
  for (int by = 0; by < h.height; by += kBlock2D)
    for (int bx = 0; bx < h.width; bx += kBlock2D) {
      const BlockGeom g{kBlock2D, kBlock2D, bx, by};
      const auto refs = ReferenceContext::from_grid(recon, g);
      const bool ilr = n > 0 && dec.decode_bin(ctx.ilr_flag) != 0;
      SampleBlock pred(kBlock2D, kBlock2D);
      std::size_t evaluations = 0;
      if (ilr) {
        const auto index = read_fixed(dec, index_bits(n));
        if (index >= n) throw StreamError("codebook index out of range");
        pred = predict_block_ilr(refs, cb->centroids[index], raster_4x4()).pred;
        ++evaluations;
      } else {
        pred = predict_baseline(refs, static_cast<BaselineMode>(read_fixed(dec, kBaselineModeBits)));
      }
      const auto res = read_levels(dec, ctx, kBlock2D, kBlock2D);
      store_block(recon, g, reconstruct(pred, reconstruct_residual(res, p)));
      ++local.blocks;
      local.centroid_evaluations += evaluations;
      local.max_centroids_per_block = std::max(local.max_centroids_per_block, evaluations);
    }
  dec.finish();
  if (stats) *stats = local;
  return recon;
}

}  // namespace ilrip
