#pragma once

// Short-distance pixel prediction with progressive in-loop correction.
//
// Each in-block pixel is predicted from its left (a), top (b) and top-left (c)
// neighbours. Neighbours outside the block come from the reference context;
// neighbours inside the block are the already *corrected* samples
// x~ = clip(round(x^ + y)), where y is the ILR value at that position.

#include <array>
#include <optional>
#include <span>
#include <vector>

#include "ilrip/core.hpp"

namespace ilrip {

// References around an h x w block: top[0] is the top-left corner,
// top[1..w] the row above, left[0..h-1] the column to the left.
struct ReferenceContext {
  int h = 4;
  int w = 4;
  std::vector<int> top;
  std::vector<int> left;
  std::vector<bool> top_available;
  std::vector<bool> left_available;

  static ReferenceContext uniform(int h, int w, int value) {
    ReferenceContext r;
    r.h = h;
    r.w = w;
    r.top.assign(static_cast<std::size_t>(w + 1), clip_sample(value));
    r.left.assign(static_cast<std::size_t>(h), clip_sample(value));
    r.top_available.assign(r.top.size(), true);
    r.left_available.assign(r.left.size(), true);
    return r;
  }

  // Gathers references for the block at `g` from `canvas`; samples outside
  // the picture are unavailable and replaced by mid-gray.
  static ReferenceContext from_grid(const PixelGrid& canvas, const BlockGeom& g) {
    g.validate(canvas);
    ReferenceContext r;
    r.h = g.h;
    r.w = g.w;
    r.top.resize(static_cast<std::size_t>(g.w + 1));
    r.left.resize(static_cast<std::size_t>(g.h));
    r.top_available.resize(r.top.size());
    r.left_available.resize(r.left.size());
    const int y = g.origin_y - 1;
    for (int i = 0; i <= g.w; ++i) {
      const int x = g.origin_x - 1 + i;
      const bool ok = y >= 0 && x >= 0;
      r.top_available[static_cast<std::size_t>(i)] = ok;
      r.top[static_cast<std::size_t>(i)] = ok ? canvas.at(x, y) : kMidGray;
    }
    for (int j = 0; j < g.h; ++j) {
      const bool ok = g.origin_x > 0;
      r.left_available[static_cast<std::size_t>(j)] = ok;
      r.left[static_cast<std::size_t>(j)] = ok ? canvas.at(g.origin_x - 1, g.origin_y + j) : kMidGray;
    }
    return r;
  }

  bool matches(int rows, int cols) const {
    return h == rows && w == cols && top.size() == static_cast<std::size_t>(cols + 1) &&
           left.size() == static_cast<std::size_t>(rows);
  }
};

struct PredictionResult {
  SampleBlock pred;       // x^ per position
  SampleBlock corrected;  // x~ per position
};

// Median edge detector. a = left, b = top, c = top-left.
constexpr int loco_i(int a, int b, int c) {
  const int lo = a < b ? a : b;
  const int hi = a < b ? b : a;
  if (c >= hi) return lo;
  if (c <= lo) return hi;
  return clip_sample(a + b - c);
}

inline int correct(int pred, double ilr_value) { return round_clip(static_cast<double>(pred) + ilr_value); }

// Records every in-block neighbour read as (current scan index, read scan index).
struct AccessLog {
  struct Read {
    int at;
    int from;
  };
  std::vector<Read> reads;
};

namespace detail {

// Sample at (r, c) where r or c may be -1 (reference context) or inside the
// block (taken from `inner`, which must already hold that position).
inline int neighbour(const ReferenceContext& refs, const SampleBlock& inner, const std::vector<int>& rank, int r, int c,
                     int current, AccessLog* log) {
  if (r < 0) return refs.top[static_cast<std::size_t>(c + 1)];
  if (c < 0) return refs.left[static_cast<std::size_t>(r)];
  if (log) log->reads.push_back({current, rank[static_cast<std::size_t>(r * inner.w + c)]});
  return inner.at(r, c);
}

inline std::vector<int> scan_rank(const ScanOrder& scan) {
  std::vector<int> rank(static_cast<std::size_t>(scan.h() * scan.w()));
  int k = 0;
  for (const auto& p : scan.positions()) rank[static_cast<std::size_t>(p.row * scan.w() + p.col)] = k++;
  return rank;
}

inline int predict_at(const ReferenceContext& refs, const SampleBlock& inner, const std::vector<int>& rank, Position p,
                      int current, AccessLog* log) {
  const int a = neighbour(refs, inner, rank, p.row, p.col - 1, current, log);
  const int b = neighbour(refs, inner, rank, p.row - 1, p.col, current, log);
  const int c = neighbour(refs, inner, rank, p.row - 1, p.col - 1, current, log);
  return loco_i(a, b, c);
}

}  // namespace detail

// LOCO-I prediction of one block, correcting each pixel by its ILR value
// before it serves as a reference for later positions.
inline PredictionResult predict_block_ilr(const ReferenceContext& refs, const IlrSignal& ilr, const ScanOrder& scan,
                                          AccessLog* log = nullptr) {
  if (!refs.matches(ilr.h, ilr.w) || scan.h() != ilr.h || scan.w() != ilr.w)
    throw GeometryError("predict_block_ilr: geometry mismatch");
  const auto rank = detail::scan_rank(scan);
  PredictionResult out{SampleBlock(ilr.h, ilr.w), SampleBlock(ilr.h, ilr.w)};
  int k = 0;
  for (const auto& p : scan.positions()) {
    const int pred = detail::predict_at(refs, out.corrected, rank, p, k++, log);
    out.pred.at(p.row, p.col) = pred;
    out.corrected.at(p.row, p.col) = correct(pred, ilr.at(p.row, p.col));
  }
  return out;
}

// Residual that makes every corrected sample equal the original: each pixel
// is predicted from original-valued in-block references.
inline IlrSignal compute_minres(const SampleBlock& original, const ReferenceContext& refs, const ScanOrder& scan) {
  if (!refs.matches(original.h, original.w) || scan.h() != original.h || scan.w() != original.w)
    throw GeometryError("compute_minres: geometry mismatch");
  const auto rank = detail::scan_rank(scan);
  IlrSignal out(original.h, original.w);
  int k = 0;
  for (const auto& p : scan.positions()) {
    const int pred = detail::predict_at(refs, original, rank, p, k++, nullptr);
    out.at(p.row, p.col) = original.at(p.row, p.col) - pred;
  }
  return out;
}

// ---- 1D planar extrapolation (1x4 blocks) ---------------------------------

constexpr int kLen1D = 4;

// Regular 1D branch: per-pixel linear extrapolation from the fixed pair of
// preceding reconstructed samples.
inline SampleBlock predict_1d_regular(int r_prev2, int r_prev1) {
  SampleBlock out(1, kLen1D);
  for (int i = 0; i < kLen1D; ++i) out[i] = clip_sample(r_prev1 + (i + 1) * (r_prev1 - r_prev2));
  return out;
}

// ILR 1D branch: each pixel extrapolates from the two nearest preceding
// corrected samples, falling back to the references at the block start.
inline PredictionResult predict_1d_ilr(int r_prev2, int r_prev1, std::span<const double> ilr) {
  if (ilr.size() != kLen1D) throw GeometryError("predict_1d_ilr: ILR must have 4 values");
  PredictionResult out{SampleBlock(1, kLen1D), SampleBlock(1, kLen1D)};
  int p2 = r_prev2;
  int p1 = r_prev1;
  for (int i = 0; i < kLen1D; ++i) {
    const int pred = clip_sample(2 * p1 - p2);
    const int fixed = correct(pred, ilr[static_cast<std::size_t>(i)]);
    out.pred[i] = pred;
    out.corrected[i] = fixed;
    p2 = p1;
    p1 = fixed;
  }
  return out;
}

inline IlrSignal compute_minres_1d(const SampleBlock& original, int r_prev2, int r_prev1) {
  if (original.h != 1 || original.w != kLen1D) throw GeometryError("compute_minres_1d: block must be 1x4");
  IlrSignal out(1, kLen1D);
  int p2 = r_prev2;
  int p1 = r_prev1;
  for (int i = 0; i < kLen1D; ++i) {
    out[i] = original[i] - clip_sample(2 * p1 - p2);
    p2 = p1;
    p1 = original[i];
  }
  return out;
}

}  // namespace ilrip
