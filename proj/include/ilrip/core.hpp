#pragma once

// Shared value types for the ILR intra codec: sample grids, small blocks,
// scan orders, rate-distortion parameters and distortion metrics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace ilrip {

constexpr int kBitDepth = 8;
constexpr int kMaxSample = (1 << kBitDepth) - 1;
constexpr int kMidGray = 1 << (kBitDepth - 1);

// Error hierarchy. Everything thrown by the library derives from Error.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct GeometryError : Error {
  using Error::Error;
};
struct StreamError : Error {
  using Error::Error;
};
struct FormatError : Error {
  using Error::Error;
};
struct IoError : Error {
  using Error::Error;
};

constexpr int clip_sample(int v) { return std::clamp(v, 0, kMaxSample); }

// Round half away from zero, then clip to the sample range.
inline int round_clip(double v) { return clip_sample(static_cast<int>(std::lround(v))); }

// Row-major h x w block of values. Used for sample blocks, residuals,
// coefficients and ILR signals.
template <typename T>
struct Block {
  int h = 0;
  int w = 0;
  std::vector<T> v;

  Block() = default;
  Block(int rows, int cols, T fill = T{}) : h(rows), w(cols), v(static_cast<std::size_t>(rows * cols), fill) {
    if (rows <= 0 || cols <= 0) throw GeometryError("block dimensions must be positive");
  }
  Block(int rows, int cols, std::vector<T> values) : h(rows), w(cols), v(std::move(values)) {
    if (rows <= 0 || cols <= 0) throw GeometryError("block dimensions must be positive");
    if (v.size() != static_cast<std::size_t>(rows * cols)) throw GeometryError("block value count != h*w");
  }

  int size() const { return h * w; }
  T& at(int r, int c) { return v[static_cast<std::size_t>(r * w + c)]; }
  const T& at(int r, int c) const { return v[static_cast<std::size_t>(r * w + c)]; }
  T& operator[](int i) { return v[static_cast<std::size_t>(i)]; }
  const T& operator[](int i) const { return v[static_cast<std::size_t>(i)]; }
  template <typename U>
  bool same_shape(const Block<U>& o) const { return h == o.h && w == o.w; }

  friend bool operator==(const Block&, const Block&) = default;
};

using SampleBlock = Block<int>;     // 8-bit samples held as int
using LevelBlock = Block<int>;      // quantized transform levels
using RealBlock = Block<double>;    // spatial residuals or transform coefficients
using IlrSignal = Block<double>;    // in-loop correction values, one per position

// 8-bit luma image.
class PixelGrid {
 public:
  PixelGrid() = default;
  PixelGrid(int width, int height, std::uint8_t fill = 0)
      : width_(width), height_(height), samples_(checked_area(width, height), fill) {}
  PixelGrid(int width, int height, std::vector<std::uint8_t> samples)
      : width_(width), height_(height), samples_(std::move(samples)) {
    if (samples_.size() != checked_area(width, height)) throw GeometryError("sample count != width*height");
  }

  int width() const { return width_; }
  int height() const { return height_; }
  std::span<const std::uint8_t> samples() const { return samples_; }
  std::uint8_t at(int x, int y) const { return samples_[index(x, y)]; }
  void set(int x, int y, int value) { samples_[index(x, y)] = static_cast<std::uint8_t>(clip_sample(value)); }
  bool same_shape(const PixelGrid& o) const { return width_ == o.width_ && height_ == o.height_; }

  friend bool operator==(const PixelGrid&, const PixelGrid&) = default;

 private:
  static std::size_t checked_area(int width, int height) {
    if (width < 0 || height < 0) throw GeometryError("negative image dimensions");
    return static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  }
  std::size_t index(int x, int y) const {
    return static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(x);
  }

  int width_ = 0;
  int height_ = 0;
  std::vector<std::uint8_t> samples_;
};

// Placement of a block inside a grid. Only 1x4 and 4x4 are supported.
struct BlockGeom {
  int h = 4;
  int w = 4;
  int origin_x = 0;
  int origin_y = 0;

  static bool supported_shape(int h, int w) { return (h == 1 && w == 4) || (h == 4 && w == 4); }

  void validate(const PixelGrid& grid) const {
    if (!supported_shape(h, w)) throw GeometryError("unsupported block shape " + std::to_string(h) + "x" + std::to_string(w));
    if (origin_x < 0 || origin_y < 0 || origin_x + w > grid.width() || origin_y + h > grid.height())
      throw GeometryError("block exceeds grid bounds");
  }
};

inline SampleBlock extract_block(const PixelGrid& grid, const BlockGeom& g) {
  g.validate(grid);
  SampleBlock b(g.h, g.w);
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c) b.at(r, c) = grid.at(g.origin_x + c, g.origin_y + r);
  return b;
}

inline void store_block(PixelGrid& grid, const BlockGeom& g, const SampleBlock& b) {
  g.validate(grid);
  for (int r = 0; r < g.h; ++r)
    for (int c = 0; c < g.w; ++c) grid.set(g.origin_x + c, g.origin_y + r, b.at(r, c));
}

struct Position {
  int row = 0;
  int col = 0;
  friend bool operator==(const Position&, const Position&) = default;
};

// Order in which in-block pixels are predicted and corrected.
class ScanOrder {
 public:
  static ScanOrder raster(int h, int w) {
    std::vector<Position> p;
    p.reserve(static_cast<std::size_t>(h * w));
    for (int r = 0; r < h; ++r)
      for (int c = 0; c < w; ++c) p.push_back({r, c});
    return ScanOrder(h, w, std::move(p));
  }

  // Throws unless `positions` is a causal permutation of the h x w grid:
  // top, left and top-left in-block neighbours must come earlier.
  ScanOrder(int h, int w, std::vector<Position> positions) : h_(h), w_(w), pos_(std::move(positions)) {
    if (h <= 0 || w <= 0 || pos_.size() != static_cast<std::size_t>(h * w)) throw GeometryError("scan size mismatch");
    std::vector<int> rank(static_cast<std::size_t>(h * w), -1);
    for (std::size_t k = 0; k < pos_.size(); ++k) {
      const auto [r, c] = pos_[k];
      if (r < 0 || r >= h || c < 0 || c >= w) throw GeometryError("scan position out of block");
      auto& slot = rank[static_cast<std::size_t>(r * w + c)];
      if (slot >= 0) throw GeometryError("scan visits a position twice");
      slot = static_cast<int>(k);
    }
    for (std::size_t k = 0; k < pos_.size(); ++k) {
      const auto [r, c] = pos_[k];
      auto earlier = [&](int rr, int cc) {
        return rr < 0 || cc < 0 || rank[static_cast<std::size_t>(rr * w + cc)] < static_cast<int>(k);
      };
      if (!earlier(r - 1, c) || !earlier(r, c - 1) || !earlier(r - 1, c - 1))
        throw GeometryError("scan order is not causal");
    }
  }

  int h() const { return h_; }
  int w() const { return w_; }
  std::span<const Position> positions() const { return pos_; }
  std::size_t size() const { return pos_.size(); }

 private:
  int h_;
  int w_;
  std::vector<Position> pos_;
};

// QP-derived quantizer step and Lagrange multiplier (HEVC-style forms).
struct RdParams {
  int qp = 27;
  double qstep = 1.0;
  double lambda = 1.0;

  static RdParams from_qp(int qp) {
    if (qp < 0) throw Error("qp must be non-negative");
    return {qp, std::exp2((qp - 4) / 6.0), 0.57 * std::exp2((qp - 12) / 3.0)};
  }
};

inline double rd_cost(std::int64_t distortion, double rate_bits, const RdParams& p) {
  return static_cast<double>(distortion) + p.lambda * rate_bits;
}

template <typename A, typename B>
std::int64_t ssd(std::span<const A> a, std::span<const B> b) {
  if (a.size() != b.size()) throw GeometryError("ssd: region size mismatch");
  std::int64_t s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const std::int64_t d = static_cast<std::int64_t>(a[i]) - static_cast<std::int64_t>(b[i]);
    s += d * d;
  }
  return s;
}

inline std::int64_t ssd(const SampleBlock& a, const SampleBlock& b) {
  if (!a.same_shape(b)) throw GeometryError("ssd: block shape mismatch");
  return ssd(std::span<const int>(a.v), std::span<const int>(b.v));
}

inline std::int64_t ssd(const PixelGrid& a, const PixelGrid& b) {
  if (!a.same_shape(b)) throw GeometryError("ssd: grid shape mismatch");
  return ssd(a.samples(), b.samples());
}

// PSNR in dB for 8-bit content; +infinity when the grids are identical.
inline double psnr(const PixelGrid& orig, const PixelGrid& recon) {
  const auto err = ssd(orig, recon);
  if (err == 0) return std::numeric_limits<double>::infinity();
  const double mse = static_cast<double>(err) / static_cast<double>(orig.samples().size());
  return 10.0 * std::log10(static_cast<double>(kMaxSample * kMaxSample) / mse);
}

}  // namespace ilrip
