#pragma once

// Orthonormal length-4 DCT-II (row transform for 1x4, separable for 4x4)
// and a round-to-nearest uniform scalar quantizer.

#include <array>
#include <cmath>
#include <numbers>

#include "ilrip/core.hpp"

namespace ilrip {

using Dct4Matrix = std::array<std::array<double, 4>, 4>;

// basis[k][n] = s_k cos(pi (2n + 1) k / 8). Rows 0 and 2 are exactly +-1/2,
// so even-frequency coefficients of integer data are exact and quantizer
// ties resolve the same way on every platform.
inline const Dct4Matrix& dct4_basis() {
  static const Dct4Matrix m = [] {
    const double c1 = std::sqrt(0.5) * std::cos(std::numbers::pi / 8.0);
    const double c3 = std::sqrt(0.5) * std::cos(3.0 * std::numbers::pi / 8.0);
    return Dct4Matrix{{{0.5, 0.5, 0.5, 0.5}, {c1, c3, -c3, -c1}, {0.5, -0.5, -0.5, 0.5}, {c3, -c1, c1, -c3}}};
  }();
  return m;
}

namespace detail {

inline void check_transform_shape(const RealBlock& b) {
  if (!BlockGeom::supported_shape(b.h, b.w)) throw GeometryError("transform: unsupported block shape");
}

template <bool Inverse>
void dct4_rows(RealBlock& b) {
  const auto& t = dct4_basis();
  for (int r = 0; r < b.h; ++r) {
    std::array<double, 4> in{b.at(r, 0), b.at(r, 1), b.at(r, 2), b.at(r, 3)};
    for (int k = 0; k < 4; ++k) {
      double acc = 0.0;
      for (int n = 0; n < 4; ++n) acc += (Inverse ? t[n][k] : t[k][n]) * in[static_cast<std::size_t>(n)];
      b.at(r, k) = acc;
    }
  }
}

template <bool Inverse>
void dct4_cols(RealBlock& b) {
  const auto& t = dct4_basis();
  for (int c = 0; c < b.w; ++c) {
    std::array<double, 4> in{b.at(0, c), b.at(1, c), b.at(2, c), b.at(3, c)};
    for (int k = 0; k < 4; ++k) {
      double acc = 0.0;
      for (int n = 0; n < 4; ++n) acc += (Inverse ? t[n][k] : t[k][n]) * in[static_cast<std::size_t>(n)];
      b.at(k, c) = acc;
    }
  }
}

}  // namespace detail

inline RealBlock dct_forward(RealBlock spatial) {
  detail::check_transform_shape(spatial);
  detail::dct4_rows<false>(spatial);
  if (spatial.h == 4) detail::dct4_cols<false>(spatial);
  return spatial;
}

inline RealBlock dct_inverse(RealBlock coeffs) {
  detail::check_transform_shape(coeffs);
  if (coeffs.h == 4) detail::dct4_cols<true>(coeffs);
  detail::dct4_rows<true>(coeffs);
  return coeffs;
}

inline int quantize(double coeff, double qstep) {
  const int level = static_cast<int>(std::floor(std::abs(coeff) / qstep + 0.5));
  return coeff < 0 ? -level : level;
}

inline double dequantize(int level, double qstep) { return level * qstep; }

inline LevelBlock quantize(const RealBlock& coeffs, const RdParams& p) {
  LevelBlock out(coeffs.h, coeffs.w);
  for (int i = 0; i < coeffs.size(); ++i) out[i] = quantize(coeffs[i], p.qstep);
  return out;
}

inline RealBlock dequantize(const LevelBlock& levels, const RdParams& p) {
  RealBlock out(levels.h, levels.w);
  for (int i = 0; i < levels.size(); ++i) out[i] = dequantize(levels[i], p.qstep);
  return out;
}

template <typename T>
RealBlock to_real(const Block<T>& b) {
  RealBlock out(b.h, b.w);
  for (int i = 0; i < b.size(); ++i) out[i] = static_cast<double>(b[i]);
  return out;
}

// Spatial signal decoded from quantized levels.
inline RealBlock reconstruct_residual(const LevelBlock& levels, const RdParams& p) {
  return dct_inverse(dequantize(levels, p));
}

// clip(round(pred + residual)) per position.
inline SampleBlock reconstruct(const SampleBlock& pred, const RealBlock& residual) {
  if (!pred.same_shape(residual)) throw GeometryError("reconstruct: shape mismatch");
  SampleBlock out(pred.h, pred.w);
  for (int i = 0; i < pred.size(); ++i) out[i] = round_clip(pred[i] + residual[i]);
  return out;
}

}  // namespace ilrip
