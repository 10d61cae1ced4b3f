#pragma once

// ILR codebook and its file format:
//   "ILCB" | N u16 | h u8 | w u8 | qp u8 | N*h*w float64, all big-endian,
//   centroids in order, values row-major.
// The codebook hash is FNV-1a over the complete file bytes.

#include <filesystem>
#include <vector>

#include "ilrip/bytes.hpp"
#include "ilrip/core.hpp"
#include "ilrip/pgm.hpp"

namespace ilrip {

struct Codebook {
  int qp = 27;
  int h = 4;
  int w = 4;
  std::vector<IlrSignal> centroids;

  std::size_t size() const { return centroids.size(); }
  bool empty() const { return centroids.empty(); }

  void validate() const {
    if (h <= 0 || w <= 0 || h > 255 || w > 255) throw FormatError("codebook geometry out of range");
    if (qp < 0 || qp > 255) throw FormatError("codebook qp out of range");
    if (centroids.size() > 0xFFFF) throw FormatError("codebook has too many entries");
    for (const auto& c : centroids) {
      if (c.h != h || c.w != w) throw GeometryError("centroid geometry differs from codebook geometry");
      for (double v : c.v)
        if (!std::isfinite(v)) throw FormatError("centroid value is not finite");
    }
  }

  std::vector<std::uint8_t> serialize() const {
    validate();
    ByteWriter out;
    out.tag("ILCB");
    out.u16(static_cast<unsigned>(centroids.size()));
    out.u8(static_cast<unsigned>(h));
    out.u8(static_cast<unsigned>(w));
    out.u8(static_cast<unsigned>(qp));
    for (const auto& c : centroids)
      for (double v : c.v) out.f64(v);
    return std::move(out.data());
  }

  static Codebook parse(std::span<const std::uint8_t> bytes) {
    ByteReader in(bytes);
    if (!in.tag("ILCB")) throw FormatError("not a codebook file");
    Codebook cb;
    const unsigned n = in.u16();
    cb.h = static_cast<int>(in.u8());
    cb.w = static_cast<int>(in.u8());
    cb.qp = static_cast<int>(in.u8());
    if (cb.h == 0 || cb.w == 0) throw FormatError("codebook geometry is empty");
    if (in.remaining() != static_cast<std::size_t>(n) * static_cast<std::size_t>(cb.h * cb.w) * 8)
      throw FormatError("codebook payload size mismatch");
    cb.centroids.reserve(n);
    for (unsigned i = 0; i < n; ++i) {
      IlrSignal c(cb.h, cb.w);
      for (auto& v : c.v) v = in.f64();
      cb.centroids.push_back(std::move(c));
    }
    cb.validate();
    return cb;
  }

  std::uint32_t hash() const { return fnv1a32(serialize()); }
};

inline Codebook read_codebook(const std::filesystem::path& p) { return Codebook::parse(read_file(p)); }
inline void write_codebook(const std::filesystem::path& p, const Codebook& cb) { write_file_atomic(p, cb.serialize()); }

}  // namespace ilrip
