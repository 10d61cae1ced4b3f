#pragma once

// Bitstream container:
//   "ILRB" | version u8 = 1 | mode u8 (0 = 2D, 1 = 1D) | width u16 | height u16 |
//   qp u8 | N u16 | codebook hash u32 | arithmetic-coded payload
// Multi-byte fields are big-endian. 1D streams and 2D streams without the
// ILR tool carry N = 0 and hash = 0.

#include <span>
#include <vector>

#include "ilrip/bytes.hpp"

namespace ilrip {

enum class StreamMode : std::uint8_t { k2D = 0, k1D = 1 };

constexpr unsigned kContainerVersion = 1;
constexpr std::size_t kContainerHeaderSize = 17;

struct StreamHeader {
  StreamMode mode = StreamMode::k2D;
  int width = 0;
  int height = 0;
  int qp = 27;
  int codebook_n = 0;
  std::uint32_t codebook_hash = 0;

  friend bool operator==(const StreamHeader&, const StreamHeader&) = default;
};

inline std::vector<std::uint8_t> write_container(const StreamHeader& h, std::span<const std::uint8_t> payload) {
  if (h.width < 0 || h.width > 0xFFFF || h.height < 0 || h.height > 0xFFFF) throw FormatError("image too large");
  if (h.qp < 0 || h.qp > 255) throw FormatError("qp out of range");
  if (h.codebook_n < 0 || h.codebook_n > 0xFFFF) throw FormatError("codebook size out of range");
  ByteWriter out;
  out.tag("ILRB");
  out.u8(kContainerVersion);
  out.u8(static_cast<unsigned>(h.mode));
  out.u16(static_cast<unsigned>(h.width));
  out.u16(static_cast<unsigned>(h.height));
  out.u8(static_cast<unsigned>(h.qp));
  out.u16(static_cast<unsigned>(h.codebook_n));
  out.u32(h.codebook_hash);
  out.bytes(payload);
  return std::move(out.data());
}

struct ParsedContainer {
  StreamHeader header;
  std::span<const std::uint8_t> payload;
};

inline ParsedContainer read_container(std::span<const std::uint8_t> bytes) {
  ByteReader in(bytes);
  if (bytes.size() < kContainerHeaderSize || !in.tag("ILRB")) throw FormatError("not an ILRB stream");
  ParsedContainer p;
  if (in.u8() != kContainerVersion) throw FormatError("unsupported stream version");
  const unsigned mode = in.u8();
  if (mode > 1) throw FormatError("unknown stream mode");
  p.header.mode = static_cast<StreamMode>(mode);
  p.header.width = static_cast<int>(in.u16());
  p.header.height = static_cast<int>(in.u16());
  p.header.qp = static_cast<int>(in.u8());
  p.header.codebook_n = static_cast<int>(in.u16());
  p.header.codebook_hash = in.u32();
  p.payload = in.rest();
  return p;
}

}  // namespace ilrip
