#pragma once

// Adaptive binary range coder with bypass bits, plus the syntax-element
// binarizations shared by the 1D and 2D codecs.
//
// Coder state: 32-bit range, 33-bit low with carry propagation through a
// cached byte and a run of pending 0xFF bytes. Probabilities are 15-bit
// estimates of P(bin == 1). The stream is closed with the shortest byte
// suffix that pins a value inside the final interval; the decoder
// zero-extends past the end and checks the exact payload length on finish().
//
// Rate is measured as the information position 8 * shifts + 32 - log2(range),
// which depends only on (range, shifts). BitCounter tracks just that state,
// so trial encodes are cheap and equal the committed cost exactly.

#include <bit>
#include <cmath>
#include <cstdint>
#include <span>
#include <vector>

#include "ilrip/core.hpp"

namespace ilrip {

constexpr int kProbBits = 15;
constexpr int kProbOne = 1 << kProbBits;
constexpr int kAdaptShift = 5;
constexpr std::uint32_t kRangeTop = 1u << 24;

struct BinContext {
  std::uint16_t state = kProbOne / 2;  // P(bin == 1) * 2^15

  // Moves the estimate 1/32 of the way towards the coded bin. Truncation
  // keeps the state inside [31, 2^15 - 31] from the equiprobable start.
  void update(int bin) {
    if (bin)
      state = static_cast<std::uint16_t>(state + ((kProbOne - state) >> kAdaptShift));
    else
      state = static_cast<std::uint16_t>(state - (state >> kAdaptShift));
  }
};

// Context set shared by both codecs.
struct ContextSet {
  BinContext ilr_flag;
  BinContext cbf;
  BinContext sig_dc;
  BinContext sig_ac;
};

namespace detail {

inline std::uint32_t split(std::uint32_t range, const BinContext& ctx) { return (range >> kProbBits) * ctx.state; }

inline double bit_position(std::uint64_t shifts, std::uint32_t range) {
  return 8.0 * static_cast<double>(shifts) + 32.0 - std::log2(static_cast<double>(range));
}

// Bytes needed to close a stream whose final range is `range`.
inline int flush_bytes(std::uint32_t range) {
  const int j = 31 - std::countl_zero(range);
  return (32 - j + 7) / 8;
}

}  // namespace detail

// Counts rate without producing bytes.
class BitCounter {
 public:
  void encode_bin(BinContext& ctx, int bin) {
    const std::uint32_t bound = detail::split(range_, ctx);
    range_ = bin ? bound : range_ - bound;
    ctx.update(bin);
    normalize();
  }
  void encode_bypass(int /*bit*/) {
    range_ >>= 1;
    normalize();
  }
  double bits() const { return detail::bit_position(shifts_, range_); }

 private:
  friend class ArithmeticEncoder;
  void normalize() {
    while (range_ < kRangeTop) {
      range_ <<= 8;
      ++shifts_;
    }
  }
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint64_t shifts_ = 0;
};

class ArithmeticEncoder {
 public:
  void encode_bin(BinContext& ctx, int bin) {
    const std::uint32_t bound = detail::split(range_, ctx);
    if (bin) {
      range_ = bound;
    } else {
      low_ += bound;
      range_ -= bound;
    }
    ctx.update(bin);
    normalize();
  }

  void encode_bypass(int bit) {
    range_ >>= 1;
    if (bit) low_ += range_;
    normalize();
  }

  double bits() const { return detail::bit_position(shifts_, range_); }

  BitCounter counter() const {
    BitCounter c;
    c.range_ = range_;
    c.shifts_ = shifts_;
    return c;
  }

  // Closes the stream and returns the payload. The encoder is spent afterwards.
  std::vector<std::uint8_t> finish() {
    if (finished_) throw Error("encoder already finished");
    finished_ = true;
    const int j = 31 - std::countl_zero(range_);
    const std::uint64_t mask = (std::uint64_t{1} << j) - 1;
    low_ = (low_ + mask) & ~mask;
    const int n = detail::flush_bytes(range_);
    for (int i = 0; i <= n; ++i) shift_low();
    return std::move(bytes_);
  }

 private:
  void normalize() {
    while (range_ < kRangeTop) {
      range_ <<= 8;
      ++shifts_;
      shift_low();
    }
  }

  void shift_low() {
    if (low_ < 0xFF000000u || low_ >= (std::uint64_t{1} << 32)) {
      const auto carry = static_cast<std::uint8_t>(low_ >> 32);
      std::uint8_t byte = cache_;
      do {
        emit(static_cast<std::uint8_t>(byte + carry));
        byte = 0xFF;
      } while (--pending_ != 0);
      cache_ = static_cast<std::uint8_t>(low_ >> 24);
    }
    ++pending_;
    low_ = (low_ & 0x00FFFFFFu) << 8;
  }

  void emit(std::uint8_t b) {
    // The first byte is the initial cache and is always zero; it is not stored.
    if (!started_) {
      started_ = true;
      return;
    }
    bytes_.push_back(b);
  }

  std::uint64_t low_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint8_t cache_ = 0;
  std::uint64_t pending_ = 1;
  std::uint64_t shifts_ = 0;
  bool started_ = false;
  bool finished_ = false;
  std::vector<std::uint8_t> bytes_;
};

class ArithmeticDecoder {
 public:
  explicit ArithmeticDecoder(std::span<const std::uint8_t> data) : data_(data) {
    for (int i = 0; i < 4; ++i) code_ = (code_ << 8) | next_byte();
  }

  int decode_bin(BinContext& ctx) {
    check_state();
    const std::uint32_t bound = detail::split(range_, ctx);
    int bin;
    if (code_ < bound) {
      range_ = bound;
      bin = 1;
    } else {
      code_ -= bound;
      range_ -= bound;
      bin = 0;
    }
    ctx.update(bin);
    normalize();
    return bin;
  }

  int decode_bypass() {
    check_state();
    range_ >>= 1;
    int bit = 0;
    if (code_ >= range_) {
      code_ -= range_;
      bit = 1;
    }
    normalize();
    return bit;
  }

  double bits() const { return detail::bit_position(shifts_, range_); }

  // Verifies that the payload ends exactly where the encoder closed it.
  void finish() const {
    const std::uint64_t expected = shifts_ + static_cast<std::uint64_t>(detail::flush_bytes(range_));
    if (expected != data_.size()) throw StreamError("payload length does not match its content");
  }

 private:
  void check_state() const {
    if (code_ >= range_) throw StreamError("corrupt arithmetic-coded payload");
  }

  void normalize() {
    while (range_ < kRangeTop) {
      range_ <<= 8;
      code_ = (code_ << 8) | next_byte();
      ++shifts_;
    }
  }

  std::uint32_t next_byte() {
    if (pos_ < data_.size()) return data_[pos_++];
    // The flush may omit up to three trailing zero bytes of the final value.
    if (++pos_ > data_.size() + 3) throw StreamError("payload exhausted");
    return 0;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  std::uint32_t code_ = 0;
  std::uint32_t range_ = 0xFFFFFFFFu;
  std::uint64_t shifts_ = 0;
};

// ---- syntax elements --------------------------------------------------------

constexpr int kMaxExpGolombPrefix = 24;

template <typename Coder>
void write_fixed(Coder& c, std::uint32_t value, int nbits) {
  for (int i = nbits - 1; i >= 0; --i) c.encode_bypass(static_cast<int>((value >> i) & 1u));
}

inline std::uint32_t read_fixed(ArithmeticDecoder& d, int nbits) {
  std::uint32_t v = 0;
  for (int i = 0; i < nbits; ++i) v = (v << 1) | static_cast<std::uint32_t>(d.decode_bypass());
  return v;
}

// Order-0 exp-Golomb: k zeros, then the (k + 1)-bit value v + 1.
template <typename Coder>
void write_exp_golomb(Coder& c, std::uint32_t v) {
  const std::uint32_t x = v + 1;
  const int k = 31 - std::countl_zero(x);
  if (k > kMaxExpGolombPrefix) throw Error("exp-Golomb value too large");
  for (int i = 0; i < k; ++i) c.encode_bypass(0);
  write_fixed(c, x, k + 1);
}

inline std::uint32_t read_exp_golomb(ArithmeticDecoder& d) {
  int k = 0;
  while (d.decode_bypass() == 0) {
    if (++k > kMaxExpGolombPrefix) throw StreamError("exp-Golomb prefix too long");
  }
  const std::uint32_t x = (1u << k) | read_fixed(d, k);
  return x - 1;
}

// Coefficient block: coded-block flag; then per position in raster order a
// significance bin (DC / non-DC contexts), and for nonzero levels a bypass
// sign and |level| - 1 in exp-Golomb.
template <typename Coder>
void write_levels(Coder& c, ContextSet& ctx, const LevelBlock& levels) {
  bool any = false;
  for (int l : levels.v) any = any || l != 0;
  c.encode_bin(ctx.cbf, any ? 1 : 0);
  if (!any) return;
  for (int i = 0; i < levels.size(); ++i) {
    const int l = levels[i];
    c.encode_bin(i == 0 ? ctx.sig_dc : ctx.sig_ac, l != 0 ? 1 : 0);
    if (l == 0) continue;
    c.encode_bypass(l < 0 ? 1 : 0);
    write_exp_golomb(c, static_cast<std::uint32_t>(std::abs(l) - 1));
  }
}

inline LevelBlock read_levels(ArithmeticDecoder& d, ContextSet& ctx, int h, int w) {
  LevelBlock levels(h, w, 0);
  if (!d.decode_bin(ctx.cbf)) return levels;
  for (int i = 0; i < levels.size(); ++i) {
    if (!d.decode_bin(i == 0 ? ctx.sig_dc : ctx.sig_ac)) continue;
    const bool negative = d.decode_bypass() != 0;
    const auto mag = static_cast<int>(read_exp_golomb(d)) + 1;
    levels[i] = negative ? -mag : mag;
  }
  return levels;
}

// Bits needed by a fixed-length index over n entries (0 for n <= 1).
inline int index_bits(std::size_t n) { return n <= 1 ? 0 : std::bit_width(n - 1); }

// Rate of `write(counter, contexts)` from the encoder's current state,
// computed on scratch copies; the encoder and `ctx` are not touched.
template <typename F>
double estimate_rate(const BitCounter& from, const ContextSet& ctx, F&& write) {
  BitCounter scratch = from;
  ContextSet scratch_ctx = ctx;
  write(scratch, scratch_ctx);
  return scratch.bits() - from.bits();
}

}  // namespace ilrip
