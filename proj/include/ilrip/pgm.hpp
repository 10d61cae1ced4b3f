#pragma once

// Binary PGM (P5, maxval 255) reading and writing.

#include <cctype>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include "ilrip/core.hpp"

namespace ilrip {

namespace detail {

inline void skip_pgm_space(const std::vector<std::uint8_t>& buf, std::size_t& pos) {
  while (pos < buf.size()) {
    if (buf[pos] == '#') {
      while (pos < buf.size() && buf[pos] != '\n') ++pos;
    } else if (std::isspace(buf[pos])) {
      ++pos;
    } else {
      break;
    }
  }
}

inline long read_pgm_int(const std::vector<std::uint8_t>& buf, std::size_t& pos) {
  skip_pgm_space(buf, pos);
  if (pos >= buf.size() || !std::isdigit(buf[pos])) throw FormatError("pgm: expected integer in header");
  long v = 0;
  while (pos < buf.size() && std::isdigit(buf[pos])) {
    v = v * 10 + (buf[pos] - '0');
    if (v > 1'000'000) throw FormatError("pgm: header value too large");
    ++pos;
  }
  return v;
}

}  // namespace detail

inline PixelGrid decode_pgm(const std::vector<std::uint8_t>& buf) {
  if (buf.size() < 2 || buf[0] != 'P') throw FormatError("pgm: missing magic");
  if (buf[1] != '5') throw FormatError("pgm: only binary P5 is supported");
  std::size_t pos = 2;
  const long width = detail::read_pgm_int(buf, pos);
  const long height = detail::read_pgm_int(buf, pos);
  const long maxval = detail::read_pgm_int(buf, pos);
  if (maxval != kMaxSample) throw FormatError("pgm: maxval must be 255");
  if (pos >= buf.size() || !std::isspace(buf[pos])) throw FormatError("pgm: malformed header");
  ++pos;  // exactly one whitespace byte before the raster
  const auto count = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
  if (buf.size() - pos < count) throw FormatError("pgm: truncated raster");
  std::vector<std::uint8_t> samples(buf.begin() + static_cast<std::ptrdiff_t>(pos),
                                    buf.begin() + static_cast<std::ptrdiff_t>(pos + count));
  return PixelGrid(static_cast<int>(width), static_cast<int>(height), std::move(samples));
}

inline std::vector<std::uint8_t> encode_pgm(const PixelGrid& img) {
  const std::string header = "P5\n" + std::to_string(img.width()) + " " + std::to_string(img.height()) + "\n255\n";
  std::vector<std::uint8_t> out(header.begin(), header.end());
  out.insert(out.end(), img.samples().begin(), img.samples().end());
  return out;
}

inline std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IoError("read failed: " + path.string());
  return data;
}

// Writes via a temporary sibling and renames, so readers never observe a
// partially written file.
inline void write_file_atomic(const std::filesystem::path& path, const std::vector<std::uint8_t>& data) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string());
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) throw IoError("write failed: " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw IoError("cannot rename onto " + path.string());
  }
}

inline PixelGrid read_pgm(const std::filesystem::path& path) { return decode_pgm(read_file(path)); }

inline void write_pgm(const std::filesystem::path& path, const PixelGrid& img) { write_file_atomic(path, encode_pgm(img)); }

}  // namespace ilrip
