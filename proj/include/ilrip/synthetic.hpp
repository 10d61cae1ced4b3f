#pragma once

// Deterministic synthetic test content.

#include <cmath>
#include <cstdint>
#include <random>
#include <string>

#include "ilrip/core.hpp"

namespace ilrip::synth {

namespace detail {
inline int uniform(std::mt19937_64& rng, int lo, int hi) {
  return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
}
}  // namespace detail

// Linear ramp with a seeded direction.
inline PixelGrid gradient(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double gx = detail::uniform(rng, -200, 200) / 100.0;
  const double gy = detail::uniform(rng, -200, 200) / 100.0;
  const double base = detail::uniform(rng, 40, 200);
  PixelGrid img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, static_cast<int>(std::lround(base + gx * (x - w / 2.0) + gy * (y - h / 2.0))));
  return img;
}

// Flat regions separated by sharp edges: overlapping rectangles and
// half-planes with random positions, so edges cut through block interiors.
inline PixelGrid step_edges(int w, int h, std::uint64_t seed, int shapes = 12) {
  std::mt19937_64 rng(seed);
  PixelGrid img(w, h, static_cast<std::uint8_t>(detail::uniform(rng, 20, 235)));
  for (int s = 0; s < shapes; ++s) {
    const int value = detail::uniform(rng, 0, 255);
    if (rng() % 3 == 0) {
      const double a = detail::uniform(rng, -100, 100) / 50.0;
      const double b = detail::uniform(rng, 0, std::max(1, h));
      for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
          if (y > a * (x - w / 2.0) + b) img.set(x, y, value);
    } else {
      const int x0 = detail::uniform(rng, 0, w - 1);
      const int y0 = detail::uniform(rng, 0, h - 1);
      const int x1 = std::min(w, x0 + detail::uniform(rng, 3, std::max(3, w / 2)));
      const int y1 = std::min(h, y0 + detail::uniform(rng, 3, std::max(3, h / 2)));
      for (int y = y0; y < y1; ++y)
        for (int x = x0; x < x1; ++x) img.set(x, y, value);
    }
  }
  return img;
}

// Uniform noise around a mid level.
inline PixelGrid noise(int w, int h, std::uint64_t seed, int amplitude = 40) {
  std::mt19937_64 rng(seed);
  const int base = detail::uniform(rng, 60, 190);
  PixelGrid img(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) img.set(x, y, base + detail::uniform(rng, -amplitude, amplitude));
  return img;
}

// Rows of flat runs with abrupt level changes at arbitrary offsets.
inline PixelGrid step_rows(int w, int h, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  PixelGrid img(w, h);
  for (int y = 0; y < h; ++y) {
    int level = detail::uniform(rng, 0, 255);
    int next_change = detail::uniform(rng, 2, 13);
    for (int x = 0; x < w; ++x) {
      if (x == next_change) {
        level = detail::uniform(rng, 0, 255);
        next_change = x + detail::uniform(rng, 3, 14);
      }
      img.set(x, y, level);
    }
  }
  return img;
}

}  // namespace ilrip::synth
