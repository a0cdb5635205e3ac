#pragma once

#include <cstdint>
#include <vector>

#include "landing/geometry.hpp"

namespace landing {

/// 8-bit image, row-major, interleaved channels (1 = gray, 3 = RGB).
struct Frame {
  int width = 0;
  int height = 0;
  int channels = 1;
  std::vector<std::uint8_t> data;

  Frame() = default;
  Frame(int w, int h, int ch, std::uint8_t fill = 0);

  /// Throws std::invalid_argument on bad channel count or data size.
  void validate() const;

  std::uint8_t& at(int row, int col, int ch = 0) {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
  std::uint8_t at(int row, int col, int ch = 0) const {
    return data[(static_cast<std::size_t>(row) * width + col) * channels + ch];
  }
  bool contains(int row, int col) const { return row >= 0 && col >= 0 && row < height && col < width; }

  bool operator==(const Frame&) const = default;
};

/// Row-major binary bitmap; the shared representation for edge maps and
/// change masks. Every value is 0 or 1.
struct BinaryMap {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> bits;

  BinaryMap() = default;
  BinaryMap(int w, int h) : width(w), height(h), bits(static_cast<std::size_t>(w) * h, 0) {}

  std::uint8_t& at(int row, int col) { return bits[static_cast<std::size_t>(row) * width + col]; }
  std::uint8_t at(int row, int col) const { return bits[static_cast<std::size_t>(row) * width + col]; }
  bool contains(int row, int col) const { return row >= 0 && col >= 0 && row < height && col < width; }

  std::size_t count() const;
  std::vector<Pixel> set_pixels() const;

  bool operator==(const BinaryMap&) const = default;
};

/// Canny output: edge pixels are 1.
using EdgeMap = BinaryMap;

}  // namespace landing
