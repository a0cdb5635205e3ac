#include "landing/imaging.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace landing {

Frame::Frame(int w, int h, int ch, std::uint8_t fill)
    : width(w), height(h), channels(ch), data(static_cast<std::size_t>(w) * h * ch, fill) {}

void Frame::validate() const {
  if (channels != 1 && channels != 3) throw std::invalid_argument("frame must have 1 or 3 channels");
  if (width < 0 || height < 0) throw std::invalid_argument("frame dimensions must be non-negative");
  if (data.size() != static_cast<std::size_t>(width) * height * channels) {
    throw std::invalid_argument("frame data length does not match width*height*channels");
  }
}

std::size_t BinaryMap::count() const {
  return static_cast<std::size_t>(std::count(bits.begin(), bits.end(), std::uint8_t{1}));
}

std::vector<Pixel> BinaryMap::set_pixels() const {
  std::vector<Pixel> out;
  for (int r = 0; r < height; ++r) {
    for (int c = 0; c < width; ++c) {
      if (at(r, c)) out.push_back({r, c});
    }
  }
  return out;
}

}  // namespace landing

namespace landing::imaging {

void CannyParams::validate() const {
  if (!(0.0 <= low_threshold && low_threshold < high_threshold && high_threshold <= 255.0)) {
    throw std::invalid_argument("canny thresholds must satisfy 0 <= low < high <= 255");
  }
  if (!(gaussian_sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
}

Frame to_grayscale(const Frame& frame) {
  frame.validate();
  if (frame.channels == 1) return frame;
  Frame gray(frame.width, frame.height, 1);
  for (int r = 0; r < frame.height; ++r) {
    for (int c = 0; c < frame.width; ++c) {
      double y = 0.0;
      for (int ch = 0; ch < 3; ++ch) y += kLuminanceWeights[ch] * frame.at(r, c, ch);
      gray.at(r, c) = static_cast<std::uint8_t>(std::clamp(std::lround(y), 0L, 255L));
    }
  }
  return gray;
}

std::vector<double> gaussian_kernel(double sigma) {
  if (!(sigma > 0.0)) throw std::invalid_argument("gaussian sigma must be positive");
  const int radius = static_cast<int>(std::ceil(3.0 * sigma));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    k[i + radius] = std::exp(-(i * i) / (2.0 * sigma * sigma));
    sum += k[i + radius];
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace {

void require_gray(const Frame& f) {
  f.validate();
  if (f.channels != 1) throw std::invalid_argument("expected a 1-channel frame");
}

}  // namespace

FloatImage gaussian_smooth_float(const Frame& gray, double sigma) {
  require_gray(gray);
  const std::vector<double> k = gaussian_kernel(sigma);
  const int radius = static_cast<int>(k.size() / 2);
  const int w = gray.width;
  const int h = gray.height;

  std::vector<double> tmp(static_cast<std::size_t>(w) * h);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += k[i + radius] * gray.at(r, std::clamp(c + i, 0, w - 1));
      }
      tmp[static_cast<std::size_t>(r) * w + c] = acc;
    }
  }

  FloatImage out{w, h, std::vector<float>(tmp.size())};
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int i = -radius; i <= radius; ++i) {
        acc += k[i + radius] * tmp[static_cast<std::size_t>(std::clamp(r + i, 0, h - 1)) * w + c];
      }
      out.at(r, c) = static_cast<float>(acc);
    }
  }
  return out;
}

Frame gaussian_smooth(const Frame& gray, double sigma) {
  const FloatImage f = gaussian_smooth_float(gray, sigma);
  Frame out(gray.width, gray.height, 1);
  for (std::size_t i = 0; i < f.values.size(); ++i) {
    out.data[i] = static_cast<std::uint8_t>(std::clamp(std::lround(f.values[i]), 0L, 255L));
  }
  return out;
}

Gradient sobel(const FloatImage& image) {
  const int w = image.width;
  const int h = image.height;
  const std::size_t n = static_cast<std::size_t>(w) * h;
  Gradient g{{w, h, std::vector<float>(n)}, {w, h, std::vector<float>(n)}, {w, h, std::vector<float>(n)}};
  auto px = [&](int r, int c) { return image.at(std::clamp(r, 0, h - 1), std::clamp(c, 0, w - 1)); };
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const float gx = (px(r - 1, c + 1) + 2.0f * px(r, c + 1) + px(r + 1, c + 1)) -
                       (px(r - 1, c - 1) + 2.0f * px(r, c - 1) + px(r + 1, c - 1));
      const float gy = (px(r + 1, c - 1) + 2.0f * px(r + 1, c) + px(r + 1, c + 1)) -
                       (px(r - 1, c - 1) + 2.0f * px(r - 1, c) + px(r - 1, c + 1));
      g.gx.at(r, c) = gx;
      g.gy.at(r, c) = gy;
      g.magnitude.at(r, c) = std::sqrt(gx * gx + gy * gy);
    }
  }
  return g;
}

namespace {

// Offsets (drow, dcol) of the neighbor on the lower-index side of each
// quantized gradient direction; the other neighbor is the negation.
struct SectorOffset {
  int dr;
  int dc;
};

SectorOffset sector_of(float gx, float gy) {
  double angle = std::atan2(static_cast<double>(gy), static_cast<double>(gx)) * 180.0 / std::numbers::pi;
  if (angle < 0) angle += 180.0;
  if (angle < 22.5 || angle >= 157.5) return {0, -1};  // horizontal gradient
  if (angle < 67.5) return {-1, -1};                   // down-right diagonal
  if (angle < 112.5) return {-1, 0};                   // vertical gradient
  return {-1, 1};                                      // down-left diagonal
}

}  // namespace

EdgeMap canny_edges(const Frame& gray, const CannyParams& params) {
  require_gray(gray);
  params.validate();
  if (gray.width < 3 || gray.height < 3) {
    throw std::invalid_argument("canny needs a frame of at least 3x3 pixels (Sobel support)");
  }

  const int w = gray.width;
  const int h = gray.height;
  const Gradient g = sobel(gaussian_smooth_float(gray, params.gaussian_sigma));

  // 0 = suppressed, 1 = weak, 2 = strong
  std::vector<std::uint8_t> cls(static_cast<std::size_t>(w) * h, 0);
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) {
      const float m = g.magnitude.at(r, c);
      if (!(m > params.low_threshold)) continue;
      const SectorOffset s = sector_of(g.gx.at(r, c), g.gy.at(r, c));
      const float before = g.magnitude.at(r + s.dr, c + s.dc);
      const float after = g.magnitude.at(r - s.dr, c - s.dc);
      // ties resolve to the higher-index pixel so a symmetric step yields one edge pixel
      if (m >= before && m > after) {
        cls[static_cast<std::size_t>(r) * w + c] = m > params.high_threshold ? 2 : 1;
      }
    }
  }

  EdgeMap edges(w, h);
  std::vector<Pixel> stack;
  for (int r = 1; r < h - 1; ++r) {
    for (int c = 1; c < w - 1; ++c) {
      if (cls[static_cast<std::size_t>(r) * w + c] == 2 && !edges.at(r, c)) {
        edges.at(r, c) = 1;
        stack.push_back({r, c});
      }
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int nr = p.row + dr;
            const int nc = p.col + dc;
            if (nr < 1 || nc < 1 || nr >= h - 1 || nc >= w - 1) continue;
            if (cls[static_cast<std::size_t>(nr) * w + nc] == 0 || edges.at(nr, nc)) continue;
            edges.at(nr, nc) = 1;
            stack.push_back({nr, nc});
          }
        }
      }
    }
  }
  return edges;
}

}  // namespace landing::imaging
