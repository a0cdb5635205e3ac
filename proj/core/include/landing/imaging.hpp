#pragma once

#include <array>
#include <vector>

#include "landing/frame.hpp"

namespace landing::imaging {

/// ITU-R BT.601 luma weights for (R, G, B). The only place they are defined.
inline constexpr std::array<double, 3> kLuminanceWeights{0.299, 0.587, 0.114};

struct CannyParams {
  double low_threshold = 50.0;
  double high_threshold = 150.0;
  double gaussian_sigma = 1.4;

  void validate() const;
};

/// Single-channel float image used between pipeline stages.
struct FloatImage {
  int width = 0;
  int height = 0;
  std::vector<float> values;

  float at(int row, int col) const { return values[static_cast<std::size_t>(row) * width + col]; }
  float& at(int row, int col) { return values[static_cast<std::size_t>(row) * width + col]; }
};

struct Gradient {
  FloatImage gx;
  FloatImage gy;
  FloatImage magnitude;
};

/// Luminance conversion, rounded to nearest. 1-channel input is returned as is.
Frame to_grayscale(const Frame& frame);

/// Normalized sampled Gaussian with radius ceil(3 sigma).
std::vector<double> gaussian_kernel(double sigma);

/// Separable Gaussian blur with replicate padding, rounded back to 8 bits.
Frame gaussian_smooth(const Frame& gray, double sigma);

/// Same blur without quantization; Canny runs on this.
FloatImage gaussian_smooth_float(const Frame& gray, double sigma);

/// 3x3 Sobel (unnormalized, as in most Canny implementations) with replicate
/// padding; magnitude is the L2 norm.
Gradient sobel(const FloatImage& image);

/// Smoothing, Sobel gradient, 4-sector non-maximum suppression and 8-connected
/// double-threshold hysteresis. A pixel is strong when its magnitude exceeds
/// high_threshold and weak when it exceeds low_threshold. The outermost pixel
/// ring is always non-edge.
EdgeMap canny_edges(const Frame& gray, const CannyParams& params = {});

}  // namespace landing::imaging
