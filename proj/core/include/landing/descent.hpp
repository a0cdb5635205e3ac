#pragma once

#include <array>
#include <cmath>
#include <utility>
#include <optional>
#include <string_view>
#include <vector>

#include "landing/camera.hpp"
#include "landing/decision.hpp"

namespace landing {

/// Metric depth image. Invalid pixels hold NaN.
struct DepthFrame {
  int width = 0;
  int height = 0;
  std::vector<float> depth;
  CameraModel intrinsics;

  DepthFrame() = default;
  DepthFrame(int w, int h, const CameraModel& cam, float fill = 0.0f);

  float at(int row, int col) const { return depth[static_cast<std::size_t>(row) * width + col]; }
  float& at(int row, int col) { return depth[static_cast<std::size_t>(row) * width + col]; }
  static bool valid(float d) { return d > 0.0f && std::isfinite(d); }
};

}  // namespace landing

namespace landing::descent {

/// Half-open pixel rectangle [row_begin, row_end) x [col_begin, col_end).
struct QuadrantBounds {
  int row_begin = 0;
  int row_end = 0;
  int col_begin = 0;
  int col_end = 0;

  int width() const { return col_end - col_begin; }
  int height() const { return row_end - row_begin; }
  bool contains(int row, int col) const {
    return row >= row_begin && row < row_end && col >= col_begin && col < col_end;
  }
};

/// Quadrant order: 0 top-left, 1 top-right, 2 bottom-left, 3 bottom-right.
/// Odd dimensions put the extra row/column in the bottom/right half.
std::array<QuadrantBounds, 4> split_quadrants(int width, int height);
std::array<QuadrantBounds, 4> split_quadrants(const DepthFrame& frame);
int quadrant_index(int width, int height, int row, int col);

/// Flat-ground depth of a pixel seen from altitude H: H / cos(theta), theta
/// being the angle between the pixel ray and the optical axis.
double pixel_depth_expected(PointPx pixel, double altitude_m, const CameraModel& cam);

/// Mean over valid pixels; nullopt when the quadrant has none.
std::optional<double> avg_quadrant_depth(const DepthFrame& frame, const QuadrantBounds& q);

/// argmax over valid averages, lowest index wins ties. nullopt is the
/// NoSafeQuadrant outcome.
std::optional<int> choose_quadrant(const std::array<std::optional<double>, 4>& averages);

struct QuadrantReport {
  std::array<std::optional<double>, 4> averages;
  std::array<double, 4> valid_fraction{};
  std::optional<int> chosen;
  /// All valid averages lie within the uniformity tolerance of each other.
  bool uniform = false;
};

QuadrantReport analyze_quadrants(const DepthFrame& frame, double uniform_rel_tol);

inline constexpr double kTofMaxRangeM = 60.0;

struct TofReading {
  double range_m = 0.0;
  bool saturated = false;
  double max_range_m = kTofMaxRangeM;

  /// Builds a reading for a true range, saturating at max range.
  static TofReading from_range(double true_range_m, double max_range = kTofMaxRangeM);
};

enum class TofStatus { Consistent, ObstacleBelow };
std::string_view to_string(TofStatus s);

struct TofCheck {
  TofStatus status = TofStatus::Consistent;
  bool saturated = false;
};

/// Consistent iff |range - expected| <= rel_tol * expected. A saturated reading
/// is Consistent when the expected depth is beyond the sensor range.
TofCheck tof_consistency(const TofReading& tof, double expected_nadir_depth_m, double rel_tol = 0.05);

struct DescentConfig {
  double tof_rel_tol = 0.05;
  double touchdown_altitude_m = 0.3;
  /// Quadrant averages within this relative spread count as uniform ground.
  double uniform_rel_tol = 0.005;
  /// Lateral drift speed toward the deepest quadrant while descending.
  double nudge_speed_mps = 0.2;
  /// When set, lateral nudges never leave this ground circle.
  std::optional<std::pair<Vec2, double>> keep_within;
};

enum class Maneuver { Descend, DescendNudge, Relocate, Touchdown, NoSafeQuadrant };
std::string_view to_string(Maneuver m);

struct DescentStep {
  decision::DroneState drone;
  Maneuver maneuver = Maneuver::Descend;
  QuadrantReport quadrants;
  TofCheck tof;
  double expected_nadir_depth_m = 0.0;
  Vec2 lateral_move;
};

/// Direction on the ground (unit vector) from the nadir toward a quadrant's center.
Vec2 quadrant_direction(const DepthFrame& frame, int quadrant);

/// One control tick of the descent. The ToF range is compared with the
/// flat-ground nadir depth at the drone's altitude; a mismatch means something
/// stands below and the drone relocates half a quadrant width toward the
/// deepest quadrant without losing height.
DescentStep descend_step(const decision::DroneState& drone, const DepthFrame& depth, const TofReading& tof,
                         double dt_s, const DescentConfig& config = {});

}  // namespace landing::descent
