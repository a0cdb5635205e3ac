#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

namespace landing {

/// Ground-plane vector in meters. x grows with image column, y with image row.
struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  constexpr Vec2 operator+(Vec2 o) const { return {x + o.x, y + o.y}; }
  constexpr Vec2 operator-(Vec2 o) const { return {x - o.x, y - o.y}; }
  constexpr Vec2 operator*(double k) const { return {x * k, y * k}; }
  constexpr Vec2 operator/(double k) const { return {x / k, y / k}; }
  constexpr bool operator==(const Vec2&) const = default;

  double norm() const { return std::hypot(x, y); }
};

constexpr double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
constexpr double cross(Vec2 a, Vec2 b) { return a.x * b.y - a.y * b.x; }
inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

/// Integer pixel address.
struct Pixel {
  int row = 0;
  int col = 0;
  constexpr bool operator==(const Pixel&) const = default;
};

/// Sub-pixel image location; integer values land on pixel centers.
struct PointPx {
  double row = 0.0;
  double col = 0.0;

  constexpr PointPx operator+(PointPx o) const { return {row + o.row, col + o.col}; }
  constexpr PointPx operator-(PointPx o) const { return {row - o.row, col - o.col}; }
  constexpr PointPx operator*(double k) const { return {row * k, col * k}; }
  constexpr bool operator==(const PointPx&) const = default;

  double norm() const { return std::hypot(row, col); }
};

inline PointPx to_point(Pixel p) { return {static_cast<double>(p.row), static_cast<double>(p.col)}; }
inline double distance(PointPx a, PointPx b) { return (a - b).norm(); }

/// Axis-aligned pixel rectangle, inclusive bounds.
struct BBox {
  int row_min = 0;
  int col_min = 0;
  int row_max = -1;
  int col_max = -1;

  bool empty() const { return row_max < row_min || col_max < col_min; }
  void extend(Pixel p) {
    if (empty()) {
      row_min = row_max = p.row;
      col_min = col_max = p.col;
      return;
    }
    row_min = std::min(row_min, p.row);
    row_max = std::max(row_max, p.row);
    col_min = std::min(col_min, p.col);
    col_max = std::max(col_max, p.col);
  }
};

double point_segment_distance(Vec2 p, Vec2 a, Vec2 b);
Vec2 closest_point_on_segment(Vec2 p, Vec2 a, Vec2 b);
bool segments_intersect(Vec2 a, Vec2 b, Vec2 c, Vec2 d);

/// Even-odd point-in-polygon; boundary points may go either way.
bool point_in_polygon(Vec2 p, const std::vector<Vec2>& polygon);

/// Distance from p to the closed polygon boundary.
double distance_to_boundary(Vec2 p, const std::vector<Vec2>& polygon);

/// Andrew's monotone chain. Returns counter-clockwise hull without repeated
/// endpoint; collinear points dropped. Degenerate inputs return 1 or 2 points.
std::vector<Vec2> convex_hull(std::vector<Vec2> points);

}  // namespace landing
