#include "landing/camera.hpp"

#include <stdexcept>

namespace landing {

void CameraModel::validate() const {
  if (!(focal_px > 0.0)) throw std::invalid_argument("camera focal_px must be positive");
  if (!(altitude_m > 0.0)) throw std::invalid_argument("camera altitude_m must be positive");
  if (width <= 0 || height <= 0) throw std::invalid_argument("camera image size must be positive");
}

Vec2 CameraModel::ground_offset(PointPx p) const {
  const PointPx c = principal_point();
  const double s = meters_per_pixel();
  return {(p.col - c.col) * s, (p.row - c.row) * s};
}

PointPx CameraModel::project_offset(Vec2 offset_m) const {
  const PointPx c = principal_point();
  const double k = focal_px / altitude_m;
  return {c.row + offset_m.y * k, c.col + offset_m.x * k};
}

}  // namespace landing
