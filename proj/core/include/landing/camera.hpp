#pragma once

#include "landing/geometry.hpp"

namespace landing {

/// Nadir-pointing pinhole camera at a known height above flat ground.
///
/// A ground point at horizontal offset d (meters) from the nadir appears
/// d * focal_px / altitude_m pixels from the principal point, so one pixel
/// spans altitude_m / focal_px meters on the ground.
struct CameraModel {
  double focal_px = 500.0;
  double altitude_m = 10.0;
  int width = 640;
  int height = 480;

  /// Throws std::invalid_argument unless focal and altitude are positive.
  void validate() const;

  double meters_per_pixel() const { return altitude_m / focal_px; }

  /// Optical axis location in pixel-center coordinates: the geometric center
  /// of the sensor, so the four quadrants are mirror images of each other.
  PointPx principal_point() const { return {(height - 1) / 2.0, (width - 1) / 2.0}; }

  /// Ground offset (meters, relative to the nadir) seen at image location p.
  Vec2 ground_offset(PointPx p) const;

  /// Image location of a ground offset relative to the nadir.
  PointPx project_offset(Vec2 offset_m) const;

  CameraModel at_altitude(double altitude) const {
    CameraModel c = *this;
    c.altitude_m = altitude;
    return c;
  }
};

}  // namespace landing
