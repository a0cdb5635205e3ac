#pragma once

#include <optional>
#include <span>
#include <vector>

#include "landing/camera.hpp"
#include "landing/frame.hpp"
#include "landing/plz.hpp"

namespace landing::tracking {

using ChangeMask = BinaryMap;

/// Pixel changed iff the largest per-channel absolute difference exceeds
/// threshold. Throws on size/channel mismatch or threshold outside (0, 255).
ChangeMask frame_diff(const Frame& prev, const Frame& curr, int threshold = 25);

struct Detection {
  PointPx centroid;
  BBox bbox;
  int area_px = 0;
};

/// 8-connected components of the mask with at least min_blob_px pixels.
/// Components closer than bridge_px (Chebyshev) are joined first, so the two
/// crescents a moving disk leaves in a difference image count as one object;
/// centroid and area use only the mask's own pixels. Ordered by first pixel
/// in raster order.
std::vector<Detection> segment_objects(const ChangeMask& mask, int min_blob_px = 50, int bridge_px = 0);

struct CentroidSample {
  PointPx centroid;
  int frame_index = 0;
};

struct TrackedObject {
  int id = 0;
  std::vector<CentroidSample> history;
  BBox bbox;
  double velocity_mps = 0.0;
  /// Unit vector in the image plane as (row, col); zero when unknown or still.
  PointPx velocity_dir;
  int missed_frames = 0;

  const PointPx& last_centroid() const { return history.back().centroid; }
};

struct TrackerParams {
  double gate_px = 40.0;
  /// A track is dropped after this many consecutive frames without a match.
  int max_missed_frames = 5;
};

/// Single-owner track store advanced one frame at a time.
class TrackStore {
 public:
  explicit TrackStore(TrackerParams params = {}) : params_(params) {}

  /// Greedy nearest-centroid association: all (track, detection) pairs within
  /// the gate are matched in order of increasing distance. Unmatched
  /// detections open new tracks; stale tracks are retired.
  void associate(std::span<const Detection> detections, int frame_index);

  const std::vector<TrackedObject>& tracks() const { return tracks_; }
  std::vector<TrackedObject>& tracks() { return tracks_; }
  const std::vector<TrackedObject>& retired() const { return retired_; }
  int next_id() const { return next_id_; }

 private:
  TrackerParams params_;
  std::vector<TrackedObject> tracks_;
  std::vector<TrackedObject> retired_;
  int next_id_ = 0;
};

struct VelocityEstimate {
  /// Least-squares pixel displacement per frame, (row, col).
  PointPx px_per_frame;
  double speed_mps = 0.0;
  PointPx direction;
};

/// Least-squares slope of the centroid over the trailing window of history
/// entries, times fps, scaled to meters by altitude / focal. nullopt when
/// fewer than two entries are available.
std::optional<VelocityEstimate> estimate_velocity(const TrackedObject& track, double fps, const CameraModel& cam,
                                                  int window = 10);

inline constexpr double kStaticSpeedFloorMps = 0.05;

struct ReachEstimate {
  int object_id = 0;
  int plz_id = 0;
  double distance_m = 0.0;
  /// Time for the object to cover distance_m; absent for static objects.
  std::optional<double> t_x_seconds;
  /// Object speed is below the static floor, so it is not going to pass.
  bool static_object = false;
  /// Object center lies within the zone circle.
  bool inside_zone = false;
};

/// Shared kernel: distance over speed, or a static flag below the floor.
ReachEstimate reach_from(int object_id, int plz_id, double distance_m, double speed_mps, double zone_radius_m,
                         double static_floor_mps = kStaticSpeedFloorMps);

/// Straight-line centroid-to-center distance converted to meters, divided by
/// the track's speed.
ReachEstimate time_to_reach(const TrackedObject& track, const plz::PLZ& zone, const CameraModel& cam,
                            double static_floor_mps = kStaticSpeedFloorMps);

}  // namespace landing::tracking
