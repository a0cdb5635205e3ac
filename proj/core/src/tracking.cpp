#include "landing/tracking.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "landing/union_find.hpp"

namespace landing::tracking {

ChangeMask frame_diff(const Frame& prev, const Frame& curr, int threshold) {
  prev.validate();
  curr.validate();
  if (prev.width != curr.width || prev.height != curr.height || prev.channels != curr.channels) {
    throw std::invalid_argument("frame_diff needs frames of identical size and channel count");
  }
  if (threshold <= 0 || threshold >= 255) throw std::invalid_argument("diff threshold must be in (0, 255)");
  ChangeMask mask(curr.width, curr.height);
  const int ch = curr.channels;
  for (std::size_t i = 0; i < mask.bits.size(); ++i) {
    int diff = 0;
    for (int k = 0; k < ch; ++k) {
      diff = std::max(diff, std::abs(int(prev.data[i * ch + k]) - int(curr.data[i * ch + k])));
    }
    mask.bits[i] = diff > threshold ? 1 : 0;
  }
  return mask;
}

std::vector<Detection> segment_objects(const ChangeMask& mask, int min_blob_px, int bridge_px) {
  if (min_blob_px < 1) throw std::invalid_argument("min_blob_px must be at least 1");
  if (bridge_px < 0) throw std::invalid_argument("bridge_px must be non-negative");
  const int w = mask.width;
  const int h = mask.height;
  const int reach = 1 + bridge_px;

  // Label set pixels; neighbors within `reach` (Chebyshev) share a label.
  UnionFind uf(mask.bits.size());
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      // forward half-neighborhood is enough for symmetric connectivity
      for (int dr = 0; dr <= reach; ++dr) {
        for (int dc = -reach; dc <= reach; ++dc) {
          if (dr == 0 && dc <= 0) continue;
          const int nr = r + dr;
          const int nc = c + dc;
          if (!mask.contains(nr, nc) || !mask.at(nr, nc)) continue;
          uf.unite(i, static_cast<std::size_t>(nr) * w + nc);
        }
      }
    }
  }

  struct Acc {
    double sum_r = 0;
    double sum_c = 0;
    int n = 0;
    BBox box;
    std::size_t first = 0;
  };
  std::vector<Acc> acc;
  std::vector<int> slot(mask.bits.size(), -1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      if (!mask.at(r, c)) continue;
      const std::size_t i = static_cast<std::size_t>(r) * w + c;
      const std::size_t root = uf.find(i);
      if (slot[root] < 0) {
        slot[root] = static_cast<int>(acc.size());
        acc.push_back({});
        acc.back().first = i;
      }
      Acc& a = acc[slot[root]];
      a.sum_r += r;
      a.sum_c += c;
      ++a.n;
      a.box.extend({r, c});
    }
  }

  std::vector<Detection> out;
  for (const Acc& a : acc) {
    if (a.n < min_blob_px) continue;
    out.push_back({{a.sum_r / a.n, a.sum_c / a.n}, a.box, a.n});
  }
  return out;
}

void TrackStore::associate(std::span<const Detection> detections, int frame_index) {
  struct Pair {
    double d;
    std::size_t track;
    std::size_t det;
  };
  std::vector<Pair> pairs;
  for (std::size_t t = 0; t < tracks_.size(); ++t) {
    for (std::size_t k = 0; k < detections.size(); ++k) {
      const double d = distance(tracks_[t].last_centroid(), detections[k].centroid);
      if (d <= params_.gate_px) pairs.push_back({d, t, k});
    }
  }
  std::sort(pairs.begin(), pairs.end(), [](const Pair& a, const Pair& b) {
    if (a.d != b.d) return a.d < b.d;
    if (a.track != b.track) return a.track < b.track;
    return a.det < b.det;
  });

  std::vector<bool> track_used(tracks_.size(), false);
  std::vector<bool> det_used(detections.size(), false);
  for (const Pair& p : pairs) {
    if (track_used[p.track] || det_used[p.det]) continue;
    track_used[p.track] = true;
    det_used[p.det] = true;
    TrackedObject& t = tracks_[p.track];
    if (t.history.back().frame_index >= frame_index) {
      throw std::logic_error("track history must be strictly increasing in frame index");
    }
    t.history.push_back({detections[p.det].centroid, frame_index});
    t.bbox = detections[p.det].bbox;
    t.missed_frames = 0;
  }

  std::vector<TrackedObject> kept;
  for (std::size_t t = 0; t < tracks_.size(); ++t) {
    if (!track_used[t]) ++tracks_[t].missed_frames;
    if (tracks_[t].missed_frames > params_.max_missed_frames) {
      retired_.push_back(std::move(tracks_[t]));
    } else {
      kept.push_back(std::move(tracks_[t]));
    }
  }
  tracks_ = std::move(kept);

  for (std::size_t k = 0; k < detections.size(); ++k) {
    if (det_used[k]) continue;
    TrackedObject t;
    t.id = next_id_++;
    t.history.push_back({detections[k].centroid, frame_index});
    t.bbox = detections[k].bbox;
    tracks_.push_back(std::move(t));
  }
}

std::optional<VelocityEstimate> estimate_velocity(const TrackedObject& track, double fps, const CameraModel& cam,
                                                  int window) {
  if (!(fps > 0.0)) throw std::invalid_argument("fps must be positive");
  if (window < 2) throw std::invalid_argument("velocity window must cover at least two samples");
  cam.validate();
  if (track.history.size() < 2) return std::nullopt;

  const std::size_t n = std::min<std::size_t>(track.history.size(), static_cast<std::size_t>(window));
  const auto first = track.history.end() - static_cast<std::ptrdiff_t>(n);
  double mean_t = 0;
  double mean_r = 0;
  double mean_c = 0;
  for (auto it = first; it != track.history.end(); ++it) {
    mean_t += it->frame_index;
    mean_r += it->centroid.row;
    mean_c += it->centroid.col;
  }
  mean_t /= n;
  mean_r /= n;
  mean_c /= n;
  double stt = 0;
  double str = 0;
  double stc = 0;
  for (auto it = first; it != track.history.end(); ++it) {
    const double dt = it->frame_index - mean_t;
    stt += dt * dt;
    str += dt * (it->centroid.row - mean_r);
    stc += dt * (it->centroid.col - mean_c);
  }
  VelocityEstimate v;
  v.px_per_frame = {str / stt, stc / stt};
  const double px_per_s = v.px_per_frame.norm() * fps;
  v.speed_mps = px_per_s * cam.meters_per_pixel();
  const double norm = v.px_per_frame.norm();
  if (norm > 0) v.direction = {v.px_per_frame.row / norm, v.px_per_frame.col / norm};
  return v;
}

ReachEstimate reach_from(int object_id, int plz_id, double distance_m, double speed_mps, double zone_radius_m,
                         double static_floor_mps) {
  ReachEstimate e;
  e.object_id = object_id;
  e.plz_id = plz_id;
  e.distance_m = distance_m;
  e.inside_zone = distance_m < zone_radius_m;
  if (speed_mps < static_floor_mps) {
    e.static_object = true;
  } else {
    e.t_x_seconds = distance_m / speed_mps;
  }
  return e;
}

ReachEstimate time_to_reach(const TrackedObject& track, const plz::PLZ& zone, const CameraModel& cam,
                            double static_floor_mps) {
  if (track.history.empty()) throw std::invalid_argument("track has no centroid");
  const double d_m = plz::px_to_meters(distance(track.last_centroid(), zone.center_px), cam);
  return reach_from(track.id, zone.id, d_m, track.velocity_mps, zone.diameter_m / 2.0, static_floor_mps);
}

}  // namespace landing::tracking
