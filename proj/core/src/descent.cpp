#include "landing/descent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace landing {

DepthFrame::DepthFrame(int w, int h, const CameraModel& cam, float fill)
    : width(w), height(h), depth(static_cast<std::size_t>(w) * h, fill), intrinsics(cam) {}

}  // namespace landing

namespace landing::descent {

std::array<QuadrantBounds, 4> split_quadrants(int width, int height) {
  if (width < 2 || height < 2) throw std::invalid_argument("quadrant split needs at least a 2x2 frame");
  const int mid_col = width / 2;
  const int mid_row = height / 2;
  return {{
      {0, mid_row, 0, mid_col},
      {0, mid_row, mid_col, width},
      {mid_row, height, 0, mid_col},
      {mid_row, height, mid_col, width},
  }};
}

std::array<QuadrantBounds, 4> split_quadrants(const DepthFrame& frame) {
  return split_quadrants(frame.width, frame.height);
}

int quadrant_index(int width, int height, int row, int col) {
  if (row < 0 || col < 0 || row >= height || col >= width) throw std::out_of_range("pixel outside frame");
  const auto q = split_quadrants(width, height);
  for (int i = 0; i < 4; ++i) {
    if (q[i].contains(row, col)) return i;
  }
  throw std::logic_error("quadrants do not cover the frame");
}

double pixel_depth_expected(PointPx pixel, double altitude_m, const CameraModel& cam) {
  if (!(altitude_m > 0.0)) throw std::invalid_argument("altitude must be positive");
  if (!(cam.focal_px > 0.0)) throw std::invalid_argument("focal length must be positive");
  const double r = distance(pixel, cam.principal_point());
  // H / cos(theta) with tan(theta) = r / f
  return altitude_m * std::hypot(r, cam.focal_px) / cam.focal_px;
}

std::optional<double> avg_quadrant_depth(const DepthFrame& frame, const QuadrantBounds& q) {
  double sum = 0.0;
  std::size_t n = 0;
  for (int r = q.row_begin; r < q.row_end; ++r) {
    for (int c = q.col_begin; c < q.col_end; ++c) {
      const float d = frame.at(r, c);
      if (!DepthFrame::valid(d)) continue;
      sum += d;
      ++n;
    }
  }
  if (n == 0) return std::nullopt;
  return sum / static_cast<double>(n);
}

std::optional<int> choose_quadrant(const std::array<std::optional<double>, 4>& averages) {
  std::optional<int> best;
  for (int i = 0; i < 4; ++i) {
    if (!averages[i]) continue;
    if (!best || *averages[i] > *averages[*best]) best = i;
  }
  return best;
}

QuadrantReport analyze_quadrants(const DepthFrame& frame, double uniform_rel_tol) {
  QuadrantReport rep;
  const auto quads = split_quadrants(frame);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (int i = 0; i < 4; ++i) {
    rep.averages[i] = avg_quadrant_depth(frame, quads[i]);
    std::size_t valid = 0;
    for (int r = quads[i].row_begin; r < quads[i].row_end; ++r) {
      for (int c = quads[i].col_begin; c < quads[i].col_end; ++c) valid += DepthFrame::valid(frame.at(r, c));
    }
    rep.valid_fraction[i] = double(valid) / (double(quads[i].width()) * quads[i].height());
    if (rep.averages[i]) {
      lo = std::min(lo, *rep.averages[i]);
      hi = std::max(hi, *rep.averages[i]);
    }
  }
  rep.chosen = choose_quadrant(rep.averages);
  rep.uniform = rep.chosen && (hi - lo) <= uniform_rel_tol * hi;
  return rep;
}

TofReading TofReading::from_range(double true_range_m, double max_range) {
  TofReading t;
  t.max_range_m = max_range;
  if (true_range_m > max_range) {
    t.range_m = max_range;
    t.saturated = true;
  } else {
    t.range_m = true_range_m;
  }
  return t;
}

std::string_view to_string(TofStatus s) { return s == TofStatus::Consistent ? "Consistent" : "ObstacleBelow"; }

std::string_view to_string(Maneuver m) {
  switch (m) {
    case Maneuver::Descend:
      return "Descend";
    case Maneuver::DescendNudge:
      return "DescendNudge";
    case Maneuver::Relocate:
      return "Relocate";
    case Maneuver::Touchdown:
      return "Touchdown";
    case Maneuver::NoSafeQuadrant:
      return "NoSafeQuadrant";
  }
  return "?";
}

TofCheck tof_consistency(const TofReading& tof, double expected_nadir_depth_m, double rel_tol) {
  if (!(rel_tol > 0.0 && rel_tol < 1.0)) throw std::invalid_argument("ToF tolerance must be in (0, 1)");
  if (tof.saturated && expected_nadir_depth_m >= tof.max_range_m) return {TofStatus::Consistent, true};
  const bool ok = std::abs(tof.range_m - expected_nadir_depth_m) <= rel_tol * expected_nadir_depth_m;
  return {ok ? TofStatus::Consistent : TofStatus::ObstacleBelow, tof.saturated};
}

Vec2 quadrant_direction(const DepthFrame& frame, int quadrant) {
  const auto q = split_quadrants(frame)[quadrant];
  const PointPx center{(q.row_begin + q.row_end - 1) / 2.0, (q.col_begin + q.col_end - 1) / 2.0};
  const PointPx off = center - frame.intrinsics.principal_point();
  const Vec2 v{off.col, off.row};
  const double n = v.norm();
  return n > 0 ? v / n : Vec2{};
}

namespace {

// Limits a nudge so it never carries the drone out of (or further outside)
// the keep-within circle.
Vec2 limit_nudge(Vec2 start, Vec2 target, const std::optional<std::pair<Vec2, double>>& circle) {
  if (!circle) return target;
  const auto& [c, radius] = *circle;
  const double n = distance(target, c);
  if (n <= radius) return target;
  if (distance(start, c) > radius) return n < distance(start, c) ? target : start;
  return c + (target - c) * (radius / n);
}

}  // namespace

DescentStep descend_step(const decision::DroneState& drone, const DepthFrame& depth, const TofReading& tof,
                         double dt_s, const DescentConfig& config) {
  using decision::LandingPhase;
  if (drone.phase != LandingPhase::Descend) throw std::logic_error("descend_step requires the Descend phase");
  if (!(dt_s > 0.0)) throw std::invalid_argument("descent tick must be positive");

  DescentStep step;
  step.drone = drone;
  step.quadrants = analyze_quadrants(depth, config.uniform_rel_tol);
  step.expected_nadir_depth_m =
      pixel_depth_expected(depth.intrinsics.principal_point(), drone.position.altitude_m, depth.intrinsics);
  step.tof = tof_consistency(tof, step.expected_nadir_depth_m, config.tof_rel_tol);

  if (!step.quadrants.chosen) {
    step.maneuver = Maneuver::NoSafeQuadrant;
    step.drone.phase = decision::transition(drone.phase, LandingPhase::Hold);
    return step;
  }
  const int chosen = *step.quadrants.chosen;
  const Vec2 dir = quadrant_direction(depth, chosen);
  const Vec2 start = drone.position.ground();

  if (step.tof.status == TofStatus::ObstacleBelow) {
    const auto q = split_quadrants(depth)[chosen];
    const double half_width_m = 0.5 * q.width() * depth.intrinsics.meters_per_pixel();
    step.maneuver = Maneuver::Relocate;
    step.lateral_move = dir * half_width_m;
  } else {
    step.drone.position.altitude_m = std::max(0.0, drone.position.altitude_m - drone.descent_speed_mps * dt_s);
    if (step.quadrants.uniform) {
      step.maneuver = Maneuver::Descend;
    } else {
      step.maneuver = Maneuver::DescendNudge;
      const Vec2 target = limit_nudge(start, start + dir * (config.nudge_speed_mps * dt_s), config.keep_within);
      step.lateral_move = target - start;
    }
  }
  step.drone.position.x_m = start.x + step.lateral_move.x;
  step.drone.position.y_m = start.y + step.lateral_move.y;

  if (step.drone.position.altitude_m <= config.touchdown_altitude_m) {
    step.drone.position.altitude_m = 0.0;
    step.maneuver = Maneuver::Touchdown;
    step.drone.phase = decision::transition(drone.phase, LandingPhase::Landed);
  }
  return step;
}

}  // namespace landing::descent
