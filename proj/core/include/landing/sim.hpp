#pragma once

#include <cstdint>
#include <vector>

#include "landing/camera.hpp"
#include "landing/decision.hpp"
#include "landing/descent.hpp"
#include "landing/frame.hpp"
#include "landing/scenario.hpp"

namespace landing::sim {

struct WorldState {
  double time_s = 0.0;
  std::vector<Vec2> movers_m;
  decision::DroneState drone;
};

Vec2 mover_position(const Mover& mover, double time_s);

WorldState initial_state(const Scenario& scenario);

/// Movers follow their straight lines in closed form; the drone is left as is.
WorldState advance(const Scenario& scenario, const WorldState& state, double dt_s);

/// Color camera model at the drone's current altitude.
CameraModel color_camera(const Scenario& scenario, const WorldState& state);
CameraModel depth_camera(const Scenario& scenario, const WorldState& state);

/// Ground rectangle covered by the color image, out to the pixel edges.
struct GroundRect {
  Vec2 min_m;
  Vec2 max_m;

  bool contains(Vec2 p) const { return p.x >= min_m.x && p.x <= max_m.x && p.y >= min_m.y && p.y <= max_m.y; }
};

GroundRect field_of_view(const Scenario& scenario, const WorldState& state);

/// Nadir RGB view with 4x4 supersampled shape coverage. Ground and obstacle
/// tops carry a seeded low-amplitude texture fixed to the world.
Frame render_frame(const Scenario& scenario, const WorldState& state);

/// Range along each depth pixel's ray to the first surface (obstacle top,
/// obstacle wall or ground). `frame_key` selects the noise realisation.
DepthFrame render_depth(const Scenario& scenario, const WorldState& state, std::uint64_t frame_key = 0);

/// Single-beam nadir range finder.
descent::TofReading tof_reading(const Scenario& scenario, const WorldState& state);

/// Height of the tallest obstacle whose footprint contains p (0 on bare ground).
double surface_height(const Scenario& scenario, Vec2 p);

/// Signed free distance at p: distance to the nearest obstacle footprint
/// (negative inside one), optionally to mover disks, and to the region edge.
double free_clearance_m(const Scenario& scenario, const WorldState& state, const GroundRect& region, Vec2 p,
                        bool include_movers);

struct TruthCircle {
  Vec2 center_m;
  double diameter_m = 0.0;
  double area_m2 = 0.0;
};

/// Largest circle inside the region that avoids every obstacle footprint.
TruthCircle largest_empty_circle(const Scenario& scenario, const WorldState& state, const GroundRect& region,
                                 bool include_movers = false);

/// Largest empty circle whose center lies within search_radius_m of seed.
TruthCircle local_empty_circle(const Scenario& scenario, const WorldState& state, const GroundRect& region, Vec2 seed,
                               double search_radius_m, bool include_movers = false);

/// Shortest distance between two footprints; zero when they touch or overlap.
double footprint_gap_m(const Obstacle& a, const Obstacle& b);

struct GapTruth {
  int a = 0;
  int b = 0;
  double distance_m = 0.0;
};

struct MoverTruth {
  int index = 0;
  Vec2 position_m;
  Vec2 velocity_mps;
  double speed_mps = 0.0;
  double speed_kmh = 0.0;
};

struct TruthRecord {
  double time_s = 0.0;
  std::vector<GapTruth> gaps;
  TruthCircle largest;
  std::vector<MoverTruth> movers;
};

TruthRecord ground_truth(const Scenario& scenario, const WorldState& state);

/// Time for a mover to reach a ground point along the straight line, or
/// +infinity when it is still.
double mover_time_to_reach(const Mover& mover, const WorldState& state, int index, Vec2 point_m);

}  // namespace landing::sim
