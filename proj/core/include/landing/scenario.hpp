#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "landing/decision.hpp"
#include "landing/geometry.hpp"

namespace landing::sim {

inline constexpr int kScenarioSchemaVersion = 1;

struct Obstacle {
  std::vector<Vec2> footprint_m;
  double height_m = 0.0;
  /// Intensity drop of the footprint relative to the ground.
  int border_contrast = 90;
};

struct Mover {
  Vec2 start_m;
  Vec2 velocity_mps;
  double radius_m = 0.5;
  /// Intensity rise of the disk relative to the ground.
  int contrast = 80;

  double speed_mps() const { return velocity_mps.norm(); }
};

struct WorldSpec {
  Vec2 min_m{-100.0, -100.0};
  Vec2 max_m{100.0, 100.0};
  int ground_intensity = 150;
  /// Peak amplitude of the seeded ground texture, in intensity levels.
  double texture_amplitude = 3.0;
  double texel_m = 0.05;
};

struct CameraSpec {
  double focal_px = 500.0;
  int width_px = 640;
  int height_px = 480;
  double fps = 30.0;
  /// Depth frames are rendered at this fraction of the color resolution.
  double depth_scale = 0.25;
  double depth_noise_m = 0.0;
};

struct DroneSpec {
  Vec2 position_m;
  double altitude_m = 10.0;
  double cruise_speed_mps = 2.0;
  double descent_speed_mps = 1.0;
  /// Radius of the airframe footprint used for touchdown clearance checks.
  double body_radius_m = 0.5;
};

/// Tunables of the perception and decision loop.
struct MissionSpec {
  double scan_s = 2.0;
  double margin_s = 20.0;
  decision::MarginRule margin_rule = decision::MarginRule::Absolute;
  double min_area_m2 = 3.0;
  double cluster_radius_px = 30.0;
  int diff_threshold = 25;
  int min_blob_px = 50;
  /// Chebyshev reach joining the leading and trailing crescents of a mover.
  int bridge_px = 20;
  double gate_px = 40.0;
  int velocity_window = 10;
  double static_floor_mps = 0.05;
  double slow_factor = 0.25;
  double descent_hold_floor_m = 3.0;
  double tof_rel_tol = 0.05;
  double touchdown_altitude_m = 0.3;
  double nudge_speed_mps = 0.2;
};

struct Scenario {
  int schema_version = kScenarioSchemaVersion;
  std::string id = "scenario";
  std::uint64_t seed = 0;
  double duration_s = 120.0;
  WorldSpec world;
  CameraSpec camera;
  DroneSpec drone;
  std::vector<Obstacle> obstacles;
  std::vector<Mover> movers;
  MissionSpec mission;
};

/// Schema violation; `field` is a JSON path such as "movers[1].radius_m".
struct ScenarioError : std::runtime_error {
  ScenarioError(std::string field_path, const std::string& message);
  std::string field;
};

/// Checks ranges and cross-field invariants (movers stay inside the world
/// for the whole duration, positive fps, non-negative heights, ...).
void validate(const Scenario& scenario);

Scenario parse_scenario(const std::string& json_text);
Scenario load_scenario(const std::filesystem::path& path);
std::string to_json(const Scenario& scenario);

}  // namespace landing::sim
