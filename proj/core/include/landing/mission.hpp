#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "landing/decision.hpp"
#include "landing/descent.hpp"
#include "landing/frame.hpp"
#include "landing/plz.hpp"
#include "landing/scenario.hpp"
#include "landing/sim.hpp"

namespace landing::mission {

inline constexpr int kReportSchemaVersion = 1;

/// Command-line overrides applied on top of a loaded scenario.
struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<double> margin_s;
  std::optional<double> min_area_m2;
  std::optional<double> fps;
};

sim::Scenario apply(sim::Scenario scenario, const Overrides& overrides);

struct ZoneRecord {
  plz::PLZ zone;
  Vec2 center_m;
  double radius_m = 0.0;
  /// Largest true empty circle centered near the detected one.
  sim::TruthCircle truth;
};

struct MoverEstimate {
  int track_id = 0;
  int samples = 0;
  Vec2 position_m;
  /// Time the position refers to; a difference-mask centroid lags half a frame.
  double observed_at_s = 0.0;
  Vec2 velocity_mps;
  double speed_mps = 0.0;
  std::optional<int> truth_index;
  double truth_speed_mps = 0.0;

  Vec2 predict(double time_s) const { return position_m + velocity_mps * (time_s - observed_at_s); }
};

struct DecisionRow {
  int frame_index = 0;
  double time_s = 0.0;
  decision::LandingPhase phase = decision::LandingPhase::Scan;
  std::optional<int> target_plz_id;
  /// Drone ETA to the target, NaN without one.
  double t_d = 0.0;
  double min_margin_s = 0.0;
  std::optional<decision::Clearance> verdict;
  /// Same margin computed from the true mover states.
  double truth_margin_s = 0.0;
};

struct DescentRow {
  int tick = 0;
  int frame_index = 0;
  double altitude_m = 0.0;
  double x_m = 0.0;
  double y_m = 0.0;
  std::array<std::optional<double>, 4> quadrant_depth_m;
  std::optional<int> chosen;
  double tof_range_m = 0.0;
  descent::TofStatus consistency = descent::TofStatus::Consistent;
  descent::Maneuver maneuver = descent::Maneuver::Descend;
};

struct TrackRow {
  int frame_index = 0;
  int track_id = 0;
  PointPx centroid;
  double velocity_mps = 0.0;
};

struct ReachRow {
  int frame_index = 0;
  int track_id = 0;
  int plz_id = 0;
  double distance_m = 0.0;
  std::optional<double> t_x_s;
};

enum class Outcome { Landed, NoPlz, Abort };
std::string_view to_string(Outcome o);

/// Process exit status for an outcome: 0 landed, 2 no zone, 3 aborted.
int exit_code(Outcome o);

struct MissionResult {
  sim::Scenario scenario;
  Outcome outcome = Outcome::Abort;
  decision::LandingPhase final_phase = decision::LandingPhase::Scan;
  std::string abort_reason;
  int frames = 0;
  double total_time_s = 0.0;

  CameraModel scan_camera;
  Vec2 scan_nadir_m;
  Frame scan_frame;
  EdgeMap scan_edges;
  std::vector<plz::PLZ> candidates;
  std::vector<ZoneRecord> zones;
  std::vector<MoverEstimate> movers;
  std::vector<tracking::TrackedObject> scan_tracks;

  std::optional<int> target_plz_id;
  std::vector<DecisionRow> decisions;
  std::vector<DescentRow> descent;
  std::vector<TrackRow> tracks;
  std::vector<ReachRow> reaches;

  std::optional<Vec2> touchdown_m;
  bool touchdown_inside_target = false;
  /// Airframe disk at touchdown overlaps no obstacle footprint.
  bool touchdown_footprint_clear = false;
};

/// Runs scan, decision, approach and descent against the simulated world.
MissionResult run_mission(const sim::Scenario& scenario);

std::string report_json(const MissionResult& result);
std::string plz_csv(const MissionResult& result);
/// One row per candidate: frame_id, center_row, center_col, diameter_px,
/// diameter_m, area_m2, admitted.
std::string plz_csv(std::span<const plz::PLZ> candidates, int frame_id);
std::string decision_csv(const MissionResult& result);
std::string descent_csv(const MissionResult& result);
std::string tracks_csv(const MissionResult& result);

/// Scan frame with admitted zones (solid yellow), rejected candidates
/// (dashed red) and tracks with their velocity vectors (cyan).
Frame overlay(const MissionResult& result);
Frame draw_zones(Frame image, std::span<const plz::PLZ> candidates);

/// Writes report.json, plz.csv, overlay.ppm and frames/; traces/ as well
/// when `trace` is set.
void write_artifacts(const MissionResult& result, const std::filesystem::path& out_dir, bool trace);

}  // namespace landing::mission
