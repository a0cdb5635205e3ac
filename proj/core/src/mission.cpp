#include "landing/mission.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "landing/imaging.hpp"
#include "landing/pnm.hpp"
#include "landing/tracking.hpp"

namespace landing::mission {

using decision::Clearance;
using decision::LandingPhase;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kArrivedM = 1e-9;
// Tracks with fewer centroids than this are too short to trust.
constexpr int kMinTrackSamples = 3;
// Tracks further than this from every true mover are left unmatched.
constexpr double kTruthMatchM = 2.0;

std::string num(double v, int precision = 6) {
  if (!std::isfinite(v)) return std::isnan(v) ? "" : (v > 0 ? "inf" : "-inf");
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  return buf;
}

std::string opt_num(const std::optional<double>& v) { return v ? num(*v) : ""; }
std::string opt_int(const std::optional<int>& v) { return v ? std::to_string(*v) : ""; }

double pct_error(double estimate, double truth) {
  return truth != 0.0 ? 100.0 * (estimate - truth) / truth : kNaN;
}

std::vector<tracking::ReachEstimate> reaches_for(const ZoneRecord& z, const std::vector<MoverEstimate>& movers,
                                                 double time_s, double floor) {
  std::vector<tracking::ReachEstimate> out;
  for (const MoverEstimate& m : movers) {
    out.push_back(tracking::reach_from(m.track_id, z.zone.id, distance(m.predict(time_s), z.center_m), m.speed_mps,
                                       z.radius_m, floor));
  }
  return out;
}

double truth_margin(const sim::Scenario& s, const sim::WorldState& w, Vec2 target, double t_d) {
  double m = decision::kNoObjectMargin;
  for (std::size_t i = 0; i < s.movers.size(); ++i) {
    const double tx = sim::mover_time_to_reach(s.movers[i], w, static_cast<int>(i), target);
    if (!std::isfinite(tx)) continue;
    const double diff = tx - t_d;
    m = std::min(m, s.mission.margin_rule == decision::MarginRule::Absolute ? std::abs(diff) : diff);
  }
  return m;
}

Vec2 move_toward(Vec2 from, Vec2 to, double step) {
  const double d = distance(from, to);
  if (d <= step) return to;
  return from + (to - from) * (step / d);
}

void put(Frame& f, int r, int c, std::array<std::uint8_t, 3> rgb) {
  if (!f.contains(r, c)) return;
  for (int ch = 0; ch < 3; ++ch) f.at(r, c, ch) = rgb[ch];
}

void draw_circle(Frame& f, PointPx center, double radius, std::array<std::uint8_t, 3> rgb, bool dashed) {
  const int steps = std::max(16, static_cast<int>(std::ceil(2.0 * std::numbers::pi * radius)));
  for (int i = 0; i < steps; ++i) {
    if (dashed && (i / 4) % 2 == 1) continue;
    const double a = 2.0 * std::numbers::pi * i / steps;
    put(f, static_cast<int>(std::lround(center.row + radius * std::sin(a))),
        static_cast<int>(std::lround(center.col + radius * std::cos(a))), rgb);
  }
}

void draw_line(Frame& f, PointPx a, PointPx b, std::array<std::uint8_t, 3> rgb) {
  const int steps = std::max(1, static_cast<int>(std::ceil(distance(a, b))));
  for (int i = 0; i <= steps; ++i) {
    const PointPx p = a + (b - a) * (static_cast<double>(i) / steps);
    put(f, static_cast<int>(std::lround(p.row)), static_cast<int>(std::lround(p.col)), rgb);
  }
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

std::string_view to_string(Outcome o) {
  switch (o) {
    case Outcome::Landed:
      return "landed";
    case Outcome::NoPlz:
      return "no_plz";
    case Outcome::Abort:
      return "abort";
  }
  return "?";
}

int exit_code(Outcome o) {
  switch (o) {
    case Outcome::Landed:
      return 0;
    case Outcome::NoPlz:
      return 2;
    case Outcome::Abort:
      return 3;
  }
  return 1;
}

sim::Scenario apply(sim::Scenario s, const Overrides& o) {
  if (o.seed) s.seed = *o.seed;
  if (o.margin_s) s.mission.margin_s = *o.margin_s;
  if (o.min_area_m2) s.mission.min_area_m2 = *o.min_area_m2;
  if (o.fps) s.camera.fps = *o.fps;
  sim::validate(s);
  return s;
}

MissionResult run_mission(const sim::Scenario& scenario) {
  sim::validate(scenario);
  const sim::Scenario& s = scenario;
  const sim::MissionSpec& ms = s.mission;
  const double fps = s.camera.fps;
  const double dt = 1.0 / fps;
  const int scan_frames = std::max(2, static_cast<int>(std::lround(ms.scan_s * fps)));
  const int max_frames = static_cast<int>(std::ceil(s.duration_s * fps));

  MissionResult res;
  res.scenario = s;
  sim::WorldState world = sim::initial_state(s);

  // Scan: hover, detect zones on the first frame, track movers across the rest.
  const CameraModel cam = sim::color_camera(s, world);
  res.scan_camera = cam;
  res.scan_nadir_m = world.drone.position.ground();
  tracking::TrackStore store({ms.gate_px, 5});
  Frame prev;
  int k = 0;
  for (; k < scan_frames && k < max_frames; ++k) {
    world = sim::advance(s, world, k * dt - world.time_s);
    const Frame rgb = sim::render_frame(s, world);
    const Frame gray = imaging::to_grayscale(rgb);
    if (k == 0) {
      res.scan_frame = rgb;
      res.scan_edges = imaging::canny_edges(gray);
      const plz::DetectParams params{ms.min_area_m2, ms.cluster_radius_px, 3.0};
      res.candidates = plz::analyze_edges(res.scan_edges, cam, params).candidates;
      const sim::GroundRect fov = sim::field_of_view(s, world);
      for (const plz::PLZ& z : res.candidates) {
        if (!z.admitted) continue;
        ZoneRecord zr;
        zr.zone = z;
        zr.center_m = res.scan_nadir_m + z.ground_offset_m;
        zr.radius_m = z.diameter_m / 2.0;
        zr.truth = sim::local_empty_circle(s, world, fov, zr.center_m, std::max(0.5, zr.radius_m / 2.0), true);
        res.zones.push_back(zr);
      }
    } else {
      const auto mask = tracking::frame_diff(prev, gray, ms.diff_threshold);
      const auto dets = tracking::segment_objects(mask, ms.min_blob_px, ms.bridge_px);
      store.associate(dets, k);
      for (const tracking::TrackedObject& t : store.tracks()) {
        if (t.history.back().frame_index == k) res.tracks.push_back({k, t.id, t.last_centroid(), 0.0});
      }
    }
    prev = gray;
    res.decisions.push_back({k, world.time_s, LandingPhase::Scan, std::nullopt, kNaN, kNaN, std::nullopt, kNaN});
  }

  res.scan_tracks = store.tracks();
  for (const tracking::TrackedObject& t : store.tracks()) {
    if (static_cast<int>(t.history.size()) < kMinTrackSamples) continue;
    const auto v = tracking::estimate_velocity(t, fps, cam, ms.velocity_window);
    if (!v) continue;
    MoverEstimate m;
    m.track_id = t.id;
    m.samples = static_cast<int>(t.history.size());
    m.position_m = res.scan_nadir_m + cam.ground_offset(t.last_centroid());
    m.observed_at_s = (t.history.back().frame_index - 0.5) * dt;
    m.speed_mps = v->speed_mps;
    m.velocity_mps = Vec2{v->direction.col, v->direction.row} * v->speed_mps;
    double best = kTruthMatchM;
    for (std::size_t i = 0; i < s.movers.size(); ++i) {
      const double d = distance(sim::mover_position(s.movers[i], m.observed_at_s), m.position_m);
      if (d < best) {
        best = d;
        m.truth_index = static_cast<int>(i);
        m.truth_speed_mps = s.movers[i].speed_mps();
      }
    }
    res.movers.push_back(m);
  }
  for (TrackRow& row : res.tracks) {
    for (const MoverEstimate& m : res.movers) {
      if (m.track_id == row.track_id) row.velocity_mps = m.speed_mps;
    }
  }

  auto finish = [&](Outcome o, std::string reason) {
    res.outcome = o;
    res.abort_reason = std::move(reason);
    res.final_phase = world.drone.phase;
    res.frames = k;
    res.total_time_s = k * dt;
    return res;
  };

  if (res.zones.empty()) {
    world.drone.phase = decision::transition(world.drone.phase, LandingPhase::Abort);
    return finish(Outcome::NoPlz, "no admitted landing zone");
  }

  const decision::DecisionConfig dcfg{ms.margin_s, ms.margin_rule, ms.slow_factor, ms.descent_hold_floor_m};
  std::vector<plz::PLZ> admitted;
  for (const ZoneRecord& z : res.zones) admitted.push_back(z.zone);
  const ZoneRecord* target = nullptr;
  int tick = 0;

  for (; k < max_frames; ++k) {
    world = sim::advance(s, world, k * dt - world.time_s);
    decision::DroneState& drone = world.drone;
    DecisionRow row{k, world.time_s, drone.phase, std::nullopt, kNaN, kNaN, std::nullopt, kNaN};

    if (!target) {
      std::vector<decision::ClearanceVerdict> verdicts;
      for (const ZoneRecord& z : res.zones) {
        const auto reaches = reaches_for(z, res.movers, world.time_s, ms.static_floor_mps);
        verdicts.push_back(decision::clearance_decision(z.zone.id, reaches, decision::drone_eta_to(drone, z.center_m),
                                                        ms.margin_s, ms.margin_rule));
      }
      if (const auto pick = decision::select_plz(verdicts, admitted, drone, cam)) {
        target = &*std::find_if(res.zones.begin(), res.zones.end(),
                                [&](const ZoneRecord& z) { return z.zone.id == pick->id; });
        res.target_plz_id = pick->id;
      } else {
        double lowest = decision::kNoObjectMargin;
        for (const auto& v : verdicts) lowest = std::min(lowest, v.margin_seconds);
        row.min_margin_s = lowest;
        row.verdict = Clearance::Wait;
        res.decisions.push_back(row);
        continue;
      }
    }

    const double t_d = decision::drone_eta_to(drone, target->center_m);
    const auto reaches = reaches_for(*target, res.movers, world.time_s, ms.static_floor_mps);
    for (const auto& e : reaches) res.reaches.push_back({k, e.object_id, e.plz_id, e.distance_m, e.t_x_seconds});
    const auto verdict = decision::clearance_decision(target->zone.id, reaches, t_d, ms.margin_s, ms.margin_rule);
    const bool arrived = distance(drone.position.ground(), target->center_m) <= kArrivedM;
    row.target_plz_id = target->zone.id;
    row.t_d = t_d;
    row.min_margin_s = verdict.margin_seconds;
    row.verdict = verdict.status;
    row.truth_margin_s = truth_margin(s, world, target->center_m, t_d);

    const LandingPhase before = drone.phase;
    const decision::PhaseCommand cmd = decision::step_phase(drone, verdict, arrived, dcfg);
    if (before == LandingPhase::Descend && cmd.phase == LandingPhase::Descend) {
      const auto depth = sim::render_depth(s, world, static_cast<std::uint64_t>(k));
      const auto tof = sim::tof_reading(s, world);
      descent::DescentConfig cfg;
      cfg.tof_rel_tol = ms.tof_rel_tol;
      cfg.touchdown_altitude_m = ms.touchdown_altitude_m;
      cfg.nudge_speed_mps = ms.nudge_speed_mps;
      cfg.keep_within = std::make_pair(target->center_m, std::max(0.0, target->radius_m - s.drone.body_radius_m));
      const descent::DescentStep step = descent::descend_step(drone, depth, tof, dt, cfg);
      drone = step.drone;
      res.descent.push_back({tick++, k, drone.position.altitude_m, drone.position.x_m, drone.position.y_m,
                             step.quadrants.averages, step.quadrants.chosen, tof.range_m, step.tof.status,
                             step.maneuver});
    } else {
      drone.phase = cmd.phase;
      if (cmd.phase == LandingPhase::Approach || cmd.phase == LandingPhase::Hold) {
        const Vec2 next = move_toward(drone.position.ground(), target->center_m, cmd.speed_mps * dt);
        drone.position.x_m = next.x;
        drone.position.y_m = next.y;
      }
    }
    row.phase = drone.phase;
    res.decisions.push_back(row);

    if (drone.phase == LandingPhase::Landed) {
      ++k;
      const Vec2 p = drone.position.ground();
      res.touchdown_m = p;
      res.touchdown_inside_target = distance(p, target->center_m) <= target->radius_m;
      res.touchdown_footprint_clear = true;
      for (const sim::Obstacle& o : s.obstacles) {
        const double d = distance_to_boundary(p, o.footprint_m);
        if (point_in_polygon(p, o.footprint_m) || d < s.drone.body_radius_m) res.touchdown_footprint_clear = false;
      }
      return finish(Outcome::Landed, "");
    }
  }
  world.drone.phase = decision::transition(world.drone.phase, LandingPhase::Abort);
  return finish(Outcome::Abort, "mission timed out");
}

std::string report_json(const MissionResult& r) {
  using nlohmann::ordered_json;
  auto finite_or_null = [](double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); };
  ordered_json j;
  j["schema_version"] = kReportSchemaVersion;
  j["scenario_id"] = r.scenario.id;
  j["seed"] = r.scenario.seed;
  j["outcome"] = std::string(to_string(r.outcome));
  j["final_phase"] = std::string(decision::to_string(r.final_phase));
  j["abort_reason"] = r.abort_reason;
  j["frames"] = r.frames;
  j["fps"] = r.scenario.camera.fps;
  j["total_time_s"] = r.total_time_s;
  j["camera"] = {{"focal_px", r.scan_camera.focal_px},
                 {"width_px", r.scan_camera.width},
                 {"height_px", r.scan_camera.height},
                 {"altitude_m", r.scan_camera.altitude_m}};

  ordered_json zones = ordered_json::array();
  for (const ZoneRecord& z : r.zones) {
    zones.push_back({{"id", z.zone.id},
                     {"center_row", z.zone.center_px.row},
                     {"center_col", z.zone.center_px.col},
                     {"center_m", {z.center_m.x, z.center_m.y}},
                     {"diameter_px", z.zone.diameter_px},
                     {"diameter_m", z.zone.diameter_m},
                     {"area_m2", z.zone.area_m2},
                     {"truth_diameter_m", z.truth.diameter_m},
                     {"truth_area_m2", z.truth.area_m2},
                     {"distance_error_pct", finite_or_null(pct_error(z.zone.diameter_m, z.truth.diameter_m))},
                     {"area_error_pct", finite_or_null(pct_error(z.zone.area_m2, z.truth.area_m2))}});
  }
  j["plz"] = zones;
  j["rejected_candidates"] = static_cast<int>(r.candidates.size() - r.zones.size());

  ordered_json movers = ordered_json::array();
  for (const MoverEstimate& m : r.movers) {
    ordered_json row{{"track_id", m.track_id},
                     {"samples", m.samples},
                     {"position_m", {m.position_m.x, m.position_m.y}},
                     {"speed_mps", m.speed_mps},
                     {"speed_kmh", m.speed_mps * 3.6}};
    if (m.truth_index) {
      row["truth_index"] = *m.truth_index;
      row["truth_speed_kmh"] = m.truth_speed_mps * 3.6;
      row["velocity_error_pct"] = finite_or_null(pct_error(m.speed_mps, m.truth_speed_mps));
    } else {
      row["truth_index"] = nullptr;
    }
    movers.push_back(row);
  }
  j["movers"] = movers;

  int hold = 0, approach = 0, descend = 0;
  for (const DecisionRow& d : r.decisions) {
    hold += d.phase == LandingPhase::Hold;
    approach += d.phase == LandingPhase::Approach;
    descend += d.phase == LandingPhase::Descend;
  }
  j["decision"] = {{"target_plz_id", r.target_plz_id ? ordered_json(*r.target_plz_id) : ordered_json(nullptr)},
                   {"margin_s", r.scenario.mission.margin_s},
                   {"margin_rule", r.scenario.mission.margin_rule == decision::MarginRule::Absolute ? "absolute"
                                                                                                    : "signed"},
                   {"approach_frames", approach},
                   {"hold_frames", hold},
                   {"descend_frames", descend},
                   {"descent_ticks", static_cast<int>(r.descent.size())}};
  if (r.touchdown_m) {
    j["touchdown"] = {{"x_m", r.touchdown_m->x},
                      {"y_m", r.touchdown_m->y},
                      {"inside_target", r.touchdown_inside_target},
                      {"footprint_clear", r.touchdown_footprint_clear}};
  } else {
    j["touchdown"] = nullptr;
  }
  return j.dump(2) + "\n";
}

std::string plz_csv(const MissionResult& r) { return plz_csv(r.candidates, 0); }

std::string plz_csv(std::span<const plz::PLZ> candidates, int frame_id) {
  std::string out = "frame_id,center_row,center_col,diameter_px,diameter_m,area_m2,admitted\n";
  for (const plz::PLZ& z : candidates) {
    out += std::to_string(frame_id) + "," + num(z.center_px.row) + "," + num(z.center_px.col) + "," + num(z.diameter_px) + "," +
           num(z.diameter_m) + "," + num(z.area_m2) + "," + (z.admitted ? "1" : "0") + "\n";
  }
  return out;
}

std::string decision_csv(const MissionResult& r) {
  std::string out = "frame_index,phase,target_plz_id,t_d,min_margin,verdict,truth_margin\n";
  for (const DecisionRow& d : r.decisions) {
    out += std::to_string(d.frame_index) + "," + std::string(decision::to_string(d.phase)) + "," +
           opt_int(d.target_plz_id) + "," + num(d.t_d) + "," + num(d.min_margin_s) + "," +
           (d.verdict ? std::string(decision::to_string(*d.verdict)) : "") + "," + num(d.truth_margin_s) + "\n";
  }
  return out;
}

std::string descent_csv(const MissionResult& r) {
  std::string out = "tick,altitude,x,y,q0,q1,q2,q3,chosen,tof_range,consistency,maneuver\n";
  for (const DescentRow& d : r.descent) {
    out += std::to_string(d.tick) + "," + num(d.altitude_m) + "," + num(d.x_m) + "," + num(d.y_m);
    for (const auto& q : d.quadrant_depth_m) out += "," + opt_num(q);
    out += "," + opt_int(d.chosen) + "," + num(d.tof_range_m) + "," + std::string(descent::to_string(d.consistency)) +
           "," + std::string(descent::to_string(d.maneuver)) + "\n";
  }
  return out;
}

std::string tracks_csv(const MissionResult& r) {
  std::string out = "frame_index,record,track_id,centroid_row,centroid_col,velocity_mps,plz_id,distance_m,t_x_s\n";
  for (const TrackRow& t : r.tracks) {
    out += std::to_string(t.frame_index) + ",track," + std::to_string(t.track_id) + "," + num(t.centroid.row) + "," +
           num(t.centroid.col) + "," + num(t.velocity_mps) + ",,,\n";
  }
  for (const ReachRow& e : r.reaches) {
    out += std::to_string(e.frame_index) + ",reach," + std::to_string(e.track_id) + ",,,," +
           std::to_string(e.plz_id) + "," + num(e.distance_m) + "," + opt_num(e.t_x_s) + "\n";
  }
  return out;
}

Frame draw_zones(Frame f, std::span<const plz::PLZ> candidates) {
  if (f.channels == 1) {
    Frame rgb(f.width, f.height, 3);
    for (std::size_t i = 0; i < f.data.size(); ++i) {
      for (int ch = 0; ch < 3; ++ch) rgb.data[i * 3 + ch] = f.data[i];
    }
    f = std::move(rgb);
  }
  for (const plz::PLZ& z : candidates) {
    if (z.admitted) {
      draw_circle(f, z.center_px, z.radius_px(), {255, 255, 0}, false);
    } else {
      draw_circle(f, z.center_px, z.radius_px(), {255, 0, 0}, true);
    }
  }
  return f;
}

Frame overlay(const MissionResult& r) {
  if (r.scan_frame.data.empty()) return r.scan_frame;
  Frame f = draw_zones(r.scan_frame, r.candidates);
  const double mpp = r.scan_camera.meters_per_pixel();
  for (const tracking::TrackedObject& t : r.scan_tracks) {
    for (std::size_t i = 1; i < t.history.size(); ++i) {
      draw_line(f, t.history[i - 1].centroid, t.history[i].centroid, {0, 255, 255});
    }
    for (const MoverEstimate& m : r.movers) {
      if (m.track_id != t.id) continue;
      // One second of travel.
      const PointPx tip = t.last_centroid() + PointPx{m.velocity_mps.y / mpp, m.velocity_mps.x / mpp};
      draw_line(f, t.last_centroid(), tip, {0, 255, 255});
    }
  }
  return f;
}

void write_artifacts(const MissionResult& r, const std::filesystem::path& out_dir, bool trace) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "frames");
  write_text(out_dir / "report.json", report_json(r));
  write_text(out_dir / "plz.csv", plz_csv(r));
  if (!r.scan_frame.data.empty()) {
    pnm::write(out_dir / "overlay.ppm", overlay(r));
    pnm::write(out_dir / "frames" / "scan_000000.ppm", r.scan_frame);
    pnm::write_binary(out_dir / "frames" / "edges_000000.pgm", r.scan_edges);
  }
  if (trace) {
    fs::create_directories(out_dir / "traces");
    write_text(out_dir / "traces" / "decision.csv", decision_csv(r));
    write_text(out_dir / "traces" / "descent.csv", descent_csv(r));
    write_text(out_dir / "traces" / "tracks.csv", tracks_csv(r));
  }
}

}  // namespace landing::mission
