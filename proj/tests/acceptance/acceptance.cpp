// Acceptance checks. Prints one PASS/FAIL line per criterion; exits nonzero
// if any selected criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "landing/decision.hpp"
#include "landing/descent.hpp"
#include "landing/imaging.hpp"
#include "landing/mission.hpp"
#include "landing/plz.hpp"
#include "landing/sim.hpp"

using namespace landing;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

sim::Scenario load(const char* name) {
  return sim::load_scenario(std::string(LANDING_SCENARIO_DIR) + "/" + name + ".json");
}

// Printed rows: estimated distance, truth distance, distance error %,
// estimated area, truth area, area error %.
struct TableRow {
  const char* name;
  double d_est, d_true, d_err, a_est, a_true, a_err;
};

constexpr TableRow kTable[] = {
    {"rural R1", 3.8976, 3.9165, 0.4826, 11.9312, 12.0472, 0.9629},
    {"rural R2", 2.7144, 2.71, 0.1624, 5.7868, 5.768, 0.3259},
    {"rural R3", 5.0808, 5.125, 0.8624, 20.2747, 20.629, 1.7175},
    {"rural R4", 1.0674, 1.045, 2.1435, 0.8948, 0.8577, 4.3255},
    {"rural R5", 0.9046, 0.907, 0.2646, 0.6427, 0.6461, 0.5262},
    {"urban R1", 3.065, 3.078, 0.4224, 7.3782, 7.4409, 0.8426},
    {"urban R2", 0.7492, 0.743, 0.8345, 0.4408, 0.4336, 1.6605},
    {"urban R3", 5.33, 5.286, 0.8324, 22.3123, 21.9454, 1.6719},
    {"sub-urban R1", 0.7618, 0.753, 1.1687, 0.4558, 0.4453, 2.358},
    {"sub-urban R2", 0.3714, 0.3745, 0.8278, 0.1083, 0.1102, 1.7241},
    {"sub-urban R3", 0.532, 0.522, 1.9157, 0.2223, 0.214, 3.8785},
    {"sub-urban R4", 0.4, 0.4112, 2.7237, 0.1257, 0.1328, 5.3464},
    {"sub-urban R5", 0.6952, 0.7001, 0.6999, 0.3796, 0.385, 1.4026},
    {"sub-urban R6", 2.0952, 2.1, 0.2286, 3.4478, 3.4636, 0.4562},
};

Outcome area_formula() {
  double worst = 0;
  for (const TableRow& r : kTable) {
    worst = std::max(worst, std::abs(plz::zone_area(r.d_est) - r.a_est));
    worst = std::max(worst, std::abs(plz::zone_area(r.d_true) - r.a_true));
  }
  return {worst <= 0.001, "14 rows, worst |area - printed| " + fmt("%.6f", worst) + " m2"};
}

Outcome error_columns() {
  double worst_cols = 0, worst_quad = 0;
  std::string quad_rows;
  for (const TableRow& r : kTable) {
    const double d = std::abs(r.d_est - r.d_true) / r.d_true * 100.0;
    const double a = std::abs(r.a_est - r.a_true) / r.a_true * 100.0;
    worst_cols = std::max({worst_cols, std::abs(d - r.d_err), std::abs(a - r.a_err)});
    // Signed relative distance error carried through the square.
    const double s = (r.d_est - r.d_true) / r.d_true;
    const double dev = std::abs(std::abs((1 + s) * (1 + s) - 1) * 100.0 - r.a_err);
    worst_quad = std::max(worst_quad, dev);
    if (dev > 0.02) quad_rows += std::string(quad_rows.empty() ? "" : ", ") + r.name + " " + fmt("%.4f", dev);
  }
  std::string detail = "error columns worst " + fmt("%.4f", worst_cols) + " pts; quadratic relation worst " +
                       fmt("%.4f", worst_quad) + " pts";
  if (!quad_rows.empty()) detail += " (over 0.02 on " + quad_rows + ")";
  return {worst_cols <= 0.01 && worst_quad <= 0.02, detail};
}

Outcome velocity_rows() {
  std::vector<double> errs;
  std::string detail;
  for (const char* name : {"speed_5kmh", "speed_10kmh", "speed_16kmh"}) {
    const auto r = mission::run_mission(load(name));
    if (r.movers.size() != 1 || r.movers[0].truth_speed_mps <= 0) return {false, std::string(name) + ": mover not tracked"};
    const auto& m = r.movers[0];
    const double e = std::abs(m.speed_mps - m.truth_speed_mps) / m.truth_speed_mps * 100.0;
    errs.push_back(e);
    detail += fmt("%.1f", m.truth_speed_mps * 3.6) + " km/h -> " + fmt("%.2f", m.speed_mps * 3.6) + " (" +
              fmt("%.2f", e) + "%); ";
  }
  const double mean = std::accumulate(errs.begin(), errs.end(), 0.0) / errs.size();
  const double worst = *std::max_element(errs.begin(), errs.end());
  return {mean <= 3.0 && worst <= 4.0, detail + "mean " + fmt("%.2f", mean) + "%"};
}

sim::Obstacle box(Vec2 lo, Vec2 hi, double height) {
  sim::Obstacle o;
  o.footprint_m = {lo, {hi.x, lo.y}, hi, {lo.x, hi.y}};
  o.height_m = height;
  return o;
}

// Corridor scenes hold two long walls and perhaps a stray box; clutter
// scenes hold several well separated boxes. Everything stays in view.
sim::Scenario random_scene(std::mt19937_64& rng, bool corridor, int width = 640, int height = 480) {
  std::uniform_real_distribution<double> u(0, 1);
  sim::Scenario s;
  s.camera.width_px = width;
  s.camera.height_px = height;
  s.drone.altitude_m = 10 + 10 * u(rng);
  const double hx = width / 2.0 * s.drone.altitude_m / s.camera.focal_px - 0.5;
  const double hy = height / 2.0 * s.drone.altitude_m / s.camera.focal_px - 0.5;
  auto spaced = [&](const sim::Obstacle& o) {
    return std::all_of(s.obstacles.begin(), s.obstacles.end(),
                       [&](const sim::Obstacle& p) { return sim::footprint_gap_m(o, p) >= 1.5; });
  };
  if (corridor) {
    const double gap = 2.5 + 2.5 * u(rng);
    const double mid = (u(rng) - 0.5) * hx;
    const double t1 = 1 + u(rng), t2 = 1 + u(rng);
    const double y0 = -hy + u(rng), y1 = hy - u(rng);
    s.obstacles.push_back(box({std::max(-hx, mid - gap / 2 - t1), y0}, {mid - gap / 2, y1}, 2 + 4 * u(rng)));
    s.obstacles.push_back(box({mid + gap / 2, y0}, {std::min(hx, mid + gap / 2 + t2), y1}, 2 + 4 * u(rng)));
  }
  const int boxes = corridor ? static_cast<int>(u(rng) * 3) : 4 + static_cast<int>(u(rng) * 4);
  for (int tries = 0; static_cast<int>(s.obstacles.size()) < boxes + (corridor ? 2 : 0) && tries < 200; ++tries) {
    const Vec2 size{0.8 + 2.2 * u(rng), 0.8 + 2.2 * u(rng)};
    const Vec2 lo{-hx + (2 * hx - size.x) * u(rng), -hy + (2 * hy - size.y) * u(rng)};
    const auto o = box(lo, lo + size, 1 + 5 * u(rng));
    if (spaced(o)) s.obstacles.push_back(o);
  }
  return s;
}

Outcome plz_accuracy() {
  std::mt19937_64 rng(2024);
  double sum_d = 0, sum_a = 0;
  int edge_violations = 0, missing = 0;
  for (int i = 0; i < 20; ++i) {
    const sim::Scenario s = random_scene(rng, i % 2 == 0);
    const auto w = sim::initial_state(s);
    const CameraModel cam = sim::color_camera(s, w);
    const EdgeMap edges = imaging::canny_edges(imaging::to_grayscale(sim::render_frame(s, w)));
    const auto candidates = plz::analyze_edges(edges, cam).candidates;
    const auto best = std::find_if(candidates.begin(), candidates.end(), [](const plz::PLZ& z) { return z.admitted; });
    for (const plz::PLZ& z : candidates)
      if (z.admitted && plz::circle_contains_edge(edges, z.center_px, z.radius_px())) ++edge_violations;
    if (best == candidates.end()) {
      ++missing;
      continue;
    }
    const sim::TruthCircle truth = sim::largest_empty_circle(s, w, sim::field_of_view(s, w));
    sum_d += std::abs(best->diameter_m - truth.diameter_m) / truth.diameter_m * 100.0;
    sum_a += std::abs(best->area_m2 - truth.area_m2) / truth.area_m2 * 100.0;
  }
  const double mean_d = sum_d / 20, mean_a = sum_a / 20;
  return {missing == 0 && edge_violations == 0 && mean_d <= 1.0 && mean_a <= 2.0,
          "20 scenes, mean diameter error " + fmt("%.3f", mean_d) + "%, mean area error " + fmt("%.3f", mean_a) +
              "%, edge violations " + std::to_string(edge_violations) + ", scenes without a zone " +
              std::to_string(missing)};
}

Outcome decision_grid() {
  int mismatches = 0;
  for (int tx = 0; tx <= 60; ++tx)
    for (int td = 0; td <= 60; ++td) {
      tracking::ReachEstimate r;
      r.t_x_seconds = tx;
      const bool cleared = decision::clearance_decision(0, std::span(&r, 1), td).status == decision::Clearance::Cleared;
      mismatches += cleared != (std::abs(tx - td) > 20);
    }
  return {mismatches == 0, "3721 cells, " + std::to_string(mismatches) + " mismatches"};
}

Outcome depth_checks() {
  const CameraModel cam{500, 10, 640, 480};
  const PointPx pp = cam.principal_point();
  const double H = 10;
  const double e0 = std::abs(descent::pixel_depth_expected(pp, H, cam) / H - 1);
  const double e45 = std::abs(descent::pixel_depth_expected(pp + PointPx{0, 500}, H, cam) / (H * std::sqrt(2.0)) - 1);
  const double e60 = std::abs(descent::pixel_depth_expected(pp + PointPx{500 * std::sqrt(3.0), 0}, H, cam) / (2 * H) - 1);
  const double worst = std::max({e0, e45, e60});
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> r(0, 479), c(0, 639), alt(0.5, 100);
  int below = 0;
  for (int i = 0; i < 1000000; ++i) {
    const double h = alt(rng);
    if (descent::pixel_depth_expected({r(rng), c(rng)}, h, cam.at_altitude(h)) < h) ++below;
  }
  return {worst <= 1e-12 && below == 0,
          "0/45/60 deg worst relative error " + fmt("%.3g", worst) + "; D < H on " + std::to_string(below) + " of 1e6 pixels"};
}

// [first, last] of a sorted frame list, or nothing when it has gaps.
std::optional<std::pair<int, int>> interval(const std::vector<int>& frames) {
  if (frames.empty()) return std::nullopt;
  for (std::size_t i = 1; i < frames.size(); ++i)
    if (frames[i] != frames[i - 1] + 1) return std::nullopt;
  return std::pair{frames.front(), frames.back()};
}

Outcome safe_landing() {
  const auto r = mission::run_mission(load("crossing"));
  std::vector<int> hold, unsafe;
  for (const auto& d : r.decisions) {
    if (d.phase == decision::LandingPhase::Hold) hold.push_back(d.frame_index);
    if (d.target_plz_id && std::isfinite(d.truth_margin_s) && d.truth_margin_s <= r.scenario.mission.margin_s)
      unsafe.push_back(d.frame_index);
  }
  const auto h = interval(hold), t = interval(unsafe);
  std::string detail = "outcome " + std::string(mission::to_string(r.outcome));
  if (h) detail += ", hold " + std::to_string(h->first) + "-" + std::to_string(h->second);
  else detail += hold.empty() ? ", no hold" : ", hold not contiguous";
  if (t) detail += ", truth margin <= " + fmt("%g", r.scenario.mission.margin_s) + " s on " +
                   std::to_string(t->first) + "-" + std::to_string(t->second);
  else detail += unsafe.empty() ? ", truth never unsafe" : ", truth frames not contiguous";
  detail += r.touchdown_inside_target ? ", touchdown inside target" : ", touchdown outside target";
  detail += r.touchdown_footprint_clear ? ", footprint clear" : ", footprint overlaps an obstacle";
  const bool covered = h && t && std::abs(h->first - t->first) <= 1 && std::abs(h->second - t->second) <= 1;
  return {r.outcome == mission::Outcome::Landed && covered && r.touchdown_inside_target && r.touchdown_footprint_clear,
          detail};
}

bool same_partition(const std::vector<int>& a, const std::vector<int>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if ((a[i] == a[j]) != (b[i] == b[j])) return false;
  return true;
}

double exhaustive_gap(const std::vector<Vec2>& a, const std::vector<Vec2>& b) {
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j)
      if (segments_intersect(a[i], a[(i + 1) % a.size()], b[j], b[(j + 1) % b.size()])) return 0.0;
  if (point_in_polygon(a[0], b) || point_in_polygon(b[0], a)) return 0.0;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = 0; j < b.size(); ++j) {
      best = std::min(best, point_segment_distance(a[i], b[j], b[(j + 1) % b.size()]));
      best = std::min(best, point_segment_distance(b[j], a[i], a[(i + 1) % a.size()]));
    }
  return best;
}

Outcome geometry_oracles() {
  std::mt19937_64 rng(8);
  std::uniform_int_distribution<int> coord(0, 199), spread(-12, 12), count(1, 30), ncont(3, 15);

  int cluster_fail = 0;
  for (int set = 0; set < 100; ++set) {
    std::vector<plz::Contour> contours(ncont(rng));
    for (auto& c : contours) {
      const int r0 = coord(rng), c0 = coord(rng);
      for (int k = count(rng); k > 0; --k) c.points.push_back({r0 + spread(rng), c0 + spread(rng)});
    }
    const auto clusters = plz::cluster_contours(contours, 30.0);
    std::vector<int> got(contours.size(), -1);
    for (std::size_t k = 0; k < clusters.size(); ++k)
      for (std::size_t m : clusters[k].member_contours) got[m] = static_cast<int>(k);
    std::vector<int> parent(contours.size());
    std::iota(parent.begin(), parent.end(), 0);
    std::function<int(int)> find = [&](int x) { return parent[x] == x ? x : parent[x] = find(parent[x]); };
    for (std::size_t i = 0; i < contours.size(); ++i)
      for (std::size_t j = i + 1; j < contours.size(); ++j) {
        bool near = false;
        for (const Pixel& p : contours[i].points)
          for (const Pixel& q : contours[j].points)
            near = near || std::hypot(p.row - q.row, p.col - q.col) < 30.0;
        if (near) parent[find(static_cast<int>(i))] = find(static_cast<int>(j));
      }
    std::vector<int> want(contours.size());
    for (std::size_t i = 0; i < contours.size(); ++i) want[i] = find(static_cast<int>(i));
    if (std::count(got.begin(), got.end(), -1) > 0 || !same_partition(got, want)) ++cluster_fail;
  }

  int gap_fail = 0;
  std::uniform_real_distribution<double> pos(0, 300), off(-40, 40);
  for (int pair = 0; pair < 100;) {
    auto hull = [&] {
      const Vec2 c{pos(rng), pos(rng)};
      std::vector<Vec2> pts;
      for (int k = 0; k < 8; ++k) pts.push_back(c + Vec2{off(rng), off(rng)});
      return convex_hull(pts);
    };
    const auto ha = hull(), hb = hull();
    if (ha.size() < 3 || hb.size() < 3) continue;
    ++pair;
    plz::ObstaclePolygon a, b;
    for (Vec2 v : ha) a.hull.push_back({v.y, v.x});
    for (Vec2 v : hb) b.hull.push_back({v.y, v.x});
    b.member_contours = {1};
    const double got = plz::polygon_gap_px(a, b).distance_px;
    if (std::abs(got - exhaustive_gap(ha, hb)) > 1e-9) ++gap_fail;
  }

  int lec_fail = 0;
  double worst = 0;
  for (int scene = 0; scene < 10; ++scene) {
    const sim::Scenario s = random_scene(rng, scene % 2 == 0, 240, 180);
    const auto w = sim::initial_state(s);
    const EdgeMap edges = imaging::canny_edges(imaging::to_grayscale(sim::render_frame(s, w)));
    plz::DetectParams params;
    params.min_area_m2 = 0.0;
    const auto zones = plz::detect_candidates(edges, sim::color_camera(s, w), params);
    const auto set = edges.set_pixels();
    double brute = 0;
    for (int r = 0; r < edges.height; ++r)
      for (int c = 0; c < edges.width; ++c) {
        double d = std::min({r + 0.5, edges.height - 0.5 - r, c + 0.5, edges.width - 0.5 - c});
        for (const Pixel& p : set) {
          if (d <= brute) break;
          d = std::min(d, std::hypot(p.row - r, p.col - c));
        }
        brute = std::max(brute, d);
      }
    const double got = zones.empty() ? 0.0 : zones.front().diameter_px;
    worst = std::max(worst, std::abs(got - 2 * brute));
    if (std::abs(got - 2 * brute) > 1.0) ++lec_fail;
  }

  return {cluster_fail == 0 && gap_fail == 0 && lec_fail == 0,
          "clusters " + std::to_string(100 - cluster_fail) + "/100, gaps " + std::to_string(100 - gap_fail) +
              "/100, largest circle " + std::to_string(10 - lec_fail) + "/10 (worst diameter difference " +
              fmt("%.3f", worst) + " px)"};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

Outcome determinism() {
  namespace fs = std::filesystem;
  const fs::path root = fs::temp_directory_path() / ("landing_determinism_" + std::to_string(::getpid()));
  const auto scenario = load("crossing");
  for (const char* run : {"a", "b"}) mission::write_artifacts(mission::run_mission(scenario), root / run, true);
  int files = 0, differ = 0;
  for (const auto& e : fs::recursive_directory_iterator(root / "a")) {
    if (!e.is_regular_file()) continue;
    ++files;
    const fs::path other = root / "b" / fs::relative(e.path(), root / "a");
    if (!fs::exists(other) || slurp(e.path()) != slurp(other)) ++differ;
  }
  fs::remove_all(root);
  return {files > 0 && differ == 0, std::to_string(files) + " artifacts compared, " + std::to_string(differ) + " differ"};
}

struct Criterion {
  int number;
  const char* title;
  double budget_s;
  Outcome (*run)();
};

constexpr Criterion kCriteria[] = {
    {1, "area formula reproduces the zone table", 1, area_formula},
    {2, "error columns of the zone table", 1, error_columns},
    {3, "mover speed estimates", 30, velocity_rows},
    {4, "zone geometry on random scenes", 60, plz_accuracy},
    {5, "clearance rule grid", 1, decision_grid},
    {6, "flat-ground depth", 1, depth_checks},
    {7, "safe landing with a crossing mover", 60, safe_landing},
    {8, "geometry oracles", 120, geometry_oracles},
    {9, "determinism", 60, determinism},
};

}  // namespace

int main(int argc, char** argv) {
  int only = 0;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--only" && i + 1 < argc) {
      only = std::atoi(argv[++i]);
    } else {
      std::fprintf(stderr, "usage: %s [--only N]\n", argv[0]);
      return 4;
    }
  }
  int failed = 0;
  for (const Criterion& c : kCriteria) {
    if (only && c.number != only) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool in_time = secs < c.budget_s;
    const bool pass = o.pass && in_time;
    failed += !pass;
    std::printf("criterion %d %s: %s; %.2f s of %.0f s%s\n", c.number, pass ? "PASS" : "FAIL", c.title,
                secs, c.budget_s, in_time ? "" : " (over budget)");
    std::printf("  %s\n", o.detail.c_str());
    std::fflush(stdout);
  }
  return failed ? 1 : 0;
}
