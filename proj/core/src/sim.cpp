#include "landing/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace landing::sim {

namespace {

constexpr int kSupersample = 4;

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform value in [-1, 1] fixed to a world texel.
double texel_noise(std::uint64_t seed, Vec2 p, double texel_m) {
  const auto ix = static_cast<std::int64_t>(std::floor(p.x / texel_m));
  const auto iy = static_cast<std::int64_t>(std::floor(p.y / texel_m));
  const std::uint64_t h =
      splitmix(seed ^ splitmix(static_cast<std::uint64_t>(ix) ^ splitmix(static_cast<std::uint64_t>(iy))));
  return static_cast<double>(h >> 11) * (2.0 / 9007199254740992.0) - 1.0;
}

struct PixelBox {
  int r0, r1, c0, c1;
};

PixelBox pixel_box(const CameraModel& cam, Vec2 nadir, Vec2 lo, Vec2 hi) {
  const PointPx a = cam.project_offset(lo - nadir);
  const PointPx b = cam.project_offset(hi - nadir);
  return {static_cast<int>(std::floor(std::min(a.row, b.row))) - 1,
          static_cast<int>(std::ceil(std::max(a.row, b.row))) + 1,
          static_cast<int>(std::floor(std::min(a.col, b.col))) - 1,
          static_cast<int>(std::ceil(std::max(a.col, b.col))) + 1};
}

void bounds(const std::vector<Vec2>& poly, Vec2& lo, Vec2& hi) {
  lo = hi = poly.front();
  for (Vec2 v : poly) {
    lo = {std::min(lo.x, v.x), std::min(lo.y, v.y)};
    hi = {std::max(hi.x, v.x), std::max(hi.y, v.y)};
  }
}

std::uint8_t to_level(double v) { return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L)); }

// First crossing of the horizontal trace a->b with the polygon boundary, as a
// fraction of the trace length.
std::optional<double> first_crossing(Vec2 a, Vec2 b, const std::vector<Vec2>& poly) {
  std::optional<double> best;
  const Vec2 d = b - a;
  for (std::size_t i = 0; i < poly.size(); ++i) {
    const Vec2 p = poly[i];
    const Vec2 e = poly[(i + 1) % poly.size()] - p;
    const double den = cross(d, e);
    if (den == 0.0) continue;
    const Vec2 ap = p - a;
    const double t = cross(ap, e) / den;
    const double u = cross(ap, d) / den;
    if (t < 0.0 || t > 1.0 || u < 0.0 || u > 1.0) continue;
    if (!best || t < *best) best = t;
  }
  return best;
}

double signed_footprint_distance(Vec2 p, const Obstacle& o) {
  const double d = distance_to_boundary(p, o.footprint_m);
  return point_in_polygon(p, o.footprint_m) ? -d : d;
}

// Grid search refined by repeated local grids around the best point.
TruthCircle search_circle(const Scenario& s, const WorldState& state, const GroundRect& region, Vec2 lo, Vec2 hi,
                          double step, bool movers) {
  auto f = [&](Vec2 p) { return free_clearance_m(s, state, region, p, movers); };
  struct Seed {
    double value;
    Vec2 p;
  };
  std::vector<Seed> seeds;
  const int nx = std::max(1, static_cast<int>(std::ceil((hi.x - lo.x) / step)));
  const int ny = std::max(1, static_cast<int>(std::ceil((hi.y - lo.y) / step)));
  for (int j = 0; j <= ny; ++j) {
    for (int i = 0; i <= nx; ++i) {
      const Vec2 p{std::min(hi.x, lo.x + i * step), std::min(hi.y, lo.y + j * step)};
      seeds.push_back({f(p), p});
    }
  }
  std::stable_sort(seeds.begin(), seeds.end(), [](const Seed& a, const Seed& b) { return a.value > b.value; });

  TruthCircle best{seeds.front().p, 0.0, 0.0};
  double best_value = -std::numeric_limits<double>::infinity();
  const double keep = seeds.front().value - step;
  std::vector<Vec2> refined_from;
  constexpr int kMaxSeeds = 24;
  for (const Seed& sd : seeds) {
    if (sd.value < keep || static_cast<int>(refined_from.size()) >= kMaxSeeds) break;
    const bool near_done = std::any_of(refined_from.begin(), refined_from.end(),
                                       [&](Vec2 q) { return distance(q, sd.p) < 2.0 * step; });
    if (near_done) continue;
    refined_from.push_back(sd.p);
    Vec2 c = sd.p;
    double v = sd.value;
    for (double h = step; h > 1e-7; h /= 4.0) {
      Vec2 next = c;
      for (int j = -8; j <= 8; ++j) {
        for (int i = -8; i <= 8; ++i) {
          Vec2 p{c.x + i * h / 4.0, c.y + j * h / 4.0};
          p = {std::clamp(p.x, lo.x, hi.x), std::clamp(p.y, lo.y, hi.y)};
          const double fv = f(p);
          if (fv > v) {
            v = fv;
            next = p;
          }
        }
      }
      c = next;
    }
    if (v > best_value) {
      best_value = v;
      best.center_m = c;
    }
  }
  best.diameter_m = std::max(0.0, 2.0 * best_value);
  best.area_m2 = std::numbers::pi * best.diameter_m * best.diameter_m / 4.0;
  return best;
}

}  // namespace

Vec2 mover_position(const Mover& mover, double time_s) { return mover.start_m + mover.velocity_mps * time_s; }

WorldState initial_state(const Scenario& s) {
  WorldState w;
  for (const Mover& m : s.movers) w.movers_m.push_back(m.start_m);
  w.drone.position = {s.drone.position_m.x, s.drone.position_m.y, s.drone.altitude_m};
  w.drone.cruise_speed_mps = s.drone.cruise_speed_mps;
  w.drone.descent_speed_mps = s.drone.descent_speed_mps;
  w.drone.phase = decision::LandingPhase::Scan;
  return w;
}

WorldState advance(const Scenario& s, const WorldState& state, double dt_s) {
  WorldState w = state;
  w.time_s = state.time_s + dt_s;
  for (std::size_t i = 0; i < s.movers.size(); ++i) w.movers_m[i] = mover_position(s.movers[i], w.time_s);
  return w;
}

CameraModel color_camera(const Scenario& s, const WorldState& state) {
  return {s.camera.focal_px, state.drone.position.altitude_m, s.camera.width_px, s.camera.height_px};
}

CameraModel depth_camera(const Scenario& s, const WorldState& state) {
  const double k = s.camera.depth_scale;
  return {s.camera.focal_px * k, state.drone.position.altitude_m,
          std::max(2, static_cast<int>(std::lround(s.camera.width_px * k))),
          std::max(2, static_cast<int>(std::lround(s.camera.height_px * k)))};
}

GroundRect field_of_view(const Scenario& s, const WorldState& state) {
  const CameraModel cam = color_camera(s, state);
  const double m = cam.meters_per_pixel();
  const Vec2 half{cam.width * m / 2.0, cam.height * m / 2.0};
  const Vec2 nadir = state.drone.position.ground();
  return {nadir - half, nadir + half};
}

Frame render_frame(const Scenario& s, const WorldState& state) {
  const CameraModel cam = color_camera(s, state);
  cam.validate();
  const Vec2 nadir = state.drone.position.ground();
  const double m = cam.meters_per_pixel();
  const PointPx pp = cam.principal_point();
  const double ground = s.world.ground_intensity;
  const double amp = s.world.texture_amplitude;

  std::vector<PixelBox> obstacle_boxes;
  for (const Obstacle& o : s.obstacles) {
    Vec2 lo, hi;
    bounds(o.footprint_m, lo, hi);
    obstacle_boxes.push_back(pixel_box(cam, nadir, lo, hi));
  }
  std::vector<PixelBox> mover_boxes;
  for (std::size_t i = 0; i < s.movers.size(); ++i) {
    const Vec2 r{s.movers[i].radius_m, s.movers[i].radius_m};
    mover_boxes.push_back(pixel_box(cam, nadir, state.movers_m[i] - r, state.movers_m[i] + r));
  }
  auto inside = [](const PixelBox& b, int r, int c) { return r >= b.r0 && r <= b.r1 && c >= b.c0 && c <= b.c1; };

  Frame out(cam.width, cam.height, 3);
  std::vector<std::size_t> hit_obstacles;
  std::vector<std::size_t> hit_movers;
  for (int r = 0; r < cam.height; ++r) {
    for (int c = 0; c < cam.width; ++c) {
      const Vec2 center = nadir + Vec2{(c - pp.col) * m, (r - pp.row) * m};
      const double tex = amp * texel_noise(s.seed, center, s.world.texel_m);
      hit_obstacles.clear();
      hit_movers.clear();
      for (std::size_t i = 0; i < obstacle_boxes.size(); ++i) {
        if (inside(obstacle_boxes[i], r, c)) hit_obstacles.push_back(i);
      }
      for (std::size_t i = 0; i < mover_boxes.size(); ++i) {
        if (inside(mover_boxes[i], r, c)) hit_movers.push_back(i);
      }
      double value = ground + tex;
      if (!hit_obstacles.empty() || !hit_movers.empty()) {
        double sum = 0.0;
        for (int sy = 0; sy < kSupersample; ++sy) {
          for (int sx = 0; sx < kSupersample; ++sx) {
            const Vec2 p = center + Vec2{((sx + 0.5) / kSupersample - 0.5) * m, ((sy + 0.5) / kSupersample - 0.5) * m};
            double v = ground + tex;
            bool covered = false;
            for (std::size_t i : hit_movers) {
              if (distance(p, state.movers_m[i]) <= s.movers[i].radius_m) {
                v = ground + s.movers[i].contrast;
                covered = true;
                break;
              }
            }
            if (!covered) {
              for (std::size_t i : hit_obstacles) {
                if (point_in_polygon(p, s.obstacles[i].footprint_m)) {
                  v = ground - s.obstacles[i].border_contrast + tex;
                  break;
                }
              }
            }
            sum += v;
          }
        }
        value = sum / (kSupersample * kSupersample);
      }
      const std::uint8_t level = to_level(value);
      for (int ch = 0; ch < 3; ++ch) out.at(r, c, ch) = level;
    }
  }
  return out;
}

DepthFrame render_depth(const Scenario& s, const WorldState& state, std::uint64_t frame_key) {
  const CameraModel cam = depth_camera(s, state);
  cam.validate();
  const double H = state.drone.position.altitude_m;
  const Vec2 nadir = state.drone.position.ground();
  const PointPx pp = cam.principal_point();
  DepthFrame out(cam.width, cam.height, cam);

  std::mt19937_64 rng(splitmix(s.seed ^ splitmix(frame_key)));
  std::normal_distribution<double> noise(0.0, 1.0);
  for (int r = 0; r < cam.height; ++r) {
    for (int c = 0; c < cam.width; ++c) {
      // Ground displacement per meter of drop along this ray.
      const Vec2 slope{(c - pp.col) / cam.focal_px, (r - pp.row) / cam.focal_px};
      const double stretch = std::sqrt(1.0 + dot(slope, slope));
      double drop = H;
      for (const Obstacle& o : s.obstacles) {
        if (o.height_m <= 0.0 || o.height_m >= H) continue;
        const Vec2 top = nadir + slope * (H - o.height_m);
        if (point_in_polygon(top, o.footprint_m)) {
          drop = std::min(drop, H - o.height_m);
          continue;
        }
        const Vec2 foot = nadir + slope * H;
        if (const auto t = first_crossing(top, foot, o.footprint_m)) {
          drop = std::min(drop, H - o.height_m * (1.0 - *t));
        }
      }
      double d = drop * stretch;
      if (s.camera.depth_noise_m > 0.0) d += s.camera.depth_noise_m * noise(rng);
      out.at(r, c) = d > 0.0 ? static_cast<float>(d) : std::numeric_limits<float>::quiet_NaN();
    }
  }
  return out;
}

double surface_height(const Scenario& s, Vec2 p) {
  double h = 0.0;
  for (const Obstacle& o : s.obstacles) {
    if (point_in_polygon(p, o.footprint_m)) h = std::max(h, o.height_m);
  }
  return h;
}

descent::TofReading tof_reading(const Scenario& s, const WorldState& state) {
  const double range = state.drone.position.altitude_m - surface_height(s, state.drone.position.ground());
  return descent::TofReading::from_range(std::max(0.0, range));
}

double free_clearance_m(const Scenario& s, const WorldState& state, const GroundRect& region, Vec2 p,
                        bool include_movers) {
  double d = std::min({p.x - region.min_m.x, region.max_m.x - p.x, p.y - region.min_m.y, region.max_m.y - p.y});
  for (const Obstacle& o : s.obstacles) d = std::min(d, signed_footprint_distance(p, o));
  if (include_movers) {
    for (std::size_t i = 0; i < s.movers.size(); ++i) {
      d = std::min(d, distance(p, state.movers_m[i]) - s.movers[i].radius_m);
    }
  }
  return d;
}

TruthCircle largest_empty_circle(const Scenario& s, const WorldState& state, const GroundRect& region,
                                 bool include_movers) {
  const double step = color_camera(s, state).meters_per_pixel();
  return search_circle(s, state, region, region.min_m, region.max_m, step, include_movers);
}

TruthCircle local_empty_circle(const Scenario& s, const WorldState& state, const GroundRect& region, Vec2 seed,
                               double search_radius_m, bool include_movers) {
  const Vec2 r{search_radius_m, search_radius_m};
  const Vec2 lo{std::max(region.min_m.x, seed.x - r.x), std::max(region.min_m.y, seed.y - r.y)};
  const Vec2 hi{std::min(region.max_m.x, seed.x + r.x), std::min(region.max_m.y, seed.y + r.y)};
  const double step = std::max(search_radius_m / 40.0, 1e-4);
  return search_circle(s, state, region, lo, hi, step, include_movers);
}

double footprint_gap_m(const Obstacle& a, const Obstacle& b) {
  const auto& P = a.footprint_m;
  const auto& Q = b.footprint_m;
  for (std::size_t i = 0; i < P.size(); ++i) {
    for (std::size_t j = 0; j < Q.size(); ++j) {
      if (segments_intersect(P[i], P[(i + 1) % P.size()], Q[j], Q[(j + 1) % Q.size()])) return 0.0;
    }
  }
  if (point_in_polygon(P.front(), Q) || point_in_polygon(Q.front(), P)) return 0.0;
  double d = std::numeric_limits<double>::infinity();
  for (Vec2 p : P) d = std::min(d, distance_to_boundary(p, Q));
  for (Vec2 q : Q) d = std::min(d, distance_to_boundary(q, P));
  return d;
}

TruthRecord ground_truth(const Scenario& s, const WorldState& state) {
  TruthRecord t;
  t.time_s = state.time_s;
  for (std::size_t i = 0; i < s.obstacles.size(); ++i) {
    for (std::size_t j = i + 1; j < s.obstacles.size(); ++j) {
      t.gaps.push_back({static_cast<int>(i), static_cast<int>(j), footprint_gap_m(s.obstacles[i], s.obstacles[j])});
    }
  }
  t.largest = largest_empty_circle(s, state, field_of_view(s, state));
  for (std::size_t i = 0; i < s.movers.size(); ++i) {
    MoverTruth m;
    m.index = static_cast<int>(i);
    m.position_m = state.movers_m[i];
    m.velocity_mps = s.movers[i].velocity_mps;
    m.speed_mps = s.movers[i].speed_mps();
    m.speed_kmh = m.speed_mps * 3.6;
    t.movers.push_back(m);
  }
  return t;
}

double mover_time_to_reach(const Mover& mover, const WorldState& state, int index, Vec2 point_m) {
  const double v = mover.speed_mps();
  if (v <= 0.0) return std::numeric_limits<double>::infinity();
  return distance(state.movers_m[static_cast<std::size_t>(index)], point_m) / v;
}

}  // namespace landing::sim
