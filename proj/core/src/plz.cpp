#include "landing/plz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "landing/union_find.hpp"

namespace landing::plz {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Vec2 to_vec(PointPx p) { return {p.col, p.row}; }
PointPx to_px(Vec2 v) { return {v.y, v.x}; }

}  // namespace

std::vector<Contour> extract_contours(const EdgeMap& edges) {
  std::vector<Contour> contours;
  std::vector<std::uint8_t> seen(edges.bits.size(), 0);
  std::vector<Pixel> stack;
  // neighbor order: clockwise from east, pushed in reverse so east pops first
  constexpr std::array<Pixel, 8> kNeighbors{{{0, 1}, {1, 1}, {1, 0}, {1, -1}, {0, -1}, {-1, -1}, {-1, 0}, {-1, 1}}};

  for (int r = 0; r < edges.height; ++r) {
    for (int c = 0; c < edges.width; ++c) {
      const std::size_t idx = static_cast<std::size_t>(r) * edges.width + c;
      if (!edges.bits[idx] || seen[idx]) continue;
      Contour contour;
      stack.push_back({r, c});
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        const std::size_t pi = static_cast<std::size_t>(p.row) * edges.width + p.col;
        if (seen[pi]) continue;
        seen[pi] = 1;
        contour.points.push_back(p);
        for (auto it = kNeighbors.rbegin(); it != kNeighbors.rend(); ++it) {
          const int nr = p.row + it->row;
          const int nc = p.col + it->col;
          if (!edges.contains(nr, nc)) continue;
          const std::size_t ni = static_cast<std::size_t>(nr) * edges.width + nc;
          if (edges.bits[ni] && !seen[ni]) stack.push_back({nr, nc});
        }
      }
      contours.push_back(std::move(contour));
    }
  }
  return contours;
}

std::vector<ObstaclePolygon> cluster_contours(std::span<const Contour> contours, double radius_px) {
  if (!(radius_px > 0.0)) throw std::invalid_argument("cluster radius must be positive");

  struct Tagged {
    Pixel p;
    std::size_t contour;
  };
  std::vector<Tagged> points;
  int max_row = 0;
  int max_col = 0;
  for (std::size_t i = 0; i < contours.size(); ++i) {
    for (const Pixel& p : contours[i].points) {
      points.push_back({p, i});
      max_row = std::max(max_row, p.row);
      max_col = std::max(max_col, p.col);
    }
  }

  // Bucket points into square cells one radius wide so any pair closer than
  // the radius lies in the same or an adjacent cell.
  const int cell = std::max(1, static_cast<int>(std::ceil(radius_px)));
  const int grid_rows = max_row / cell + 1;
  const int grid_cols = max_col / cell + 1;
  std::vector<std::vector<std::size_t>> grid(static_cast<std::size_t>(grid_rows) * grid_cols);
  for (std::size_t i = 0; i < points.size(); ++i) {
    const Pixel p = points[i].p;
    grid[static_cast<std::size_t>(p.row / cell) * grid_cols + p.col / cell].push_back(i);
  }

  UnionFind uf(contours.size());
  const double r2 = radius_px * radius_px;
  for (const Tagged& t : points) {
    const int gr = t.p.row / cell;
    const int gc = t.p.col / cell;
    for (int dr = -1; dr <= 1; ++dr) {
      for (int dc = -1; dc <= 1; ++dc) {
        const int nr = gr + dr;
        const int nc = gc + dc;
        if (nr < 0 || nc < 0 || nr >= grid_rows || nc >= grid_cols) continue;
        for (std::size_t j : grid[static_cast<std::size_t>(nr) * grid_cols + nc]) {
          const Tagged& u = points[j];
          if (u.contour <= t.contour || uf.same(u.contour, t.contour)) continue;
          const double drow = u.p.row - t.p.row;
          const double dcol = u.p.col - t.p.col;
          if (drow * drow + dcol * dcol < r2) uf.unite(u.contour, t.contour);
        }
      }
    }
  }

  const std::vector<std::size_t> label = uf.labels();
  std::vector<ObstaclePolygon> polygons(uf.set_count());
  std::vector<std::vector<Vec2>> members(uf.set_count());
  for (std::size_t i = 0; i < contours.size(); ++i) {
    polygons[label[i]].member_contours.push_back(i);
    for (const Pixel& p : contours[i].points) members[label[i]].push_back({double(p.col), double(p.row)});
  }
  for (std::size_t k = 0; k < polygons.size(); ++k) {
    for (const Vec2& v : convex_hull(std::move(members[k]))) polygons[k].hull.push_back(to_px(v));
  }
  return polygons;
}

namespace {

using Segment = std::pair<Vec2, Vec2>;

std::vector<Segment> boundary_segments(const std::vector<Vec2>& poly) {
  std::vector<Segment> segs;
  if (poly.size() == 1) {
    segs.emplace_back(poly[0], poly[0]);
  } else if (poly.size() == 2) {
    segs.emplace_back(poly[0], poly[1]);
  } else {
    for (std::size_t i = 0; i < poly.size(); ++i) segs.emplace_back(poly[i], poly[(i + 1) % poly.size()]);
  }
  return segs;
}

// Intersection point of two segments already known to intersect.
Vec2 intersection_point(const Segment& s, const Segment& t) {
  const Vec2 r = s.second - s.first;
  const Vec2 q = t.second - t.first;
  const double denom = cross(r, q);
  if (denom == 0.0) {
    // collinear overlap: some endpoint lies on the other segment
    for (Vec2 p : {t.first, t.second}) {
      if (point_segment_distance(p, s.first, s.second) == 0.0) return p;
    }
    return s.first;
  }
  const double u = cross(t.first - s.first, q) / denom;
  return s.first + r * u;
}

}  // namespace

Gap polygon_gap_px(const ObstaclePolygon& a, const ObstaclePolygon& b) {
  if (&a == &b || a.hull == b.hull) throw std::invalid_argument("polygon_gap_px needs two distinct polygons");
  if (a.hull.empty() || b.hull.empty()) throw std::invalid_argument("polygon_gap_px needs non-empty hulls");

  std::vector<Vec2> pa;
  std::vector<Vec2> pb;
  for (PointPx p : a.hull) pa.push_back(to_vec(p));
  for (PointPx p : b.hull) pb.push_back(to_vec(p));
  const std::vector<Segment> sa = boundary_segments(pa);
  const std::vector<Segment> sb = boundary_segments(pb);

  for (const Segment& s : sa) {
    for (const Segment& t : sb) {
      if (segments_intersect(s.first, s.second, t.first, t.second)) {
        const Vec2 x = intersection_point(s, t);
        return {0.0, to_px(x), to_px(x)};
      }
    }
  }
  if (pb.size() >= 3 && point_in_polygon(pa[0], pb)) return {0.0, to_px(pa[0]), to_px(pa[0])};
  if (pa.size() >= 3 && point_in_polygon(pb[0], pa)) return {0.0, to_px(pb[0]), to_px(pb[0])};

  Gap best{kInf, {}, {}};
  for (Vec2 v : pa) {
    for (const Segment& t : sb) {
      const Vec2 q = closest_point_on_segment(v, t.first, t.second);
      const double d = distance(v, q);
      if (d < best.distance_px) best = {d, to_px(v), to_px(q)};
    }
  }
  for (Vec2 v : pb) {
    for (const Segment& s : sa) {
      const Vec2 q = closest_point_on_segment(v, s.first, s.second);
      const double d = distance(v, q);
      if (d < best.distance_px) best = {d, to_px(q), to_px(v)};
    }
  }
  return best;
}

double px_to_meters(double d_px, const CameraModel& cam) {
  cam.validate();
  return d_px * cam.altitude_m / cam.focal_px;
}

double zone_area(double diameter_m) {
  if (diameter_m < 0.0) throw std::invalid_argument("zone diameter must be non-negative");
  return std::numbers::pi * diameter_m * diameter_m / 4.0;
}

double zone_area_square(double diameter_m) {
  if (diameter_m < 0.0) throw std::invalid_argument("zone diameter must be non-negative");
  return diameter_m * diameter_m;
}

namespace {

// Distance from p to the frame border, the border lying half a pixel outside
// the outermost pixel centers.
double border_distance(PointPx p, int width, int height) {
  return std::min({p.row + 0.5, height - 0.5 - p.row, p.col + 0.5, width - 0.5 - p.col});
}

// Squared 1-D distance transform of a sampled function (lower envelope of
// parabolas). Infinite samples are not sites.
void envelope_1d(const std::vector<double>& f, std::vector<double>& out, std::vector<int>& v, std::vector<double>& z) {
  const int n = static_cast<int>(f.size());
  int k = -1;
  for (int q = 0; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    if (k < 0) {
      k = 0;
      v[0] = q;
      z[0] = -kInf;
      z[1] = kInf;
      continue;
    }
    double s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    while (s <= z[k]) {
      --k;
      s = ((f[q] + double(q) * q) - (f[v[k]] + double(v[k]) * v[k])) / (2.0 * q - 2.0 * v[k]);
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInf;
  }
  if (k < 0) {
    std::fill(out.begin(), out.end(), kInf);
    return;
  }
  int j = 0;
  for (int q = 0; q < n; ++q) {
    while (z[j + 1] < q) ++j;
    const double d = q - v[j];
    out[q] = d * d + f[v[j]];
  }
}

// Edge pixel centers bucketed for radius queries.
class EdgeIndex {
 public:
  static constexpr int kCell = 16;

  explicit EdgeIndex(const EdgeMap& edges)
      : rows_((edges.height + kCell - 1) / kCell), cols_((edges.width + kCell - 1) / kCell),
        cells_(static_cast<std::size_t>(std::max(rows_, 1)) * std::max(cols_, 1)) {
    for (int r = 0; r < edges.height; ++r) {
      for (int c = 0; c < edges.width; ++c) {
        if (!edges.at(r, c)) continue;
        cells_[static_cast<std::size_t>(r / kCell) * cols_ + c / kCell].push_back({double(r), double(c)});
        all_.push_back({double(r), double(c)});
      }
    }
  }

  std::vector<PointPx> within(PointPx center, double radius) const {
    std::vector<PointPx> out;
    const int r0 = std::max(0, static_cast<int>(std::floor((center.row - radius) / kCell)));
    const int r1 = std::min(rows_ - 1, static_cast<int>(std::floor((center.row + radius) / kCell)));
    const int c0 = std::max(0, static_cast<int>(std::floor((center.col - radius) / kCell)));
    const int c1 = std::min(cols_ - 1, static_cast<int>(std::floor((center.col + radius) / kCell)));
    const double r2 = radius * radius;
    for (int gr = r0; gr <= r1; ++gr) {
      for (int gc = c0; gc <= c1; ++gc) {
        for (const PointPx& p : cells_[static_cast<std::size_t>(gr) * cols_ + gc]) {
          const PointPx d = p - center;
          if (d.row * d.row + d.col * d.col <= r2) out.push_back(p);
        }
      }
    }
    return out;
  }

  const std::vector<PointPx>& all() const { return all_; }

 private:
  int rows_;
  int cols_;
  std::vector<std::vector<PointPx>> cells_;
  std::vector<PointPx> all_;
};

struct Clearance {
  double radius;
  PointPx nearest;
};

Clearance clearance_at(PointPx q, const std::vector<PointPx>& local, int width, int height) {
  Clearance best{kInf, q};
  for (const PointPx& e : local) {
    const double d = distance(q, e);
    if (d < best.radius) best = {d, e};
  }
  const std::array<std::pair<double, PointPx>, 4> borders{{
      {q.row + 0.5, {-0.5, q.col}},
      {height - 0.5 - q.row, {height - 0.5, q.col}},
      {q.col + 0.5, {q.row, -0.5}},
      {width - 0.5 - q.col, {q.row, width - 0.5}},
  }};
  for (const auto& [d, p] : borders) {
    if (d < best.radius) best = {d, p};
  }
  return best;
}

// Moves the center within its pixel cell to the point of largest clearance,
// coarse-to-fine. Equal clearances keep the point closest to the pixel center.
PointPx refine_center(PointPx start, const std::vector<PointPx>& local, int width, int height) {
  PointPx best = start;
  double best_r = clearance_at(start, local, width, height).radius;
  double best_off = 0.0;
  PointPx origin = start;
  for (const auto& [step, half_span] : {std::pair{0.1, 0.5}, std::pair{0.01, 0.1}}) {
    const int n = static_cast<int>(std::lround(half_span / step));
    for (int i = -n; i <= n; ++i) {
      for (int j = -n; j <= n; ++j) {
        const PointPx q{origin.row + i * step, origin.col + j * step};
        if (std::abs(q.row - start.row) > 0.5 + 1e-9 || std::abs(q.col - start.col) > 0.5 + 1e-9) continue;
        const double r = clearance_at(q, local, width, height).radius;
        const double off = distance(q, start);
        if (r > best_r + 1e-12 || (std::abs(r - best_r) <= 1e-12 && off < best_off)) {
          best = q;
          best_r = r;
          best_off = off;
        }
      }
    }
    origin = best;
  }
  return best;
}

}  // namespace

ClearanceField clearance_field(const EdgeMap& edges) {
  const int w = edges.width;
  const int h = edges.height;
  ClearanceField field{w, h, std::vector<double>(static_cast<std::size_t>(w) * h)};

  // vertical pass: squared distance to the nearest edge in the same column
  std::vector<double> col_sq(static_cast<std::size_t>(w) * h, kInf);
  for (int c = 0; c < w; ++c) {
    int last = -1;
    for (int r = 0; r < h; ++r) {
      if (edges.at(r, c)) last = r;
      if (last >= 0) col_sq[static_cast<std::size_t>(r) * w + c] = double(r - last) * (r - last);
    }
    last = -1;
    for (int r = h - 1; r >= 0; --r) {
      if (edges.at(r, c)) last = r;
      if (last >= 0) {
        double& d = col_sq[static_cast<std::size_t>(r) * w + c];
        d = std::min(d, double(last - r) * (last - r));
      }
    }
  }

  // horizontal pass: lower envelope per row
  std::vector<double> f(w);
  std::vector<double> out(w);
  std::vector<int> v(w);
  std::vector<double> z(w + 1);
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) f[c] = col_sq[static_cast<std::size_t>(r) * w + c];
    envelope_1d(f, out, v, z);
    for (int c = 0; c < w; ++c) {
      const double edge_d = std::sqrt(out[c]);
      field.distance[static_cast<std::size_t>(r) * w + c] = std::min(edge_d, border_distance({double(r), double(c)}, w, h));
    }
  }
  return field;
}

bool circle_contains_edge(const EdgeMap& edges, PointPx center, double radius_px) {
  const int r0 = std::max(0, static_cast<int>(std::floor(center.row - radius_px)));
  const int r1 = std::min(edges.height - 1, static_cast<int>(std::ceil(center.row + radius_px)));
  const int c0 = std::max(0, static_cast<int>(std::floor(center.col - radius_px)));
  const int c1 = std::min(edges.width - 1, static_cast<int>(std::ceil(center.col + radius_px)));
  const double limit = radius_px * radius_px - 1e-9;
  for (int r = r0; r <= r1; ++r) {
    for (int c = c0; c <= c1; ++c) {
      if (!edges.at(r, c)) continue;
      const double dr = r - center.row;
      const double dc = c - center.col;
      if (dr * dr + dc * dc < limit) return true;
    }
  }
  return false;
}

std::vector<PLZ> detect_candidates(const EdgeMap& edges, const CameraModel& cam, const DetectParams& params) {
  cam.validate();
  if (cam.width != edges.width || cam.height != edges.height) {
    throw std::invalid_argument("camera image size must match the edge map");
  }
  const int w = edges.width;
  const int h = edges.height;
  const ClearanceField field = clearance_field(edges);

  struct Maximum {
    Pixel p;
    double radius;
    double to_principal;
  };
  const PointPx principal = cam.principal_point();
  std::vector<Maximum> maxima;
  for (int r = 0; r < h; ++r) {
    for (int c = 0; c < w; ++c) {
      const double d = field.at(r, c);
      if (d < params.min_candidate_radius_px) continue;
      bool is_max = true;
      for (int dr = -1; dr <= 1 && is_max; ++dr) {
        for (int dc = -1; dc <= 1; ++dc) {
          const int nr = r + dr;
          const int nc = c + dc;
          if ((dr == 0 && dc == 0) || nr < 0 || nc < 0 || nr >= h || nc >= w) continue;
          if (field.at(nr, nc) > d) {
            is_max = false;
            break;
          }
        }
      }
      if (is_max) maxima.push_back({{r, c}, d, distance(PointPx{double(r), double(c)}, principal)});
    }
  }
  std::sort(maxima.begin(), maxima.end(), [](const Maximum& a, const Maximum& b) {
    if (a.radius != b.radius) return a.radius > b.radius;
    if (a.to_principal != b.to_principal) return a.to_principal < b.to_principal;
    if (a.p.row != b.p.row) return a.p.row < b.p.row;
    return a.p.col < b.p.col;
  });

  // Greedy suppression: a maximum inside an accepted circle is a duplicate.
  std::vector<std::uint8_t> covered(static_cast<std::size_t>(w) * h, 0);
  std::vector<Maximum> accepted;
  for (const Maximum& m : maxima) {
    if (covered[static_cast<std::size_t>(m.p.row) * w + m.p.col]) continue;
    accepted.push_back(m);
    const int rad = static_cast<int>(std::ceil(m.radius));
    for (int r = std::max(0, m.p.row - rad); r <= std::min(h - 1, m.p.row + rad); ++r) {
      for (int c = std::max(0, m.p.col - rad); c <= std::min(w - 1, m.p.col + rad); ++c) {
        const double dr = r - m.p.row;
        const double dc = c - m.p.col;
        if (dr * dr + dc * dc < m.radius * m.radius) covered[static_cast<std::size_t>(r) * w + c] = 1;
      }
    }
  }

  const EdgeIndex index(edges);
  std::vector<PLZ> out;
  out.reserve(accepted.size());
  for (const Maximum& m : accepted) {
    const PointPx start = to_point(m.p);
    const std::vector<PointPx> local = index.within(start, m.radius + 1.5);
    const PointPx center = refine_center(start, local, w, h);
    const Clearance near = clearance_at(center, local, w, h);

    // nearest obstacle point on the far side of the center
    const Vec2 toward = to_vec(near.nearest - center);
    double far_d = kInf;
    PointPx far_p = center * 2.0 - near.nearest;
    auto consider = [&](PointPx e) {
      if (dot(to_vec(e - center), toward) >= 0.0) return;
      const double d = distance(e, center);
      if (d < far_d) {
        far_d = d;
        far_p = e;
      }
    };
    for (const PointPx& e : index.all()) consider(e);
    consider({-0.5, center.col});
    consider({h - 0.5, center.col});
    consider({center.row, -0.5});
    consider({center.row, w - 0.5});

    PLZ z;
    z.center_px = center;
    z.ground_offset_m = cam.ground_offset(center);
    z.diameter_px = 2.0 * near.radius;
    z.diameter_m = px_to_meters(z.diameter_px, cam);
    z.area_m2 = zone_area(z.diameter_m);
    z.edge_pair = {near.nearest, far_p};
    z.admitted = z.area_m2 >= params.min_area_m2;
    out.push_back(z);
  }
  std::stable_sort(out.begin(), out.end(), [](const PLZ& a, const PLZ& b) { return a.area_m2 > b.area_m2; });
  for (std::size_t i = 0; i < out.size(); ++i) out[i].id = static_cast<int>(i);
  return out;
}

std::vector<PLZ> detect_plz(const EdgeMap& edges, const CameraModel& cam, double min_area_m2) {
  DetectParams params;
  params.min_area_m2 = min_area_m2;
  std::vector<PLZ> all = detect_candidates(edges, cam, params);
  std::vector<PLZ> admitted;
  for (const PLZ& z : all) {
    if (z.admitted) admitted.push_back(z);
  }
  return admitted;
}

EdgeAnalysis analyze_edges(const EdgeMap& edges, const CameraModel& cam, const DetectParams& params) {
  EdgeAnalysis a;
  a.contours = extract_contours(edges);
  a.polygons = cluster_contours(a.contours, params.cluster_radius_px);
  a.candidates = detect_candidates(edges, cam, params);
  for (PLZ& z : a.candidates) {
    if (z.admitted && inside_any_polygon(z.center_px, a.polygons)) z.admitted = false;
  }
  return a;
}

bool inside_any_polygon(PointPx p, std::span<const ObstaclePolygon> polygons) {
  const Vec2 q{p.col, p.row};
  for (const ObstaclePolygon& poly : polygons) {
    if (poly.hull.size() < 3) continue;
    std::vector<Vec2> ring;
    ring.reserve(poly.hull.size());
    for (const PointPx& h : poly.hull) ring.push_back({h.col, h.row});
    if (point_in_polygon(q, ring)) return true;
  }
  return false;
}

}  // namespace landing::plz
