#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <set>

#include "landing/plz.hpp"

using namespace landing;
using namespace landing::plz;

namespace {

void ring(EdgeMap& e, int top, int left, int side) {
  for (int k = 0; k < side; ++k) {
    e.at(top, left + k) = 1;
    e.at(top + side - 1, left + k) = 1;
    e.at(top + k, left) = 1;
    e.at(top + k, left + side - 1) = 1;
  }
}

Contour segment(int row, int col0, int col1) {
  Contour c;
  for (int col = col0; col <= col1; ++col) c.points.push_back({row, col});
  return c;
}

ObstaclePolygon polygon(std::vector<PointPx> hull) {
  ObstaclePolygon p;
  p.hull = std::move(hull);
  return p;
}

// Brute-force component labelling of edge pixels (8-connectivity).
std::size_t component_count(const EdgeMap& e) {
  std::vector<int> seen(e.bits.size(), 0);
  std::size_t n = 0;
  for (int r = 0; r < e.height; ++r) {
    for (int c = 0; c < e.width; ++c) {
      if (!e.at(r, c) || seen[r * e.width + c]) continue;
      ++n;
      std::vector<Pixel> stack{{r, c}};
      seen[r * e.width + c] = 1;
      while (!stack.empty()) {
        const Pixel p = stack.back();
        stack.pop_back();
        for (int dr = -1; dr <= 1; ++dr) {
          for (int dc = -1; dc <= 1; ++dc) {
            const int rr = p.row + dr, cc = p.col + dc;
            if (!e.contains(rr, cc) || !e.at(rr, cc) || seen[rr * e.width + cc]) continue;
            seen[rr * e.width + cc] = 1;
            stack.push_back({rr, cc});
          }
        }
      }
    }
  }
  return n;
}

}  // namespace

TEST_SUITE("plz") {
  TEST_CASE("empty map has no contours") { CHECK(extract_contours(EdgeMap(20, 10)).empty()); }

  TEST_CASE("a square ring is one contour holding every ring pixel") {
    EdgeMap e(50, 40);
    ring(e, 5, 5, 20);
    const auto cs = extract_contours(e);
    REQUIRE(cs.size() == 1);
    CHECK(cs[0].points.size() == e.count());
    // Simple curve: consecutive points are 8-adjacent.
    for (std::size_t i = 1; i < cs[0].points.size(); ++i) {
      const Pixel a = cs[0].points[i - 1], b = cs[0].points[i];
      CHECK(std::max(std::abs(a.row - b.row), std::abs(a.col - b.col)) == 1);
    }
  }

  TEST_CASE("two disjoint rings give two contours with matching sizes") {
    EdgeMap e(80, 40);
    ring(e, 2, 2, 10);
    ring(e, 10, 40, 25);
    const auto cs = extract_contours(e);
    REQUIRE(cs.size() == 2);
    std::multiset<std::size_t> sizes{cs[0].points.size(), cs[1].points.size()};
    CHECK(sizes == std::multiset<std::size_t>{36, 96});
  }

  TEST_CASE("contours partition random edge sets") {
    std::mt19937 rng(4);
    std::bernoulli_distribution on(0.12);
    EdgeMap e(60, 45);
    for (auto& b : e.bits) b = on(rng);
    const auto cs = extract_contours(e);
    CHECK(cs.size() == component_count(e));
    std::set<std::pair<int, int>> all;
    std::size_t total = 0;
    for (const auto& c : cs) {
      for (Pixel p : c.points) {
        CHECK(e.at(p.row, p.col) == 1);
        all.insert({p.row, p.col});
        ++total;
      }
    }
    CHECK(total == e.count());
    CHECK(all.size() == e.count());
  }

  TEST_CASE("contours 25 px apart cluster, 35 px apart do not") {
    const std::vector<Contour> near{segment(10, 0, 20), segment(35, 0, 20)};
    CHECK(cluster_contours(near, 30.0).size() == 1);
    const std::vector<Contour> far{segment(10, 0, 20), segment(45, 0, 20)};
    CHECK(cluster_contours(far, 30.0).size() == 2);
  }

  TEST_CASE("clustering is transitive") {
    const std::vector<Contour> chain{segment(0, 0, 10), segment(20, 0, 10), segment(40, 0, 10)};
    const auto clusters = cluster_contours(chain, 30.0);
    REQUIRE(clusters.size() == 1);
    CHECK(clusters[0].member_contours == std::vector<std::size_t>{0, 1, 2});
  }

  TEST_CASE("hull holds every member point") {
    const std::vector<Contour> cs{segment(0, 0, 10), segment(20, 5, 30), segment(8, 40, 41)};
    const auto clusters = cluster_contours(cs, 30.0);
    REQUIRE(clusters.size() == 1);
    std::vector<Vec2> hull;
    for (PointPx p : clusters[0].hull) hull.push_back({p.col, p.row});
    for (const auto& c : cs) {
      for (Pixel p : c.points) {
        const Vec2 q{double(p.col), double(p.row)};
        CHECK((point_in_polygon(q, hull) || distance_to_boundary(q, hull) < 1e-9));
      }
    }
  }

  TEST_CASE("non-positive cluster radius is rejected") {
    const std::vector<Contour> cs{segment(0, 0, 3)};
    CHECK_THROWS_AS(cluster_contours(cs, 0.0), std::invalid_argument);
  }

  TEST_CASE("3-4-5 gap") {
    const auto a = polygon({{0, 0}, {0, -5}, {-5, -5}, {-5, 0}});
    const auto b = polygon({{3, 4}, {3, 9}, {8, 9}, {8, 4}});
    const Gap g = polygon_gap_px(a, b);
    CHECK(g.distance_px == doctest::Approx(5.0));
    CHECK(g.from == PointPx{0, 0});
    CHECK(g.to == PointPx{3, 4});
    CHECK(polygon_gap_px(b, a).distance_px == doctest::Approx(5.0));
  }

  TEST_CASE("touching and overlapping hulls have zero gap") {
    const auto a = polygon({{0, 0}, {0, 10}, {10, 10}, {10, 0}});
    CHECK(polygon_gap_px(a, polygon({{10, 10}, {10, 20}, {20, 20}, {20, 10}})).distance_px == 0.0);
    CHECK(polygon_gap_px(a, polygon({{2, 2}, {2, 4}, {4, 4}})).distance_px == 0.0);
  }

  TEST_CASE("the same polygon twice is rejected") {
    const auto a = polygon({{0, 0}, {0, 10}, {10, 10}});
    CHECK_THROWS_AS(polygon_gap_px(a, a), std::invalid_argument);
  }

  TEST_CASE("gap equals the exhaustive minimum over densely sampled boundaries") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(0.0, 40.0);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<Vec2> pa, pb;
      for (int i = 0; i < 10; ++i) pa.push_back({u(rng), u(rng)});
      for (int i = 0; i < 10; ++i) pb.push_back({u(rng) + 60.0, u(rng) + 10.0});
      const auto ha = convex_hull(pa), hb = convex_hull(pb);
      ObstaclePolygon a, b;
      for (Vec2 v : ha) a.hull.push_back({v.y, v.x});
      for (Vec2 v : hb) b.hull.push_back({v.y, v.x});
      double brute = 1e300;
      auto sample = [](const std::vector<Vec2>& h) {
        std::vector<Vec2> out;
        for (std::size_t i = 0; i < h.size(); ++i) {
          const Vec2 p = h[i], q = h[(i + 1) % h.size()];
          for (int k = 0; k < 400; ++k) out.push_back(p + (q - p) * (k / 400.0));
        }
        return out;
      };
      const auto sa = sample(ha), sb = sample(hb);
      for (Vec2 p : sa) {
        for (Vec2 q : hb) brute = std::min(brute, distance(p, q));
        brute = std::min(brute, distance_to_boundary(p, hb));
      }
      for (Vec2 q : sb) brute = std::min(brute, distance_to_boundary(q, ha));
      const double got = polygon_gap_px(a, b).distance_px;
      CHECK(got <= brute + 1e-9);
      CHECK(got == doctest::Approx(brute).epsilon(1e-3));
    }
  }

  TEST_CASE("pixel to meter conversion") {
    CHECK(px_to_meters(100, CameraModel{700, 7}) == doctest::Approx(1.0));
    CHECK(px_to_meters(0, CameraModel{}) == 0.0);
    const CameraModel cam{500, 10};
    CHECK(px_to_meters(3.8976 * 500 / 10, cam) == doctest::Approx(3.8976).epsilon(1e-12));
    CHECK(px_to_meters(3 * 37.5, cam) == doctest::Approx(3 * px_to_meters(37.5, cam)));
    CHECK(px_to_meters(50, cam.at_altitude(20)) == doctest::Approx(2 * px_to_meters(50, cam)));
    CHECK(px_to_meters(50, CameraModel{1000, 10}) == doctest::Approx(px_to_meters(50, cam) / 2));
    CHECK_THROWS_AS(px_to_meters(1, CameraModel{0, 10}), std::invalid_argument);
  }

  TEST_CASE("zone area is the circle area") {
    CHECK(zone_area(3.8976) == doctest::Approx(11.9312).epsilon(0.0005 / 11.9312));
    CHECK(zone_area(2.7144) == doctest::Approx(5.7868).epsilon(0.0005 / 5.7868));
    CHECK(zone_area(2.0) == doctest::Approx(std::numbers::pi));
    CHECK(zone_area_square(2.0) == 4.0);
    CHECK_THROWS_AS(zone_area(-1.0), std::invalid_argument);
  }

  TEST_CASE("empty frame gives one full-height zone") {
    const auto zones = detect_plz(EdgeMap(640, 480), CameraModel{500, 10, 640, 480});
    REQUIRE(zones.size() == 1);
    CHECK(zones[0].diameter_px == doctest::Approx(480.0));
    CHECK(zones[0].diameter_m == doctest::Approx(9.6));
    CHECK(std::abs(zones[0].center_px.row - 239.5) <= 0.5);
    CHECK(std::abs(zones[0].center_px.col - 319.5) <= 0.5);
    CHECK(zones[0].admitted);
  }

  TEST_CASE("corridor between two walls 200 px apart") {
    EdgeMap e(400, 400);
    for (int r = 0; r < 400; ++r) {
      e.at(r, 100) = 1;
      e.at(r, 300) = 1;
    }
    const CameraModel cam{500, 10, 400, 400};
    const auto zones = detect_plz(e, cam);
    REQUIRE(!zones.empty());
    CHECK(zones[0].diameter_m == doctest::Approx(4.0).epsilon(0.05 / 4.0));
    CHECK(zones[0].area_m2 == doctest::Approx(12.57).epsilon(0.3 / 12.57));
    CHECK(zones[0].center_px.col == doctest::Approx(200.0));
    const auto [p, q] = zones[0].edge_pair;
    CHECK(distance(p, q) == doctest::Approx(200.0));
  }

  TEST_CASE("zones below the minimum area are not admitted") {
    EdgeMap e(400, 400);
    for (int r = 0; r < 400; ++r) {
      e.at(r, 100) = 1;
      e.at(r, 300) = 1;
    }
    const CameraModel cam{500, 10, 400, 400};
    const double area = zone_area(4.0);
    CHECK(detect_plz(e, cam, area + 0.01).size() < detect_plz(e, cam, area - 0.01).size());
    for (const PLZ& z : detect_candidates(e, cam, {3.0, 30.0, 3.0})) CHECK(z.admitted == (z.area_m2 >= 3.0));
  }

  TEST_CASE("admitted circles are edge-free and consistent") {
    std::mt19937 rng(8);
    std::uniform_int_distribution<int> rr(0, 199), cc(0, 299);
    for (int trial = 0; trial < 5; ++trial) {
      EdgeMap e(300, 200);
      for (int i = 0; i < 40; ++i) e.at(rr(rng), cc(rng)) = 1;
      const CameraModel cam{400, 20, 300, 200};
      const auto zones = detect_plz(e, cam);
      for (std::size_t i = 0; i < zones.size(); ++i) {
        const PLZ& z = zones[i];
        CHECK(!circle_contains_edge(e, z.center_px, z.radius_px()));
        for (Pixel p : e.set_pixels()) CHECK(distance(to_point(p), z.center_px) >= z.radius_px() - 1e-9);
        CHECK(z.area_m2 / (std::numbers::pi / 4) == doctest::Approx(z.diameter_m * z.diameter_m).epsilon(1e-9));
        CHECK(z.diameter_m == doctest::Approx(px_to_meters(z.diameter_px, cam)));
        CHECK(z.area_m2 >= 3.0);
        if (i > 0) CHECK(zones[i - 1].area_m2 >= z.area_m2);
        CHECK(z.id == static_cast<int>(i));
      }
    }
  }

  TEST_CASE("a zone inside a closed outline is rejected by the structural pass") {
    EdgeMap e(400, 300);
    ring(e, 40, 40, 220);
    const CameraModel cam{500, 20, 400, 300};
    const auto raw = detect_candidates(e, cam);
    const auto analysed = analyze_edges(e, cam);
    REQUIRE(raw.size() == analysed.candidates.size());
    bool rejected_inside = false;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      const bool inside = raw[i].center_px.row > 40 && raw[i].center_px.row < 259 && raw[i].center_px.col > 40 &&
                          raw[i].center_px.col < 259;
      if (inside && raw[i].admitted) {
        CHECK(!analysed.candidates[i].admitted);
        rejected_inside = true;
      }
    }
    CHECK(rejected_inside);
  }

  TEST_CASE("camera size must match the edge map") {
    CHECK_THROWS_AS(detect_plz(EdgeMap(100, 100), CameraModel{500, 10, 640, 480}), std::invalid_argument);
  }
}
