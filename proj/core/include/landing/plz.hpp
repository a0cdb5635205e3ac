#pragma once

#include <array>
#include <span>
#include <vector>

#include "landing/camera.hpp"
#include "landing/frame.hpp"

namespace landing::plz {

/// An 8-connected component of edge pixels, listed in depth-first trace
/// order starting from its top-left pixel. Along a simple curve consecutive
/// points are 8-adjacent; at branch points the trace jumps back.
struct Contour {
  std::vector<Pixel> points;
};

/// A cluster of contours whose chained point gaps stay below the cluster
/// radius, together with the convex hull of all member points.
struct ObstaclePolygon {
  std::vector<std::size_t> member_contours;
  std::vector<PointPx> hull;
};

/// Shortest distance between two polygons and the points realizing it.
struct Gap {
  double distance_px = 0.0;
  PointPx from;
  PointPx to;
};

/// A candidate landing circle.
struct PLZ {
  int id = 0;
  PointPx center_px;
  /// Ground position of the center relative to the camera nadir.
  Vec2 ground_offset_m;
  double diameter_px = 0.0;
  double diameter_m = 0.0;
  double area_m2 = 0.0;
  /// Nearest obstacle point and the nearest obstacle point on the opposite
  /// side of the center; the free span between them bounds the circle.
  std::array<PointPx, 2> edge_pair{};
  bool admitted = false;

  double radius_px() const { return diameter_px / 2.0; }
};

struct DetectParams {
  double min_area_m2 = 3.0;
  double cluster_radius_px = 30.0;
  /// Distance-transform maxima below this radius are not reported at all.
  double min_candidate_radius_px = 3.0;
};

std::vector<Contour> extract_contours(const EdgeMap& edges);

/// Transitive closure of "closest points of two contours are less than
/// radius_px apart". Cluster order follows the smallest member index.
std::vector<ObstaclePolygon> cluster_contours(std::span<const Contour> contours, double radius_px = 30.0);

/// Euclidean distance between two convex hulls (zero when they touch or
/// overlap). Throws std::invalid_argument when both arguments are the same
/// polygon.
Gap polygon_gap_px(const ObstaclePolygon& a, const ObstaclePolygon& b);

/// Ground distance spanned by d_px pixels: d_px * altitude / focal.
double px_to_meters(double d_px, const CameraModel& cam);

/// Area of a circular zone of the given diameter (pi D^2 / 4).
double zone_area(double diameter_m);

/// Square-of-diameter area (D * D). Kept only for comparison with zone_area.
double zone_area_square(double diameter_m);

/// Per-pixel distance to the nearest edge pixel center, with the frame
/// border (half a pixel outside the outermost pixel centers) acting as an
/// obstacle as well.
struct ClearanceField {
  int width = 0;
  int height = 0;
  std::vector<double> distance;
  double at(int row, int col) const { return distance[static_cast<std::size_t>(row) * width + col]; }
};

/// Exact Euclidean distance transform (Felzenszwalb-Huttenlocher) of the
/// edge bitmap combined with the border distance.
ClearanceField clearance_field(const EdgeMap& edges);

/// Every candidate circle (admitted or not), sorted by area descending.
std::vector<PLZ> detect_candidates(const EdgeMap& edges, const CameraModel& cam, const DetectParams& params = {});

/// Admitted candidates only (area_m2 >= min_area_m2), largest first.
std::vector<PLZ> detect_plz(const EdgeMap& edges, const CameraModel& cam, double min_area_m2 = 3.0);

/// Full structural analysis of one edge map.
struct EdgeAnalysis {
  std::vector<Contour> contours;
  std::vector<ObstaclePolygon> polygons;
  std::vector<PLZ> candidates;
};

/// Candidates whose center falls inside an obstacle polygon (a roof or a
/// mover's disk seen from above) lose their admission.
EdgeAnalysis analyze_edges(const EdgeMap& edges, const CameraModel& cam, const DetectParams& params = {});

bool inside_any_polygon(PointPx p, std::span<const ObstaclePolygon> polygons);

/// True when some edge pixel center lies strictly inside the circle.
bool circle_contains_edge(const EdgeMap& edges, PointPx center, double radius_px);

}  // namespace landing::plz
