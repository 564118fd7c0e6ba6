#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace osmbc {

/// Length of one degree of latitude (and of longitude at the equator), in meters.
inline constexpr double kMetersPerDegree = 111320.0;

struct Point {
  double lon = 0.0;
  double lat = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

static_assert(sizeof(Point) == 2 * sizeof(double), "Point must be two packed doubles");

/// Closed sequence of points: front() == back().
using Ring = std::vector<Point>;

struct BBox {
  double min_lon = 0.0;
  double min_lat = 0.0;
  double max_lon = 0.0;
  double max_lat = 0.0;

  static BBox empty();
  static BBox of(std::span<const Point> points);

  bool is_empty() const noexcept { return min_lon > max_lon || min_lat > max_lat; }
  void expand(Point p) noexcept;
  void expand(const BBox& b) noexcept;
  /// Closed-set overlap: touching boxes intersect.
  bool intersects(const BBox& b) const noexcept {
    return min_lon <= b.max_lon && b.min_lon <= max_lon && min_lat <= b.max_lat &&
           b.min_lat <= max_lat;
  }
  bool contains(Point p) const noexcept {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
  }
  double width() const noexcept { return max_lon - min_lon; }
  double height() const noexcept { return max_lat - min_lat; }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Polygon in WGS84 lon/lat with an outer ring and optional holes.
///
/// Construction repairs the rings (closes them, drops repeated vertices and
/// zero-area spikes, orients the outer ring counter-clockwise and holes
/// clockwise) and then records whether the result is valid. Invalid polygons
/// are still representable so that malformed input can be carried through a
/// pipeline; every geometric operation calls require_valid().
class Polygon {
 public:
  Polygon() = default;

  static Polygon from_rings(Ring outer, std::vector<Ring> holes = {});
  /// Like from_rings, but throws GeometryError if the repaired polygon is invalid.
  static Polygon checked(Ring outer, std::vector<Ring> holes = {});
  static Polygon rectangle(const BBox& box);

  const Ring& outer() const noexcept { return outer_; }
  const std::vector<Ring>& holes() const noexcept { return holes_; }
  const BBox& bbox() const noexcept { return bbox_; }
  bool valid() const noexcept { return issue_.empty(); }
  /// Empty when valid, otherwise a short description of the defect.
  const std::string& issue() const noexcept { return issue_; }
  void require_valid() const;

 private:
  Ring outer_;
  std::vector<Ring> holes_;
  BBox bbox_ = BBox::empty();
  std::string issue_ = "empty polygon";
};

/// Signed planar area of a closed ring in square degrees (positive when counter-clockwise).
double signed_area_deg2(std::span<const Point> ring);
/// Planar area in square degrees, holes subtracted.
double area_deg2(const Polygon& p);
/// Approximate area in square meters using an equirectangular frame at the centroid latitude.
double area_m2(const Polygon& p);

/// Closed-set point containment: boundary points are contained.
bool contains_point(const Polygon& p, Point pt);
/// True iff the two polygons share at least one point (interior or boundary).
bool intersects(const Polygon& a, const Polygon& b);
/// Area of a ∩ b in square meters.
///
/// The intersection is integrated along its boundary in planar degree
/// coordinates, then scaled by cos(latitude) at the intersection centroid.
/// The reference latitude depends only on the intersection region, so the
/// result is symmetric in its arguments.
double overlap_area(const Polygon& a, const Polygon& b);
/// Area-weighted centroid of the outer ring minus holes.
Point centroid(const Polygon& p);
/// Area-weighted centroid of several polygons taken together (overlaps counted twice).
Point centroid(std::span<const Polygon> polygons);
/// Minimal convex polygon containing all points, counter-clockwise.
Polygon convex_hull(std::span<const Point> points);

}  // namespace osmbc
