#include "osmbc/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>

#include "osmbc/error.hpp"
#include "osmbc/kernels.hpp"

namespace osmbc {

namespace {

double orient(Point o, Point a, Point b) noexcept {
  return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
}

int sign(double v) noexcept { return (v > 0.0) - (v < 0.0); }

// Assumes p is collinear with [a, b].
bool within_segment_box(Point a, Point b, Point p) noexcept {
  return p.lon >= std::min(a.lon, b.lon) && p.lon <= std::max(a.lon, b.lon) &&
         p.lat >= std::min(a.lat, b.lat) && p.lat <= std::max(a.lat, b.lat);
}

bool segments_intersect(Point a, Point b, Point c, Point d) noexcept {
  const int d1 = sign(orient(c, d, a));
  const int d2 = sign(orient(c, d, b));
  const int d3 = sign(orient(a, b, c));
  const int d4 = sign(orient(a, b, d));
  if (d1 * d2 < 0 && d3 * d4 < 0) return true;
  if (d1 == 0 && within_segment_box(c, d, a)) return true;
  if (d2 == 0 && within_segment_box(c, d, b)) return true;
  if (d3 == 0 && within_segment_box(a, b, c)) return true;
  if (d4 == 0 && within_segment_box(a, b, d)) return true;
  return false;
}

bool point_on_ring(std::span<const Point> ring, Point p) noexcept {
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    if (orient(ring[i], ring[i + 1], p) == 0.0 && within_segment_box(ring[i], ring[i + 1], p)) {
      return true;
    }
  }
  return false;
}

void dedupe_consecutive(Ring& open) {
  open.erase(std::unique(open.begin(), open.end()), open.end());
  while (open.size() > 1 && open.front() == open.back()) open.pop_back();
}

// Removes vertices where the boundary doubles back on itself (zero-area spikes).
void drop_spikes(Ring& open) {
  bool changed = true;
  while (changed && open.size() >= 3) {
    changed = false;
    const std::size_t n = open.size();
    for (std::size_t i = 0; i < n; ++i) {
      const Point p = open[(i + n - 1) % n];
      const Point c = open[i];
      const Point q = open[(i + 1) % n];
      const double dot = (c.lon - p.lon) * (q.lon - c.lon) + (c.lat - p.lat) * (q.lat - c.lat);
      if (p == q || (orient(p, c, q) == 0.0 && dot < 0.0)) {
        open.erase(open.begin() + static_cast<std::ptrdiff_t>(i));
        dedupe_consecutive(open);
        changed = true;
        break;
      }
    }
  }
}

Ring repair_ring(Ring ring, bool counter_clockwise) {
  dedupe_consecutive(ring);
  drop_spikes(ring);
  if (ring.empty()) return ring;
  ring.push_back(ring.front());
  if (ring.size() >= 4) {
    const double a = signed_area_deg2(ring);
    if ((counter_clockwise && a < 0.0) || (!counter_clockwise && a > 0.0)) {
      std::reverse(ring.begin(), ring.end());
    }
  }
  return ring;
}

bool ring_is_simple(std::span<const Point> ring) {
  const std::size_t n = ring.size() - 1;
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  auto min_lon = [&](std::size_t i) { return std::min(ring[i].lon, ring[i + 1].lon); };
  auto max_lon = [&](std::size_t i) { return std::max(ring[i].lon, ring[i + 1].lon); };
  std::sort(order.begin(), order.end(),
            [&](std::size_t x, std::size_t y) { return min_lon(x) < min_lon(y); });
  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t i = order[k];
    for (std::size_t l = k + 1; l < n && min_lon(order[l]) <= max_lon(i); ++l) {
      const std::size_t j = order[l];
      const std::size_t lo = std::min(i, j);
      const std::size_t hi = std::max(i, j);
      if (hi - lo == 1 || (lo == 0 && hi == n - 1)) continue;
      if (segments_intersect(ring[i], ring[i + 1], ring[j], ring[j + 1])) return false;
    }
  }
  return true;
}

std::string ring_issue(std::span<const Point> ring, const char* what) {
  if (ring.size() < 4) return std::string(what) + " has fewer than 4 points";
  for (const Point& p : ring) {
    if (!std::isfinite(p.lon) || !std::isfinite(p.lat)) {
      return std::string(what) + " has non-finite coordinates";
    }
    if (p.lon < -180.0 || p.lon > 180.0 || p.lat < -90.0 || p.lat > 90.0) {
      return std::string(what) + " has coordinates out of range";
    }
  }
  if (signed_area_deg2(ring) == 0.0) return std::string(what) + " has zero area";
  if (!ring_is_simple(ring)) return std::string(what) + " is self-intersecting";
  return {};
}

bool inside_ring_closed(std::span<const Point> ring, Point p) {
  return point_on_ring(ring, p) || kernels::crossing_parity(ring, p);
}

double cos_deg(double degrees) { return std::cos(degrees * std::numbers::pi / 180.0); }

struct Seg {
  Point a;
  Point b;
  BBox box;
};

std::vector<Seg> edges_within(const Polygon& p, Point origin, const BBox& window) {
  std::vector<Seg> out;
  auto add_ring = [&](const Ring& ring) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const Point a{ring[i].lon - origin.lon, ring[i].lat - origin.lat};
      const Point b{ring[i + 1].lon - origin.lon, ring[i + 1].lat - origin.lat};
      const BBox box{std::min(a.lon, b.lon), std::min(a.lat, b.lat), std::max(a.lon, b.lon),
                     std::max(a.lat, b.lat)};
      if (box.intersects(window)) out.push_back({a, b, box});
    }
  };
  add_ring(p.outer());
  for (const Ring& h : p.holes()) add_ring(h);
  return out;
}

BBox grow(BBox b, double by) {
  return {b.min_lon - by, b.min_lat - by, b.max_lon + by, b.max_lat + by};
}

double segment_distance(const Seg& s, Point m) {
  const double dx = s.b.lon - s.a.lon;
  const double dy = s.b.lat - s.a.lat;
  const double len2 = dx * dx + dy * dy;
  double t = len2 > 0.0 ? ((m.lon - s.a.lon) * dx + (m.lat - s.a.lat) * dy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(m.lon - (s.a.lon + t * dx), m.lat - (s.a.lat + t * dy));
}

struct BoundarySums {
  double cross = 0.0;
  double my = 0.0;

  void add(Point s, Point t) {
    const double c = s.lon * t.lat - s.lat * t.lon;
    cross += c;
    my += (s.lat + t.lat) * c;
  }
};

// Adds the parts of ∂from lying inside `to` (and, if keep_shared, the parts of
// ∂from running along ∂to in the same direction) to the boundary integral.
void integrate_inside(const std::vector<Seg>& from, const std::vector<Seg>& to_edges,
                      const Polygon& to, Point origin, double tol, bool keep_shared,
                      BoundarySums& sums) {
  const BBox to_box{to.bbox().min_lon - origin.lon, to.bbox().min_lat - origin.lat,
                    to.bbox().max_lon - origin.lon, to.bbox().max_lat - origin.lat};
  const BBox to_box_tol = grow(to_box, tol);

  auto inside = [&](Point m_shifted) {
    const Point m{m_shifted.lon + origin.lon, m_shifted.lat + origin.lat};
    bool odd = kernels::crossing_parity(to.outer(), m);
    for (const Ring& h : to.holes()) odd = odd != kernels::crossing_parity(h, m);
    return odd;
  };

  std::vector<double> ts;
  for (const Seg& e : from) {
    const double dx = e.b.lon - e.a.lon;
    const double dy = e.b.lat - e.a.lat;
    const double len2 = dx * dx + dy * dy;
    const double len = std::sqrt(len2);
    ts.assign({0.0, 1.0});
    const BBox e_box = grow(e.box, tol);
    for (const Seg& f : to_edges) {
      if (!f.box.intersects(e_box)) continue;
      const double rx = f.b.lon - f.a.lon;
      const double ry = f.b.lat - f.a.lat;
      const double wx = f.a.lon - e.a.lon;
      const double wy = f.a.lat - e.a.lat;
      const double denom = dx * ry - dy * rx;
      const double rlen = std::hypot(rx, ry);
      if (std::abs(denom) > 1e-12 * len * rlen) {
        const double t = (wx * ry - wy * rx) / denom;
        const double u = (wx * dy - wy * dx) / denom;
        constexpr double eps = 1e-12;
        if (t >= -eps && t <= 1.0 + eps && u >= -eps && u <= 1.0 + eps) {
          ts.push_back(std::clamp(t, 0.0, 1.0));
        }
      } else if (std::abs(wx * dy - wy * dx) <= tol * len) {
        const double t0 = (wx * dx + wy * dy) / len2;
        const double t1 = ((f.b.lon - e.a.lon) * dx + (f.b.lat - e.a.lat) * dy) / len2;
        if (t0 > 0.0 && t0 < 1.0) ts.push_back(t0);
        if (t1 > 0.0 && t1 < 1.0) ts.push_back(t1);
      }
    }
    std::sort(ts.begin(), ts.end());
    for (std::size_t k = 0; k + 1 < ts.size(); ++k) {
      const double t0 = ts[k];
      const double t1 = ts[k + 1];
      if (t1 - t0 <= 1e-12) continue;
      const Point s = t0 == 0.0 ? e.a : Point{e.a.lon + dx * t0, e.a.lat + dy * t0};
      const Point t = t1 == 1.0 ? e.b : Point{e.a.lon + dx * t1, e.a.lat + dy * t1};
      const double tm = 0.5 * (t0 + t1);
      const Point m{e.a.lon + dx * tm, e.a.lat + dy * tm};
      if (!to_box_tol.contains(m)) continue;

      bool on_boundary = false;
      bool same_direction = false;
      for (const Seg& f : to_edges) {
        if (!grow(f.box, tol).contains(m)) continue;
        if (segment_distance(f, m) <= tol) {
          on_boundary = true;
          same_direction = dx * (f.b.lon - f.a.lon) + dy * (f.b.lat - f.a.lat) > 0.0;
          break;
        }
      }
      if (on_boundary) {
        if (keep_shared && same_direction) sums.add(s, t);
      } else if (inside(m)) {
        sums.add(s, t);
      }
    }
  }
}

}  // namespace

BBox BBox::empty() {
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {inf, inf, -inf, -inf};
}

BBox BBox::of(std::span<const Point> points) {
  BBox b = empty();
  for (const Point& p : points) b.expand(p);
  return b;
}

void BBox::expand(Point p) noexcept {
  min_lon = std::min(min_lon, p.lon);
  min_lat = std::min(min_lat, p.lat);
  max_lon = std::max(max_lon, p.lon);
  max_lat = std::max(max_lat, p.lat);
}

void BBox::expand(const BBox& b) noexcept {
  if (b.is_empty()) return;
  min_lon = std::min(min_lon, b.min_lon);
  min_lat = std::min(min_lat, b.min_lat);
  max_lon = std::max(max_lon, b.max_lon);
  max_lat = std::max(max_lat, b.max_lat);
}

Polygon Polygon::from_rings(Ring outer, std::vector<Ring> holes) {
  Polygon p;
  p.outer_ = repair_ring(std::move(outer), true);
  for (Ring& h : holes) {
    Ring repaired = repair_ring(std::move(h), false);
    if (!repaired.empty()) p.holes_.push_back(std::move(repaired));
  }
  p.bbox_ = BBox::of(p.outer_);
  p.issue_ = ring_issue(p.outer_, "outer ring");
  if (!p.issue_.empty()) return p;
  for (const Ring& h : p.holes_) {
    p.issue_ = ring_issue(h, "hole");
    if (!p.issue_.empty()) return p;
    for (const Point& v : h) {
      if (!inside_ring_closed(p.outer_, v)) {
        p.issue_ = "hole lies outside the outer ring";
        return p;
      }
    }
  }
  return p;
}

Polygon Polygon::checked(Ring outer, std::vector<Ring> holes) {
  Polygon p = from_rings(std::move(outer), std::move(holes));
  p.require_valid();
  return p;
}

Polygon Polygon::rectangle(const BBox& box) {
  return from_rings({{box.min_lon, box.min_lat},
                     {box.max_lon, box.min_lat},
                     {box.max_lon, box.max_lat},
                     {box.min_lon, box.max_lat}});
}

void Polygon::require_valid() const {
  if (!valid()) throw GeometryError("invalid polygon: " + issue_);
}

double signed_area_deg2(std::span<const Point> ring) {
  if (ring.size() < 2) return 0.0;
  return 0.5 * kernels::ring_moments(ring, ring.front()).cross;
}

double area_deg2(const Polygon& p) {
  p.require_valid();
  const Point o{p.bbox().min_lon, p.bbox().min_lat};
  double cross = kernels::ring_moments(p.outer(), o).cross;
  for (const Ring& h : p.holes()) cross += kernels::ring_moments(h, o).cross;
  return 0.5 * cross;
}

double area_m2(const Polygon& p) {
  p.require_valid();
  const Point o{p.bbox().min_lon, p.bbox().min_lat};
  kernels::RingMoments m = kernels::ring_moments(p.outer(), o);
  for (const Ring& h : p.holes()) {
    const kernels::RingMoments hm = kernels::ring_moments(h, o);
    m.cross += hm.cross;
    m.my += hm.my;
  }
  if (m.cross <= 0.0) return 0.0;
  const double lat0 = o.lat + m.my / (3.0 * m.cross);
  return 0.5 * m.cross * cos_deg(lat0) * kMetersPerDegree * kMetersPerDegree;
}

bool contains_point(const Polygon& p, Point pt) {
  p.require_valid();
  if (!p.bbox().contains(pt)) return false;
  if (point_on_ring(p.outer(), pt)) return true;
  for (const Ring& h : p.holes()) {
    if (point_on_ring(h, pt)) return true;
  }
  bool odd = kernels::crossing_parity(p.outer(), pt);
  for (const Ring& h : p.holes()) odd = odd != kernels::crossing_parity(h, pt);
  return odd;
}

bool intersects(const Polygon& a, const Polygon& b) {
  a.require_valid();
  b.require_valid();
  if (!a.bbox().intersects(b.bbox())) return false;

  const BBox common{std::max(a.bbox().min_lon, b.bbox().min_lon),
                    std::max(a.bbox().min_lat, b.bbox().min_lat),
                    std::min(a.bbox().max_lon, b.bbox().max_lon),
                    std::min(a.bbox().max_lat, b.bbox().max_lat)};
  const Point zero{0.0, 0.0};
  const std::vector<Seg> ea = edges_within(a, zero, common);
  const std::vector<Seg> eb = edges_within(b, zero, common);
  for (const Seg& s : ea) {
    for (const Seg& t : eb) {
      if (s.box.intersects(t.box) && segments_intersect(s.a, s.b, t.a, t.b)) return true;
    }
  }
  // No boundary contact: either one contains the other or they are disjoint.
  return contains_point(b, a.outer().front()) || contains_point(a, b.outer().front());
}

double overlap_area(const Polygon& a, const Polygon& b) {
  a.require_valid();
  b.require_valid();
  if (!a.bbox().intersects(b.bbox())) return 0.0;

  const Point origin{std::min(a.bbox().min_lon, b.bbox().min_lon),
                     std::min(a.bbox().min_lat, b.bbox().min_lat)};
  BBox window{std::max(a.bbox().min_lon, b.bbox().min_lon) - origin.lon,
              std::max(a.bbox().min_lat, b.bbox().min_lat) - origin.lat,
              std::min(a.bbox().max_lon, b.bbox().max_lon) - origin.lon,
              std::min(a.bbox().max_lat, b.bbox().max_lat) - origin.lat};
  const double extent = std::max({a.bbox().width(), a.bbox().height(), b.bbox().width(),
                                  b.bbox().height(), 1e-9});
  const double tol = 1e-10 * extent;
  window = grow(window, tol);

  const std::vector<Seg> ea = edges_within(a, origin, window);
  const std::vector<Seg> eb = edges_within(b, origin, window);
  BoundarySums sums;
  integrate_inside(ea, eb, b, origin, tol, true, sums);
  integrate_inside(eb, ea, a, origin, tol, false, sums);

  if (sums.cross <= 0.0) return 0.0;
  const double lat0 = origin.lat + sums.my / (3.0 * sums.cross);
  return 0.5 * sums.cross * cos_deg(lat0) * kMetersPerDegree * kMetersPerDegree;
}

Point centroid(const Polygon& p) { return centroid(std::span<const Polygon>(&p, 1)); }

Point centroid(std::span<const Polygon> polygons) {
  if (polygons.empty()) throw GeometryError("centroid of an empty polygon set");
  BBox all = BBox::empty();
  for (const Polygon& p : polygons) {
    p.require_valid();
    all.expand(p.bbox());
  }
  const Point o{all.min_lon, all.min_lat};
  kernels::RingMoments total;
  auto accumulate = [&](const Ring& r) {
    const kernels::RingMoments m = kernels::ring_moments(r, o);
    total.cross += m.cross;
    total.mx += m.mx;
    total.my += m.my;
  };
  for (const Polygon& p : polygons) {
    accumulate(p.outer());
    for (const Ring& h : p.holes()) accumulate(h);
  }
  if (total.cross == 0.0) throw GeometryError("centroid of a zero-area polygon");
  return {o.lon + total.mx / (3.0 * total.cross), o.lat + total.my / (3.0 * total.cross)};
}

Polygon convex_hull(std::span<const Point> points) {
  std::vector<Point> pts(points.begin(), points.end());
  std::sort(pts.begin(), pts.end(), [](Point x, Point y) {
    return x.lon < y.lon || (x.lon == y.lon && x.lat < y.lat);
  });
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) throw GeometryError("convex hull needs at least 3 distinct points");

  // Andrew's monotone chain; collinear points are dropped.
  std::vector<Point> hull(2 * pts.size());
  std::size_t k = 0;
  for (const Point& p : pts) {
    while (k >= 2 && orient(hull[k - 2], hull[k - 1], p) <= 0.0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, lower = k + 1; i-- > 0;) {
    while (k >= lower && orient(hull[k - 2], hull[k - 1], pts[i]) <= 0.0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k);  // closed: last == first
  if (hull.size() < 4) throw GeometryError("convex hull of collinear points");
  return Polygon::checked(std::move(hull));
}

}  // namespace osmbc
