#include "osmbc/kernels.hpp"

namespace osmbc::kernels::scalar {

void filter_overlapping(BoxesView boxes, const BBox& query, std::uint32_t base,
                        std::vector<std::uint32_t>& out) {
  for (std::size_t i = 0; i < boxes.size; ++i) {
    if (boxes.min_lon[i] <= query.max_lon && boxes.max_lon[i] >= query.min_lon &&
        boxes.min_lat[i] <= query.max_lat && boxes.max_lat[i] >= query.min_lat) {
      out.push_back(base + static_cast<std::uint32_t>(i));
    }
  }
}

RingMoments ring_moments(std::span<const Point> ring, Point origin) {
  RingMoments m;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const double x0 = ring[i].lon - origin.lon;
    const double y0 = ring[i].lat - origin.lat;
    const double x1 = ring[i + 1].lon - origin.lon;
    const double y1 = ring[i + 1].lat - origin.lat;
    const double c = x0 * y1 - y0 * x1;
    m.cross += c;
    m.mx += (x0 + x1) * c;
    m.my += (y0 + y1) * c;
  }
  return m;
}

bool crossing_parity(std::span<const Point> ring, Point p) {
  bool odd = false;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Point a = ring[i];
    const Point b = ring[i + 1];
    if ((a.lat > p.lat) != (b.lat > p.lat) &&
        p.lon < (b.lon - a.lon) * (p.lat - a.lat) / (b.lat - a.lat) + a.lon) {
      odd = !odd;
    }
  }
  return odd;
}

}  // namespace osmbc::kernels::scalar
