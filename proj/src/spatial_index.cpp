#include "osmbc/spatial_index.hpp"

#include <algorithm>
#include <cmath>

#include "osmbc/kernels.hpp"

namespace osmbc {

namespace {

kernels::BoxesView view_of(const std::vector<double>& min_lon, const std::vector<double>& min_lat,
                           const std::vector<double>& max_lon, const std::vector<double>& max_lat) {
  return {min_lon.data(), min_lat.data(), max_lon.data(), max_lat.data(), min_lon.size()};
}

double center_lon(const BBox& b) { return 0.5 * (b.min_lon + b.max_lon); }
double center_lat(const BBox& b) { return 0.5 * (b.min_lat + b.max_lat); }

}  // namespace

void SpatialIndex::Level::push(const BBox& b) {
  min_lon.push_back(b.min_lon);
  min_lat.push_back(b.min_lat);
  max_lon.push_back(b.max_lon);
  max_lat.push_back(b.max_lat);
}

SpatialIndex::SpatialIndex(std::vector<Entry> entries, std::size_t node_capacity)
    : capacity_(std::max<std::size_t>(node_capacity, 2)) {
  if (entries.empty()) return;

  // Sort-Tile-Recursive: vertical slices by x, each slice sorted by y.
  const std::size_t n = entries.size();
  const auto leaves = static_cast<double>((n + capacity_ - 1) / capacity_);
  const auto slices = static_cast<std::size_t>(std::ceil(std::sqrt(leaves)));
  const std::size_t per_slice = slices * capacity_;
  std::stable_sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
    return center_lon(a.box) < center_lon(b.box);
  });
  for (std::size_t s = 0; s < n; s += per_slice) {
    const auto first = entries.begin() + static_cast<std::ptrdiff_t>(s);
    const auto last = entries.begin() + static_cast<std::ptrdiff_t>(std::min(n, s + per_slice));
    std::stable_sort(first, last, [](const Entry& a, const Entry& b) {
      return center_lat(a.box) < center_lat(b.box);
    });
  }

  Level base;
  ids_.reserve(n);
  for (const Entry& e : entries) {
    base.push(e.box);
    ids_.push_back(e.id);
  }
  levels_.push_back(std::move(base));

  while (levels_.back().size() > capacity_) {
    const Level& below = levels_.back();
    Level above;
    for (std::size_t g = 0; g < below.size(); g += capacity_) {
      BBox b = BBox::empty();
      for (std::size_t i = g; i < std::min(below.size(), g + capacity_); ++i) {
        b.expand(BBox{below.min_lon[i], below.min_lat[i], below.max_lon[i], below.max_lat[i]});
      }
      above.push(b);
    }
    levels_.push_back(std::move(above));
  }
}

SpatialIndex SpatialIndex::build(std::span<const std::pair<std::size_t, Polygon>> entries) {
  std::vector<Entry> boxes;
  boxes.reserve(entries.size());
  for (const auto& [id, polygon] : entries) boxes.push_back({id, polygon.bbox()});
  return SpatialIndex(std::move(boxes));
}

std::vector<std::size_t> SpatialIndex::query(const BBox& box) const {
  std::vector<std::size_t> result;
  if (levels_.empty() || box.is_empty()) return result;

  std::vector<std::uint32_t> frontier;
  std::vector<std::uint32_t> next;
  const Level& top = levels_.back();
  kernels::filter_overlapping(view_of(top.min_lon, top.min_lat, top.max_lon, top.max_lat), box, 0,
                              frontier);
  for (std::size_t level = levels_.size() - 1; level > 0; --level) {
    const Level& below = levels_[level - 1];
    const kernels::BoxesView all =
        view_of(below.min_lon, below.min_lat, below.max_lon, below.max_lat);
    next.clear();
    for (const std::uint32_t node : frontier) {
      const std::size_t first = static_cast<std::size_t>(node) * capacity_;
      const std::size_t count = std::min(below.size(), first + capacity_) - first;
      kernels::filter_overlapping(all.subview(first, count), box,
                                  static_cast<std::uint32_t>(first), next);
    }
    frontier.swap(next);
  }

  result.reserve(frontier.size());
  for (const std::uint32_t i : frontier) result.push_back(ids_[i]);
  std::sort(result.begin(), result.end());
  result.erase(std::unique(result.begin(), result.end()), result.end());
  return result;
}

}  // namespace osmbc
