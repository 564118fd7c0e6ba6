#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "osmbc/geometry.hpp"

namespace osmbc {

/// Static R-tree over (id, bbox) entries, bulk-loaded with Sort-Tile-Recursive
/// packing. Immutable after construction and safe to share between threads.
///
/// query() returns candidates by bounding box; callers refine with intersects().
class SpatialIndex {
 public:
  struct Entry {
    std::size_t id;
    BBox box;
  };

  SpatialIndex() = default;
  explicit SpatialIndex(std::vector<Entry> entries, std::size_t node_capacity = 16);

  static SpatialIndex build(std::span<const std::pair<std::size_t, Polygon>> entries);

  /// Ids of every entry whose box intersects `box` (closed set), ascending, unique.
  std::vector<std::size_t> query(const BBox& box) const;

  std::size_t size() const noexcept { return ids_.size(); }
  bool empty() const noexcept { return ids_.empty(); }

 private:
  // Level 0 holds the entry boxes; level k+1 holds one box per group of
  // `capacity_` consecutive level-k boxes. The last level is the root's children.
  struct Level {
    std::vector<double> min_lon, min_lat, max_lon, max_lat;
    std::size_t size() const noexcept { return min_lon.size(); }
    void push(const BBox& b);
  };

  std::size_t capacity_ = 16;
  std::vector<Level> levels_;
  std::vector<std::size_t> ids_;
};

}  // namespace osmbc
