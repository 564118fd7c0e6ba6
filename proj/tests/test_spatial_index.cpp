#include <random>

#include "doctest.h"
#include "osmbc/spatial_index.hpp"

using namespace osmbc;

TEST_CASE("spatial index: spec examples") {
  const SpatialIndex empty;
  CHECK(empty.query({-180, -90, 180, 90}).empty());
  CHECK(SpatialIndex(std::vector<SpatialIndex::Entry>{}).query({0, 0, 1, 1}).empty());

  const std::vector<std::pair<std::size_t, Polygon>> one = {{42, Polygon::rectangle({0, 0, 1, 1})}};
  const SpatialIndex single = SpatialIndex::build(one);
  CHECK(single.size() == 1);
  CHECK(single.query({-1, -1, 2, 2}) == std::vector<std::size_t>{42});
  CHECK(single.query({1, 1, 2, 2}) == std::vector<std::size_t>{42});
  CHECK(single.query({1.5, 1.5, 2, 2}).empty());
}

TEST_CASE("index-refined intersections equal a pairwise scan on 500 random rectangles") {
  std::mt19937_64 rng(500);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<std::pair<std::size_t, Polygon>> entries;
    for (std::size_t i = 0; i < 500; ++i) {
      const double x = u(rng), y = u(rng);
      entries.emplace_back(i * 3 + 1, Polygon::rectangle({x, y, x + u(rng) * 0.05, y + u(rng) * 0.05}));
    }
    const SpatialIndex index = SpatialIndex::build(entries);
    for (const auto& [id, poly] : entries) {
      std::vector<std::size_t> refined;
      for (const std::size_t c : index.query(poly.bbox())) {
        const auto& other = *std::find_if(entries.begin(), entries.end(), [&](const auto& e) { return e.first == c; });
        if (intersects(poly, other.second)) refined.push_back(c);
      }
      std::vector<std::size_t> brute;
      for (const auto& [oid, other] : entries) {
        if (intersects(poly, other)) brute.push_back(oid);
      }
      CHECK(refined == brute);
    }
  }
}

TEST_CASE("query results are sorted and unique for every capacity") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<SpatialIndex::Entry> entries;
  for (std::size_t i = 0; i < 300; ++i) {
    const double x = u(rng), y = u(rng);
    entries.push_back({299 - i, {x, y, x + 0.1, y + 0.1}});
  }
  for (const std::size_t cap : {2, 3, 16, 64}) {
    const SpatialIndex index(entries, cap);
    for (int q = 0; q < 50; ++q) {
      const double x = u(rng), y = u(rng);
      const BBox box{x, y, x + 0.2, y + 0.05};
      std::vector<std::size_t> want;
      for (const auto& e : entries) {
        if (e.box.intersects(box)) want.push_back(e.id);
      }
      std::sort(want.begin(), want.end());
      CHECK(index.query(box) == want);
    }
  }
}
