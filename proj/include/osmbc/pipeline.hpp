#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <string_view>
#include <vector>

#include "osmbc/classifier.hpp"
#include "osmbc/geometry.hpp"
#include "osmbc/osm_model.hpp"
#include "osmbc/rules.hpp"
#include "osmbc/spatial_index.hpp"

namespace osmbc {

enum class Category { Metropolitan, Micropolitan, Other };

std::string_view to_string(Category c) noexcept;
std::optional<Category> category_from_string(std::string_view s) noexcept;

/// A region to classify. The boundary may consist of several parts.
struct RegionSpec {
  std::vector<Polygon> boundary;
  std::optional<std::string> cbsa;
  /// Five-digit state + county FIPS code.
  std::optional<std::string> stcou;
  std::string name;
  Category category = Category::Other;
};

/// Throws ConfigError if the spec cannot name an output file or has no usable boundary.
void validate_region(const RegionSpec& spec);

/// Reads a region boundary from GeoJSON or OSM XML: every polygonal feature is a part.
std::vector<Polygon> read_boundary(const std::filesystem::path& path);

struct Tile {
  /// Row-major position in the full nx * ny grid.
  std::size_t id = 0;
  BBox box;
};

struct TileGrid {
  BBox extent;
  int nx = 1;
  int ny = 1;
  /// Tiles that intersect the boundary, in id order.
  std::vector<Tile> tiles;
};

/// Splits the boundary's bounding box into nx * ny equal tiles and keeps those
/// that intersect the boundary. Adjacent tiles share their edge coordinates
/// exactly. Throws ConfigError if nx or ny < 1.
TileGrid make_tiles(std::span<const Polygon> boundary, int nx, int ny);
TileGrid make_tiles(const Polygon& boundary, int nx, int ny);

/// Parses "NxM" (e.g. "5x5"). Throws ConfigError.
std::pair<int, int> parse_tile_spec(std::string_view text);

/// One feature per id (first occurrence wins), sorted by id. Skip reports are kept.
FeatureCollection dedup(FeatureCollection fc);

/// EPSG code of the WGS84 / UTM zone containing `c`.
int utm_epsg(Point c);

/// Supplies the features of one tile.
class TileSource {
 public:
  virtual ~TileSource() = default;
  /// Features relevant to `tile`; may include features extending beyond it.
  /// Implementations throw FetchError or ParseError and should return early once
  /// `stop` is requested.
  virtual FeatureCollection fetch(const Tile& tile, std::stop_token stop) = 0;
};

/// Serves tiles from features already in memory: a tile receives every feature
/// whose bounding box touches it.
class InMemorySource : public TileSource {
 public:
  explicit InMemorySource(FeatureCollection fc);
  FeatureCollection fetch(const Tile& tile, std::stop_token stop) override;

 private:
  FeatureCollection fc_;
  SpatialIndex index_;
};

struct AcquireOptions {
  int nx = 5;
  int ny = 5;
  /// Tiles fetched concurrently.
  unsigned jobs = 1;
  std::stop_token stop;
};

struct Acquisition {
  TileGrid grid;
  /// Features received over all tiles, duplicates included.
  std::size_t fetched = 0;
  /// Merged and deduplicated.
  FeatureCollection features;
};

/// Fetches every retained tile, merges the results in tile order and deduplicates.
/// The first failing tile (in tile order) is rethrown after the others stop.
Acquisition acquire(std::span<const Polygon> boundary, TileSource& source,
                    const AcquireOptions& options);

struct RunOptions {
  AcquireOptions acquire;
  unsigned classify_jobs = 1;
};

struct RegionResult {
  ClassificationResult classification;
  std::optional<int> epsg;
  std::size_t tiles_total = 0;
  std::size_t tiles_retained = 0;
  std::size_t fetched = 0;
  std::size_t unique = 0;
  /// Unique features dropped because they do not touch the boundary.
  std::size_t outside_boundary = 0;
  std::size_t auxiliary = 0;
  SkipReport skipped;
  std::vector<std::string> warnings;
};

/// Acquires, merges, strips `surface`, keeps features touching the boundary,
/// partitions and classifies. A region without buildings yields an empty result
/// and a warning.
RegionResult run_region(const RegionSpec& spec, TileSource& source, const RuleSet& rules,
                        const RunOptions& options = {});

/// "<out>/<category>/<CBSA>/<STCOU>_<name>.geojson"; the CBSA level and the
/// STCOU prefix are omitted when absent.
std::filesystem::path region_output_path(const std::filesystem::path& out_dir,
                                         const RegionSpec& spec);

/// Run report: counts per stage and class, untagged fraction, EPSG, tiling and skips.
std::string region_report_json(const RegionSpec& spec, const RegionResult& result);

/// Writes the classified GeoJSON and the ".report.json" beside it. Returns the GeoJSON path.
std::filesystem::path write_region(const std::filesystem::path& out_dir, const RegionSpec& spec,
                                   const RegionResult& result);

/// Writes bytes to a file, creating parent directories. Throws Error.
void write_file(const std::filesystem::path& path, std::string_view bytes);

}  // namespace osmbc
