#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "osmbc/geometry.hpp"

namespace osmbc {

/// OSM tags, ordered by key.
using TagMap = std::map<std::string, std::string>;

/// An areal OSM element. Ids carry an element-kind prefix ("n123", "w7",
/// "r42"); multipolygon parts get a "#k" suffix.
///
/// The geometry may be invalid (see Polygon::valid()); downstream stages
/// decide how to degrade.
struct Feature {
  std::string id;
  Polygon geometry;
  TagMap tags;
};

/// Counts of input elements that could not become features, by reason.
struct SkipReport {
  std::map<std::string, std::size_t> reasons;

  void add(const std::string& reason, std::size_t n = 1) { reasons[reason] += n; }
  void merge(const SkipReport& other);
  std::size_t total() const noexcept;
  /// One line per reason, suitable for standard error.
  std::string summary() const;
};

struct FeatureCollection {
  std::vector<Feature> features;
  SkipReport skipped;

  std::size_t size() const noexcept { return features.size(); }
  bool empty() const noexcept { return features.empty(); }
};

struct OsmParseOptions {
  /// Elements are only materialized when they carry one of these keys.
  /// Empty means any tagged element qualifies.
  std::set<std::string> relevant_keys;
  /// Side length of the square that stands in for a tagged node.
  double point_side_deg = 1e-7;
};

/// Parses an OSM XML (API 0.6) document. Closed tagged ways become polygons,
/// type=multipolygon relations are assembled from their outer/inner member
/// ways, and tagged nodes become micro-squares centred on the node.
/// Throws ParseError on malformed XML.
FeatureCollection parse_osm_xml(std::string_view bytes, const OsmParseOptions& options = {});

/// Parses a GeoJSON FeatureCollection (or a single Feature). Polygon features
/// map one-to-one; MultiPolygon parts become "<id>#<k>". Properties become tags
/// (null values dropped, non-string scalars stringified). Non-polygonal
/// features are skipped and counted. Throws ParseError on an invalid document.
FeatureCollection parse_geojson(std::string_view bytes);

/// Serializes features as a GeoJSON FeatureCollection with tags as properties.
std::string write_geojson(const FeatureCollection& fc);

/// Reads a file (or "-" for standard input) as OSM XML or GeoJSON, sniffing the
/// first non-blank character.
FeatureCollection read_features(const std::filesystem::path& path,
                                const OsmParseOptions& options = {});
std::string read_file_bytes(const std::filesystem::path& path);

struct Partition {
  FeatureCollection buildings;
  FeatureCollection auxiliary;
};

/// Buildings are the features that carry a `building` key (any value).
Partition partition(FeatureCollection fc);

/// Removes every `surface` tag.
FeatureCollection strip_surface_key(FeatureCollection fc);

}  // namespace osmbc
