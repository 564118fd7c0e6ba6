#include "osmbc/osm_model.hpp"

#include <cctype>
#include <fstream>
#include <iostream>
#include <iterator>
#include <sstream>

#include "json.hpp"
#include "geojson_detail.hpp"
#include "osmbc/error.hpp"

namespace osmbc {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

void SkipReport::merge(const SkipReport& other) {
  for (const auto& [reason, n] : other.reasons) reasons[reason] += n;
}

std::size_t SkipReport::total() const noexcept {
  std::size_t n = 0;
  for (const auto& [reason, count] : reasons) n += count;
  return n;
}

std::string SkipReport::summary() const {
  std::ostringstream os;
  os << "skipped " << total() << " element(s)";
  for (const auto& [reason, n] : reasons) os << "\n  " << reason << ": " << n;
  return os.str();
}

namespace {

Ring ring_from_json(const json& coords) {
  if (!coords.is_array()) throw ParseError("GeoJSON ring is not an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const json& pos : coords) {
    if (!pos.is_array() || pos.size() < 2 || !pos[0].is_number() || !pos[1].is_number()) {
      throw ParseError("GeoJSON position must be [lon, lat]");
    }
    ring.push_back({pos[0].get<double>(), pos[1].get<double>()});
  }
  return ring;
}

}  // namespace

Polygon detail::polygon_from_json(const json& rings) {
  if (!rings.is_array() || rings.empty()) throw ParseError("GeoJSON polygon has no rings");
  Ring outer = ring_from_json(rings[0]);
  std::vector<Ring> holes;
  for (std::size_t i = 1; i < rings.size(); ++i) holes.push_back(ring_from_json(rings[i]));
  return Polygon::from_rings(std::move(outer), std::move(holes));
}

namespace {

json ring_to_json(const Ring& ring) {
  json out = json::array();
  for (const Point& p : ring) out.push_back({p.lon, p.lat});
  return out;
}

std::string id_of(const json& feature, std::size_t index) {
  if (const auto it = feature.find("id"); it != feature.end()) {
    if (it->is_string()) return it->get<std::string>();
    if (it->is_number_integer()) return std::to_string(it->get<std::int64_t>());
    if (it->is_number()) return it->dump();
  }
  return "f" + std::to_string(index);
}

TagMap tags_of(const json& properties) {
  TagMap tags;
  if (!properties.is_object()) return tags;
  for (const auto& [key, value] : properties.items()) {
    if (value.is_null() || key.empty()) continue;
    tags.emplace(key, value.is_string() ? value.get<std::string>() : value.dump());
  }
  return tags;
}

}  // namespace

json detail::polygon_geometry_json(const Polygon& p) {
  json rings = json::array();
  rings.push_back(ring_to_json(p.outer()));
  for (const Ring& h : p.holes()) rings.push_back(ring_to_json(h));
  return {{"type", "Polygon"}, {"coordinates", std::move(rings)}};
}

FeatureCollection parse_geojson(std::string_view bytes) {
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid GeoJSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object()) throw ParseError("GeoJSON document is not an object");

  json features;
  const std::string type = doc.value("type", "");
  if (type == "FeatureCollection") {
    features = doc.value("features", json());
    if (!features.is_array()) throw ParseError("FeatureCollection has no features array");
  } else if (type == "Feature") {
    features = json::array({doc});
  } else {
    throw ParseError("expected a GeoJSON FeatureCollection or Feature, got '" + type + "'");
  }

  FeatureCollection out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    const json& f = features[i];
    if (!f.is_object() || f.value("type", "") != "Feature") {
      throw ParseError("FeatureCollection member " + std::to_string(i) + " is not a Feature");
    }
    const std::string id = id_of(f, i);
    const json geometry = f.value("geometry", json());
    const std::string gtype = geometry.is_object() ? geometry.value("type", "") : "";
    TagMap tags = tags_of(f.value("properties", json()));
    if (gtype == "Polygon") {
      out.features.push_back({id, detail::polygon_from_json(geometry.at("coordinates")), std::move(tags)});
    } else if (gtype == "MultiPolygon") {
      const json& parts = geometry.at("coordinates");
      if (!parts.is_array()) throw ParseError("MultiPolygon coordinates are not an array");
      for (std::size_t k = 0; k < parts.size(); ++k) {
        out.features.push_back({id + "#" + std::to_string(k), detail::polygon_from_json(parts[k]), tags});
      }
    } else {
      out.skipped.add("non-polygonal GeoJSON geometry" + (gtype.empty() ? "" : " (" + gtype + ")"));
    }
  }
  return out;
}

std::string write_geojson(const FeatureCollection& fc) {
  ordered_json features = ordered_json::array();
  for (const Feature& f : fc.features) {
    ordered_json feature;
    feature["type"] = "Feature";
    feature["id"] = f.id;
    feature["properties"] = f.tags;
    feature["geometry"] = detail::polygon_geometry_json(f.geometry);
    features.push_back(std::move(feature));
  }
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  doc["features"] = std::move(features);
  return doc.dump() + "\n";
}

std::string read_file_bytes(const std::filesystem::path& path) {
  if (path == "-") {
    return std::string(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

FeatureCollection read_features(const std::filesystem::path& path, const OsmParseOptions& options) {
  const std::string bytes = read_file_bytes(path);
  for (const char c : bytes) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    if (c == '<') return parse_osm_xml(bytes, options);
    if (c == '{') return parse_geojson(bytes);
    break;
  }
  throw ParseError("unrecognized input format in " + path.string() +
                   " (expected OSM XML or GeoJSON)");
}

Partition partition(FeatureCollection fc) {
  Partition p;
  p.buildings.skipped = fc.skipped;
  for (Feature& f : fc.features) {
    (f.tags.contains("building") ? p.buildings : p.auxiliary).features.push_back(std::move(f));
  }
  return p;
}

FeatureCollection strip_surface_key(FeatureCollection fc) {
  for (Feature& f : fc.features) f.tags.erase("surface");
  return fc;
}

}  // namespace osmbc
