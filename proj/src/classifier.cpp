#include "osmbc/classifier.hpp"

#include <algorithm>
#include <atomic>
#include <map>
#include <thread>

#include "geojson_detail.hpp"
#include "json.hpp"
#include "osmbc/error.hpp"
#include "osmbc/spatial_index.hpp"

namespace osmbc {

namespace {

constexpr std::string_view kStageNames[] = {
    "residential_types",       "non_residential_types",
    "non_residential_aux_tag", "residential_auxiliary",
    "non_residential_auxiliary", "non_residential_auxiliary_generic_tag",
    "residential_unknown_tag",
};

bool contains(const std::vector<std::string>& list, std::string_view s) {
  return std::find(list.begin(), list.end(), s) != list.end();
}

const std::vector<std::string>* lookup(const OrderedValueMap& m, std::string_view key) {
  for (const auto& [k, values] : m) {
    if (k == key) return &values;
  }
  return nullptr;
}

ClassifiedFootprint resolved(const Feature& b, Stage stage, std::string_view key,
                             std::string_view value) {
  return {b, class_of(stage), tag_used_string(stage, key, value), stage};
}

// Lowercased key -> components that survive the skip lists, for one auxiliary hit.
using SurvivingTags = std::map<std::string, std::vector<std::string>>;

SurvivingTags surviving_tags(const Feature& hit, const RuleSet& rules) {
  SurvivingTags out;
  for (const auto& [raw_key, raw_value] : hit.tags) {
    const std::string key = normalize_value(raw_key);
    if (key.empty()) continue;
    const std::vector<std::string>* skipped_for_key = lookup(rules.skip_by_key, key);
    for (std::string& c : value_components(raw_value)) {
      if (skipped_for_key != nullptr && contains(*skipped_for_key, c)) continue;
      if (contains(rules.skip_values, c)) continue;
      out[key].push_back(std::move(c));
    }
  }
  return out;
}

std::optional<ClassifiedFootprint> resolve_from_footprint(const Feature& b, const RuleSet& rules) {
  const auto building = b.tags.find("building");
  if (building == b.tags.end()) {
    throw ContractError("feature " + b.id + " has no building key");
  }
  std::vector<std::string> values = value_components(building->second);
  if (values.empty()) values.emplace_back("yes");

  for (const std::string& v : values) {
    if (contains(rules.acc_values, v)) return resolved(b, Stage::ResidentialTypes, "building", v);
  }
  for (const std::string& v : values) {
    if (!contains(rules.unknown_values, v)) {
      return resolved(b, Stage::NonResidentialTypes, "building", v);
    }
  }

  std::map<std::string, std::vector<std::string>> own;
  for (const auto& [k, v] : b.tags) {
    std::vector<std::string>& values = own[normalize_value(k)];
    for (std::string& c : value_components(v)) values.push_back(std::move(c));
  }
  for (const std::string& key : rules.add_keys) {
    const auto it = own.find(key);
    if (it != own.end() && !it->second.empty()) {
      return resolved(b, Stage::NonResidentialAuxTag, key, it->second.front());
    }
  }
  return std::nullopt;
}

ClassifiedFootprint resolve_from_auxiliary(const Feature& b,
                                           std::span<const Feature* const> aux_hits,
                                           const RuleSet& rules) {
  std::vector<const Feature*> hits(aux_hits.begin(), aux_hits.end());
  std::stable_sort(hits.begin(), hits.end(),
                   [](const Feature* x, const Feature* y) { return x->id < y->id; });
  std::vector<SurvivingTags> tags;
  tags.reserve(hits.size());
  for (const Feature* h : hits) tags.push_back(surviving_tags(*h, rules));

  auto has_pair = [&](const SurvivingTags& t, const std::string& key, const std::string& value) {
    const auto it = t.find(key);
    return it != t.end() && contains(it->second, value);
  };
  auto match_pairs = [&](const OrderedValueMap& pairs, Stage stage)
      -> std::optional<ClassifiedFootprint> {
    for (const auto& [key, values] : pairs) {
      for (const std::string& value : values) {
        for (const SurvivingTags& t : tags) {
          if (has_pair(t, key, value)) return resolved(b, stage, key, value);
        }
      }
    }
    return std::nullopt;
  };

  if (auto r = match_pairs(rules.res_aux, Stage::ResidentialAuxiliary)) return std::move(*r);
  if (auto r = match_pairs(rules.nonres_aux, Stage::NonResidentialAuxiliary)) return std::move(*r);
  for (const std::string& key : rules.other_nonres_keys) {
    for (const SurvivingTags& t : tags) {
      const auto it = t.find(key);
      if (it != t.end()) {
        return resolved(b, Stage::NonResidentialAuxiliaryGenericTag, key, it->second.front());
      }
    }
  }
  return {b, BuildingClass::Res, "", Stage::ResidentialUnknownTag};
}

}  // namespace

std::string_view to_string(BuildingClass c) noexcept {
  return c == BuildingClass::Res ? "RES" : "NON_RES";
}

std::string_view to_string(Stage s) noexcept { return kStageNames[static_cast<int>(s)]; }

std::optional<BuildingClass> class_from_string(std::string_view s) noexcept {
  if (s == "RES") return BuildingClass::Res;
  if (s == "NON_RES") return BuildingClass::NonRes;
  return std::nullopt;
}

std::optional<Stage> stage_from_string(std::string_view s) noexcept {
  for (const Stage st : kAllStages) {
    if (to_string(st) == s) return st;
  }
  return std::nullopt;
}

BuildingClass class_of(Stage s) noexcept {
  switch (s) {
    case Stage::ResidentialTypes:
    case Stage::ResidentialAuxiliary:
    case Stage::ResidentialUnknownTag:
      return BuildingClass::Res;
    default:
      return BuildingClass::NonRes;
  }
}

std::string tag_used_string(Stage stage, std::string_view key, std::string_view value) {
  if (stage == Stage::ResidentialUnknownTag) {
    throw ContractError("residential_unknown_tag records no tag");
  }
  std::string out;
  out.reserve(key.size() + value.size() + 2);
  out.append(key).append(": ").append(value);
  return out;
}

ClassifiedFootprint classify_one(const Feature& building, std::span<const Feature* const> aux_hits,
                                 const RuleSet& rules) {
  if (auto r = resolve_from_footprint(building, rules)) return std::move(*r);
  return resolve_from_auxiliary(building, aux_hits, rules);
}

ClassifiedFootprint classify_one(const Feature& building, std::span<const Feature> aux_hits,
                                 const RuleSet& rules) {
  std::vector<const Feature*> ptrs;
  ptrs.reserve(aux_hits.size());
  for (const Feature& f : aux_hits) ptrs.push_back(&f);
  return classify_one(building, ptrs, rules);
}

ClassificationResult classify_collection(const FeatureCollection& buildings,
                                         const FeatureCollection& auxiliary, const RuleSet& rules,
                                         const ClassifyOptions& options) {
  ClassificationResult result;

  std::vector<SpatialIndex::Entry> entries;
  for (std::size_t i = 0; i < auxiliary.features.size(); ++i) {
    const Polygon& g = auxiliary.features[i].geometry;
    if (g.valid()) {
      entries.push_back({i, g.bbox()});
    } else {
      ++result.invalid_auxiliary;
    }
  }
  const SpatialIndex index(std::move(entries));

  std::vector<std::size_t> order(buildings.features.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return buildings.features[x].id < buildings.features[y].id;
  });

  std::vector<std::optional<ClassifiedFootprint>> rows(order.size());
  std::atomic<std::size_t> next{0};
  std::atomic<std::size_t> degraded{0};
  auto work = [&] {
    std::vector<const Feature*> hits;
    for (std::size_t k = next.fetch_add(1); k < order.size(); k = next.fetch_add(1)) {
      const Feature& b = buildings.features[order[k]];
      if (!b.geometry.valid()) degraded.fetch_add(1);
      if (auto r = resolve_from_footprint(b, rules)) {
        rows[k] = std::move(*r);
        continue;
      }
      hits.clear();
      if (b.geometry.valid()) {
        for (const std::size_t i : index.query(b.geometry.bbox())) {
          const Feature& a = auxiliary.features[i];
          if (intersects(b.geometry, a.geometry)) hits.push_back(&a);
        }
      }
      rows[k] = resolve_from_auxiliary(b, hits, rules);
    }
  };

  unsigned jobs = options.jobs == 0 ? std::max(1U, std::thread::hardware_concurrency())
                                    : options.jobs;
  jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, std::max<std::size_t>(order.size(), 1)));
  if (jobs <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
  }

  result.degraded_geometry = degraded.load();
  result.rows.reserve(rows.size());
  for (auto& r : rows) result.rows.push_back(std::move(*r));
  return result;
}

std::string write_classified_geojson(std::span<const ClassifiedFootprint> rows,
                                     std::optional<int> epsg) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json features = ordered_json::array();
  for (const ClassifiedFootprint& r : rows) {
    ordered_json f;
    f["type"] = "Feature";
    f["id"] = r.feature.id;
    f["properties"] = {{"type", to_string(r.cls)},
                       {"tag used", r.tag_used},
                       {"aux info", to_string(r.stage)}};
    f["geometry"] = detail::polygon_geometry_json(r.feature.geometry);
    features.push_back(std::move(f));
  }
  ordered_json doc;
  doc["type"] = "FeatureCollection";
  if (epsg) doc["epsg"] = *epsg;
  doc["features"] = std::move(features);
  return doc.dump() + "\n";
}

std::vector<ClassifiedFootprint> read_classified_geojson(std::string_view bytes) {
  using json = nlohmann::json;
  json doc;
  try {
    doc = json::parse(bytes.begin(), bytes.end());
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("invalid classified GeoJSON: ") + e.what(), e.byte);
  }
  if (!doc.is_object() || !doc.contains("features") || !doc["features"].is_array()) {
    throw ParseError("classified file is not a GeoJSON FeatureCollection");
  }
  std::vector<ClassifiedFootprint> rows;
  const json& features = doc["features"];
  for (std::size_t i = 0; i < features.size(); ++i) {
    const json& f = features[i];
    const std::string where = "feature " + std::to_string(i);
    const json props = f.value("properties", json::object());
    const json geometry = f.value("geometry", json());
    if (!geometry.is_object() || geometry.value("type", "") != "Polygon") {
      throw ParseError(where + ": expected Polygon geometry");
    }
    const auto cls = class_from_string(props.value("type", ""));
    const auto stage = stage_from_string(props.value("aux info", ""));
    if (!cls || !stage) throw ParseError(where + ": missing or unknown type / aux info");
    if (class_of(*stage) != *cls) throw ParseError(where + ": type contradicts aux info");

    ClassifiedFootprint row;
    row.feature.id = f.contains("id") && f["id"].is_string() ? f["id"].get<std::string>()
                                                             : "f" + std::to_string(i);
    row.feature.geometry = detail::polygon_from_json(geometry.at("coordinates"));
    row.cls = *cls;
    row.stage = *stage;
    const json tag = props.value("tag used", json());
    row.tag_used = tag.is_string() ? tag.get<std::string>() : "";
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace osmbc
