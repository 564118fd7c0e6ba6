#pragma once

// Hand-traced scenes shared by the module tests and the acceptance binary.

#include <cstdio>
#include <string>
#include <vector>

#include "osmbc/classifier.hpp"
#include "osmbc/validation.hpp"

namespace fixture {

using osmbc::BBox;
using osmbc::BuildingClass;
using osmbc::Feature;
using osmbc::FeatureCollection;
using osmbc::Polygon;
using osmbc::Stage;
using osmbc::TagMap;

struct Expected {
  std::string id;
  BuildingClass cls;
  Stage stage;
  std::string tag_used;
};

struct Scene {
  FeatureCollection buildings;
  FeatureCollection auxiliary;
  std::vector<Expected> expected;
};

inline BBox slot(int i) {
  const double x = -93.3 + 0.01 * i;
  return {x, 44.95, x + 0.005, 44.955};
}

inline BBox grown(const BBox& b, double d) { return {b.min_lon - d, b.min_lat - d, b.max_lon + d, b.max_lat + d}; }

/// 25 isolated buildings, each with its own auxiliary features, covering all seven stages.
inline Scene stage_scene() {
  Scene s;
  int next_aux = 0;
  auto building = [&](int i, TagMap tags, std::vector<TagMap> aux, BuildingClass cls, Stage stage,
                      std::string tag_used) {
    char id[8];
    std::snprintf(id, sizeof id, "w%02d", i);
    s.buildings.features.push_back({id, Polygon::rectangle(slot(i)), std::move(tags)});
    for (TagMap& t : aux) {
      s.auxiliary.features.push_back(
          {"r" + std::to_string(100 + next_aux++), Polygon::rectangle(grown(slot(i), 0.001)), std::move(t)});
    }
    s.expected.push_back({id, cls, stage, std::move(tag_used)});
  };
  const auto R = BuildingClass::Res;
  const auto N = BuildingClass::NonRes;

  building(1, {{"building", "house"}}, {}, R, Stage::ResidentialTypes, "building: house");
  building(2, {{"building", "Apartments"}}, {{{"amenity", "school"}}}, R, Stage::ResidentialTypes,
           "building: apartments");
  building(3, {{"building", "shed"}}, {}, R, Stage::ResidentialTypes, "building: shed");
  building(4, {{"building", "yes;garage"}}, {}, R, Stage::ResidentialTypes, "building: garage");
  building(5, {{"building", "hotel"}}, {{{"landuse", "residential"}}}, N, Stage::NonResidentialTypes,
           "building: hotel");
  building(6, {{"building", "commercial"}}, {}, N, Stage::NonResidentialTypes, "building: commercial");
  building(7, {{"building", "roof;retail"}}, {}, N, Stage::NonResidentialTypes, "building: retail");
  building(8, {{"building", "yes"}, {"office", "company"}}, {{{"landuse", "residential"}}}, N,
           Stage::NonResidentialAuxTag, "office: company");
  building(9, {{"building", "yes"}, {"amenity", "restaurant"}, {"shop", "deli"}}, {}, N,
           Stage::NonResidentialAuxTag, "amenity: restaurant");
  building(10, {{"building", "roof"}, {"amenity", " "}, {"shop", "Bakery"}}, {}, N, Stage::NonResidentialAuxTag,
           "shop: bakery");
  building(11, {{"building", "yes"}}, {{{"landuse", "residential"}}}, R, Stage::ResidentialAuxiliary,
           "landuse: residential");
  building(12, {{"building", "yes"}}, {{{"landuse", "forest"}}, {{"landuse", "residential"}}}, R,
           Stage::ResidentialAuxiliary, "landuse: residential");
  building(13, {{"building", "yes"}}, {{{"tourism", "guest_house"}}}, R, Stage::ResidentialAuxiliary,
           "tourism: guest_house");
  building(14, {{"building", "yes"}}, {{{"amenity", "school"}}, {{"landuse", "residential"}}}, R,
           Stage::ResidentialAuxiliary, "landuse: residential");
  building(15, {{"building", "yes"}}, {{{"amenity", "school"}}}, N, Stage::NonResidentialAuxiliary,
           "amenity: school");
  building(16, {{"building", "yes"}}, {{{"amenity", "courthouse"}}, {{"landuse", "commercial"}}}, N,
           Stage::NonResidentialAuxiliary, "landuse: commercial");
  building(17, {{"building", "yes"}}, {{{"amenity", "Restaurant; bar"}}}, N, Stage::NonResidentialAuxiliary,
           "amenity: bar");
  building(18, {{"building", "yes"}}, {{{"office", "company"}}}, N, Stage::NonResidentialAuxiliaryGenericTag,
           "office: company");
  building(19, {{"building", "yes"}}, {{{"landuse", "meadow"}}}, N, Stage::NonResidentialAuxiliaryGenericTag,
           "landuse: meadow");
  building(20, {{"building", "yes"}}, {{{"leisure", "park"}}}, R, Stage::ResidentialUnknownTag, "");
  building(21, {{"building", "construction"}}, {{{"landuse", "construction"}}}, R, Stage::ResidentialUnknownTag,
           "");
  building(22, {{"building", "yes"}}, {{{"amenity", "toilets"}}}, R, Stage::ResidentialUnknownTag, "");
  building(23, {{"building", "service"}}, {}, R, Stage::ResidentialUnknownTag, "");
  building(24, {{"building", ""}}, {{{"shop", "supermarket"}}}, N, Stage::NonResidentialAuxiliaryGenericTag,
           "shop: supermarket");
  building(25, {{"building", "yes"}}, {}, R, Stage::ResidentialAuxiliary, "landuse: residential");
  // touches w25 at a single corner only
  const BBox b25 = slot(25);
  s.auxiliary.features.push_back({"r900",
                                  Polygon::rectangle({b25.max_lon, b25.max_lat, b25.max_lon + 0.003, b25.max_lat + 0.003}),
                                  {{"landuse", "residential"}}});
  return s;
}

struct ValidationCase {
  std::vector<osmbc::ClassifiedFootprint> predictions;
  FeatureCollection truth;
  std::size_t structures = 0;
};

/// Ten buildings, each inside its own truth polygon labelled through the
/// "BLDGTYPE" column: 6 RES correct (two of them a shed and a garage), 1 RES
/// predicted NON_RES, 2 NON_RES correct, 1 NON_RES predicted RES.
inline ValidationCase validation_case() {
  ValidationCase v;
  auto add = [&](int i, const char* truth, Stage stage, const char* tag_used) {
    char id[8];
    std::snprintf(id, sizeof id, "w%02d", i);
    osmbc::ClassifiedFootprint row;
    row.feature = {id, Polygon::rectangle(slot(i)), {{"building", "yes"}}};
    row.stage = stage;
    row.cls = osmbc::class_of(stage);
    row.tag_used = tag_used;
    v.predictions.push_back(row);
    char tid[8];
    std::snprintf(tid, sizeof tid, "t%02d", i);
    v.truth.features.push_back({tid, Polygon::rectangle(grown(slot(i), 0.002)), {{"BLDGTYPE", truth}}});
  };
  add(1, "Residential", Stage::ResidentialTypes, "building: house");
  add(2, "Residential", Stage::ResidentialTypes, "building: shed");
  add(3, "Residential", Stage::ResidentialAuxiliary, "landuse: residential");
  add(4, "Residential", Stage::ResidentialTypes, "building: garage");
  add(5, "Residential", Stage::ResidentialUnknownTag, "");
  add(6, "Residential", Stage::ResidentialTypes, "building: apartments");
  add(7, "Residential", Stage::NonResidentialTypes, "building: commercial");
  add(8, "Commercial", Stage::NonResidentialAuxiliary, "amenity: school");
  add(9, "School", Stage::NonResidentialAuxTag, "shop: bakery");
  add(10, "Commercial", Stage::ResidentialUnknownTag, "");
  v.structures = 2;
  return v;
}

/// Three non-residential buildings predicted residential, one per cause.
inline std::vector<osmbc::EvaluatedRow> causes_case() {
  std::vector<osmbc::EvaluatedRow> rows;
  auto add = [&](const char* id, Stage stage, const char* tag_used, osmbc::TruthLabel truth) {
    osmbc::ClassifiedFootprint row;
    row.feature = {id, Polygon::rectangle(slot(static_cast<int>(rows.size()))), {{"building", "yes"}}};
    row.stage = stage;
    row.cls = osmbc::class_of(stage);
    row.tag_used = tag_used;
    rows.push_back({row, truth});
  };
  add("w1", Stage::ResidentialUnknownTag, "", osmbc::TruthLabel::NonRes);
  add("w2", Stage::ResidentialTypes, "building: house", osmbc::TruthLabel::NonRes);
  add("w3", Stage::ResidentialAuxiliary, "landuse: residential", osmbc::TruthLabel::NonRes);
  // correct or residential-truth rows never count
  add("w4", Stage::NonResidentialAuxiliary, "amenity: school", osmbc::TruthLabel::NonRes);
  add("w5", Stage::ResidentialUnknownTag, "", osmbc::TruthLabel::Res);
  add("w6", Stage::NonResidentialTypes, "building: retail", osmbc::TruthLabel::Res);
  return rows;
}

}  // namespace fixture
