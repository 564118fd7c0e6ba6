#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#include "doctest.h"
#include "osmbc/error.hpp"
#include "osmbc/rules.hpp"

using namespace osmbc;

namespace {

using Strings = std::vector<std::string>;

// Independent transcription of the published tag tables.
const Strings kDownloadKeys = {"building", "surface", "amenity", "emergency", "healthcare", "landuse",
                               "military", "office", "public_transport", "service", "shop", "sport",
                               "telecom", "tourism", "brand", "clothes", "leisure", "cemetery"};
const Strings kAccommodation = {"apartments", "barracks", "bungalow", "cabin", "detached", "dormitory",
                                "farm", "ger", "house", "houseboat", "residential", "semidetached_house",
                                "static_caravan", "stilt_house", "terrace", "tree_house", "trullo",
                                "townhouse", "townhome", "boathouse", "shed", "garage", "garages"};
const Strings kSkipValues = {"construction", "driveway", "grass", "farmyard", "farmland", "nature_reserve"};
const Strings kLanduseNonRes = {"commercial", "retail", "industrial", "institutional", "education", "military",
                                "port", "religious", "winter_sports", "cemetery", "grave_yard"};
const Strings kAmenityNonRes = {"courthouse", "fire_station", "police", "post_depot", "post_office", "prison",
                                "ranger_station", "townhall", "college", "kindergarten", "library",
                                "research_institute", "school", "university", "car_rental", "car_wash",
                                "vehicle_inspection", "ferry_terminal", "fuel", "hospital", "brothel", "casino",
                                "cinema", "conference_centre", "events_venue", "exhibition_centre", "love_hotel",
                                "nightclub", "planetarium", "theatre", "bar", "restaurant"};
const Strings kOtherNonResLiteral = {"emergency", "healthcare", "landuse", "military", "office",
                                     "public_transport", "service", "shopv", "sport", "telecom",
                                     "tourism", "brand", "clothes", "leisure", "cemetery"};

const Strings* values(const OrderedValueMap& m, const std::string& key) {
  for (const auto& [k, v] : m) {
    if (k == key) return &v;
  }
  return nullptr;
}

bool contains(const Strings& s, const std::string& v) { return std::find(s.begin(), s.end(), v) != s.end(); }

std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

const std::string kShipped = std::string(OSMBC_SOURCE_DIR) + "/data/default_rules.json";

}  // namespace

TEST_CASE("shipped config contains the residential building values") {
  const RuleSet r = load_rules_file(kShipped);
  for (const char* v : {"house", "shed", "garage", "garages"}) CHECK(contains(r.acc_values, v));
}

TEST_CASE("hotel in acc_values is a config error") {
  RuleSet r = default_rules();
  r.acc_values.push_back("hotel");
  CHECK_THROWS_WITH_AS(load_rules(serialize_rules(r)), doctest::Contains("acc_values"), ConfigError);
}

TEST_CASE("minimal config with empty auxiliary maps") {
  const RuleSet r = load_rules(R"({"acc_values": ["house"], "add_keys": [], "skip_by_key": {},
    "skip_values": [], "res_aux": {}, "nonres_aux": {}, "other_nonres_keys": []})");
  CHECK(r.acc_values == Strings{"house"});
  CHECK(r.res_aux.empty());
  CHECK(r.nonres_aux.empty());
  CHECK(r.unknown_values.size() == 5);
}

TEST_CASE("default rules examples") {
  const RuleSet r = default_rules();
  REQUIRE(values(r.skip_by_key, "landuse") != nullptr);
  CHECK(contains(*values(r.skip_by_key, "landuse"), "forest"));
  REQUIRE(values(r.res_aux, "landuse") != nullptr);
  CHECK(*values(r.res_aux, "landuse") == Strings{"residential"});
  REQUIRE(values(r.nonres_aux, "amenity") != nullptr);
  CHECK(values(r.nonres_aux, "amenity")->front() == "courthouse");
}

TEST_CASE("default rules match the published tables") {
  const RuleSet r = default_rules();
  CHECK(r.acc_values == kAccommodation);
  CHECK(r.add_keys == Strings(kDownloadKeys.begin() + 2, kDownloadKeys.end()));
  CHECK(r.skip_by_key == OrderedValueMap{{"landuse", {"forest"}}, {"leisure", {"park", "swimming_pool"}}});
  CHECK(r.skip_values == kSkipValues);
  CHECK(r.res_aux == OrderedValueMap{{"landuse", {"residential"}}, {"tourism", {"apartment", "guest_house"}}});
  CHECK(r.nonres_aux == OrderedValueMap{{"landuse", kLanduseNonRes}, {"amenity", kAmenityNonRes}});
  Strings other = kOtherNonResLiteral;
  std::replace(other.begin(), other.end(), std::string("shopv"), std::string("shop"));
  CHECK(r.other_nonres_keys == other);
  CHECK(std::set<std::string>(r.unknown_values.begin(), r.unknown_values.end()) ==
        std::set<std::string>{"yes", "service", "roof", "ruins", "construction"});
  CHECK_FALSE(r.literal_supplement_lists);

  const RuleSet lit = default_rules(true);
  CHECK(lit.literal_supplement_lists);
  CHECK(lit.other_nonres_keys == kOtherNonResLiteral);
}

TEST_CASE("shipped file is the canonical serialization of the defaults") {
  const std::string bytes = read(kShipped);
  CHECK(bytes == serialize_rules(default_rules()));
  CHECK(load_rules(bytes) == default_rules());
}

TEST_CASE("round trip") {
  for (const bool literal : {false, true}) {
    const RuleSet r = default_rules(literal);
    CHECK(load_rules(serialize_rules(r)) == r);
    CHECK(serialize_rules(load_rules(serialize_rules(r))) == serialize_rules(r));
  }
}

TEST_CASE("every consulted key is downloaded") {
  for (const bool literal : {false, true}) {
    const RuleSet r = default_rules(literal);
    const Strings keys = download_keys(r);
    CHECK(keys[0] == "building");
    CHECK(keys[1] == "surface");
    for (const auto& [k, v] : r.res_aux) CHECK(contains(keys, k));
    for (const auto& [k, v] : r.nonres_aux) CHECK(contains(keys, k));
    for (const auto& [k, v] : r.skip_by_key) CHECK(contains(keys, k));
    for (const auto& k : r.other_nonres_keys) CHECK(contains(keys, k));
    for (const auto& k : r.add_keys) CHECK(contains(keys, k));
    CHECK(std::set<std::string>(keys.begin(), keys.end()).size() == keys.size());
  }
  CHECK(download_keys(default_rules()) == kDownloadKeys);
}

TEST_CASE("config errors name the offending path") {
  const std::string base = serialize_rules(default_rules());
  auto with = [&](const std::string& from, const std::string& to) {
    std::string s = base;
    const auto at = s.find(from);
    REQUIRE(at != std::string::npos);
    return s.replace(at, from.size(), to);
  };
  CHECK_THROWS_WITH_AS(load_rules(with("\"apartments\"", "\"Apartments\"")), doctest::Contains("acc_values[0]"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(load_rules(with("\"barracks\"", "7")), doctest::Contains("acc_values[1]"), ConfigError);
  CHECK_THROWS_WITH_AS(load_rules(with("\"forest\"", "\"forest\", \"forest\"")),
                       doctest::Contains("skip_by_key.landuse"), ConfigError);
  CHECK_THROWS_WITH_AS(load_rules(with("\"acc_values\"", "\"acc_valuez\"")), doctest::Contains("acc_valuez"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(load_rules(with("\"grave_yard\"", "\"grave_yard\", \"residential\"")),
                       doctest::Contains("res_aux.landuse"), ConfigError);
  CHECK_THROWS_WITH_AS(load_rules(with("\"ruins\"", "\"ruin\"")), doctest::Contains("unknown_values"), ConfigError);
  CHECK_THROWS_AS(load_rules("[]"), ConfigError);
  CHECK_THROWS_AS(load_rules("{"), ConfigError);
  CHECK_THROWS_AS(load_rules_file("/nonexistent/rules.json"), ConfigError);
}

TEST_CASE("value normalization") {
  CHECK(normalize_value("  House ") == "house");
  CHECK(value_components("Retail; restaurant;;") == Strings{"retail", "restaurant"});
  CHECK(value_components(" ; ").empty());
  CHECK(value_components("yes") == Strings{"yes"});
}
