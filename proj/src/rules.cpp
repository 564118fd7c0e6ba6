#include "osmbc/rules.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "json.hpp"
#include "osmbc/error.hpp"
#include "osmbc/osm_model.hpp"

namespace osmbc {

using ordered_json = nlohmann::ordered_json;

namespace {

const std::vector<std::string> kUnknownValues = {"yes", "service", "roof", "ruins",
                                                 "construction"};

bool is_lowercase(const std::string& s) {
  return std::none_of(s.begin(), s.end(),
                      [](unsigned char c) { return std::isupper(c) != 0; });
}

class Reader {
 public:
  explicit Reader(const ordered_json& doc) : doc_(doc) {}

  std::vector<std::string> list(const std::string& field) const {
    const auto it = doc_.find(field);
    if (it == doc_.end()) return {};
    return strings(*it, field);
  }

  OrderedValueMap map(const std::string& field) const {
    OrderedValueMap out;
    const auto it = doc_.find(field);
    if (it == doc_.end()) return out;
    if (!it->is_object()) throw ConfigError(field + ": expected an object of string arrays");
    for (const auto& [key, values] : it->items()) {
      const std::string path = field + "." + key;
      check_string(key, path + " (key)");
      out.emplace_back(key, strings(values, path));
    }
    return out;
  }

 private:
  static void check_string(const std::string& s, const std::string& path) {
    if (s.empty()) throw ConfigError(path + ": empty string");
    if (!is_lowercase(s)) throw ConfigError(path + ": \"" + s + "\" must be lowercase");
  }

  static std::vector<std::string> strings(const ordered_json& node, const std::string& path) {
    if (!node.is_array()) throw ConfigError(path + ": expected an array of strings");
    std::vector<std::string> out;
    std::set<std::string> seen;
    for (std::size_t i = 0; i < node.size(); ++i) {
      const std::string item_path = path + "[" + std::to_string(i) + "]";
      if (!node[i].is_string()) throw ConfigError(item_path + ": expected a string");
      std::string s = node[i].get<std::string>();
      check_string(s, item_path);
      if (!seen.insert(s).second) throw ConfigError(item_path + ": duplicate \"" + s + "\"");
      out.push_back(std::move(s));
    }
    return out;
  }

  const ordered_json& doc_;
};

ordered_json map_to_json(const OrderedValueMap& m) {
  ordered_json out = ordered_json::object();
  for (const auto& [key, values] : m) out[key] = values;
  return out;
}

void append_unique(std::vector<std::string>& out, const std::string& s) {
  if (std::find(out.begin(), out.end(), s) == out.end()) out.push_back(s);
}

}  // namespace

RuleSet load_rules(std::string_view config) {
  ordered_json doc;
  try {
    doc = ordered_json::parse(config.begin(), config.end());
  } catch (const ordered_json::parse_error& e) {
    throw ConfigError(std::string("rule config is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("$: rule config must be a JSON object");

  static const std::set<std::string> kFields = {
      "acc_values",  "add_keys",          "skip_by_key",    "skip_values",
      "res_aux",     "nonres_aux",        "other_nonres_keys", "unknown_values",
      "literal_supplement_lists"};
  for (const auto& [key, value] : doc.items()) {
    if (!kFields.contains(key)) throw ConfigError(key + ": unknown field");
  }

  const Reader r(doc);
  RuleSet rules;
  rules.acc_values = r.list("acc_values");
  rules.add_keys = r.list("add_keys");
  rules.skip_by_key = r.map("skip_by_key");
  rules.skip_values = r.list("skip_values");
  rules.res_aux = r.map("res_aux");
  rules.nonres_aux = r.map("nonres_aux");
  rules.other_nonres_keys = r.list("other_nonres_keys");
  rules.unknown_values = doc.contains("unknown_values") ? r.list("unknown_values") : kUnknownValues;
  if (const auto it = doc.find("literal_supplement_lists"); it != doc.end()) {
    if (!it->is_boolean()) throw ConfigError("literal_supplement_lists: expected a boolean");
    rules.literal_supplement_lists = it->get<bool>();
  }

  if (std::find(rules.acc_values.begin(), rules.acc_values.end(), "hotel") !=
      rules.acc_values.end()) {
    throw ConfigError("acc_values: \"hotel\" is not an accommodation value");
  }
  const std::set<std::string> unknown(rules.unknown_values.begin(), rules.unknown_values.end());
  if (unknown != std::set<std::string>(kUnknownValues.begin(), kUnknownValues.end())) {
    throw ConfigError(
        "unknown_values: must be exactly yes, service, roof, ruins, construction");
  }
  for (const auto& [key, values] : rules.res_aux) {
    for (const auto& [nkey, nvalues] : rules.nonres_aux) {
      if (key != nkey) continue;
      for (const std::string& v : values) {
        if (std::find(nvalues.begin(), nvalues.end(), v) != nvalues.end()) {
          throw ConfigError("res_aux." + key + ": \"" + v + "\" also listed in nonres_aux." + key);
        }
      }
    }
  }
  return rules;
}

RuleSet load_rules_file(const std::string& path) {
  std::string bytes;
  try {
    bytes = read_file_bytes(path);
  } catch (const Error& e) {
    throw ConfigError(e.what());
  }
  return load_rules(bytes);
}

std::string serialize_rules(const RuleSet& rules) {
  ordered_json doc;
  doc["literal_supplement_lists"] = rules.literal_supplement_lists;
  doc["acc_values"] = rules.acc_values;
  doc["add_keys"] = rules.add_keys;
  doc["skip_by_key"] = map_to_json(rules.skip_by_key);
  doc["skip_values"] = rules.skip_values;
  doc["res_aux"] = map_to_json(rules.res_aux);
  doc["nonres_aux"] = map_to_json(rules.nonres_aux);
  doc["other_nonres_keys"] = rules.other_nonres_keys;
  doc["unknown_values"] = rules.unknown_values;
  return doc.dump(2) + "\n";
}

RuleSet default_rules(bool literal) {
  RuleSet r;
  r.acc_values = {"apartments", "barracks",       "bungalow",       "cabin",       "detached",
                  "dormitory",  "farm",           "ger",            "house",       "houseboat",
                  "residential", "semidetached_house", "static_caravan", "stilt_house",
                  "terrace",    "tree_house",     "trullo",         "townhouse",   "townhome",
                  "boathouse",  "shed",           "garage",         "garages"};
  r.add_keys = {"amenity", "emergency", "healthcare", "landuse", "military", "office",
                "public_transport", "service", "shop", "sport", "telecom", "tourism",
                "brand", "clothes", "leisure", "cemetery"};
  r.skip_by_key = {{"landuse", {"forest"}}, {"leisure", {"park", "swimming_pool"}}};
  r.skip_values = {"construction", "driveway", "grass", "farmyard", "farmland", "nature_reserve"};
  r.res_aux = {{"landuse", {"residential"}}, {"tourism", {"apartment", "guest_house"}}};
  r.nonres_aux = {
      {"landuse",
       {"commercial", "retail", "industrial", "institutional", "education", "military", "port",
        "religious", "winter_sports", "cemetery", "grave_yard"}},
      {"amenity",
       {"courthouse", "fire_station", "police", "post_depot", "post_office", "prison",
        "ranger_station", "townhall", "college", "kindergarten", "library",
        "research_institute", "school", "university", "car_rental", "car_wash",
        "vehicle_inspection", "ferry_terminal", "fuel", "hospital", "brothel", "casino",
        "cinema", "conference_centre", "events_venue", "exhibition_centre", "love_hotel",
        "nightclub", "planetarium", "theatre", "bar", "restaurant"}}};
  r.other_nonres_keys = {"emergency", "healthcare", "landuse", "military", "office",
                         "public_transport", "service", literal ? "shopv" : "shop", "sport",
                         "telecom", "tourism", "brand", "clothes", "leisure", "cemetery"};
  r.unknown_values = kUnknownValues;
  r.literal_supplement_lists = literal;
  return r;
}

std::vector<std::string> download_keys(const RuleSet& rules) {
  std::vector<std::string> keys = {"building", "surface"};
  for (const auto& k : rules.add_keys) append_unique(keys, k);
  for (const auto& [k, v] : rules.skip_by_key) append_unique(keys, k);
  for (const auto& [k, v] : rules.res_aux) append_unique(keys, k);
  for (const auto& [k, v] : rules.nonres_aux) append_unique(keys, k);
  for (const auto& k : rules.other_nonres_keys) append_unique(keys, k);
  return keys;
}

std::string normalize_value(std::string_view value) {
  const auto first = value.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = value.find_last_not_of(" \t\r\n");
  std::string out(value.substr(first, last - first + 1));
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string> value_components(std::string_view value) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t end = std::min(value.find(';', start), value.size());
    std::string c = normalize_value(value.substr(start, end - start));
    if (!c.empty()) out.push_back(std::move(c));
    start = end + 1;
  }
  return out;
}

}  // namespace osmbc
