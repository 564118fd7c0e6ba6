#pragma once

#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace osmbc {

/// Ordered key -> value-list map. Order is significant: rule matching scans it front to back.
using OrderedValueMap = std::vector<std::pair<std::string, std::vector<std::string>>>;

/// The rule collections that drive building classification.
///
/// Set-valued fields are kept as ordered, duplicate-free lists so a config
/// file round-trips byte-for-byte and so the first matching rule is well
/// defined. All strings are lowercase.
struct RuleSet {
  /// `building` values that denote accommodation (classified residential).
  std::vector<std::string> acc_values;
  /// Footprint keys whose presence marks a non-residential building.
  std::vector<std::string> add_keys;
  /// Auxiliary tags ignored for specific keys.
  OrderedValueMap skip_by_key;
  /// Auxiliary values ignored for every key.
  std::vector<std::string> skip_values;
  /// Auxiliary (key, value) pairs that mark a residential building.
  OrderedValueMap res_aux;
  /// Auxiliary (key, value) pairs that mark a non-residential building.
  OrderedValueMap nonres_aux;
  /// Auxiliary keys whose presence (any value) marks a non-residential building.
  std::vector<std::string> other_nonres_keys;
  /// `building` values that carry no type information.
  std::vector<std::string> unknown_values;
  /// Set when the lists reproduce the published tables verbatim, typos included.
  bool literal_supplement_lists = false;

  friend bool operator==(const RuleSet&, const RuleSet&) = default;
};

/// Parses and validates a JSON rule configuration. Throws ConfigError naming
/// the offending path on any schema or invariant violation.
RuleSet load_rules(std::string_view config);
RuleSet load_rules_file(const std::string& path);

/// Canonical JSON form; load_rules(serialize_rules(r)) == r.
std::string serialize_rules(const RuleSet& rules);

/// The shipped rule set. With literal = true the generic non-residential key
/// list keeps the published "shopv" entry instead of "shop".
RuleSet default_rules(bool literal = false);

/// Keys requested when downloading data: building, surface, then every key the
/// rules consult, in first-use order.
std::vector<std::string> download_keys(const RuleSet& rules);

/// Lowercases and trims a tag value.
std::string normalize_value(std::string_view value);
/// Splits a semicolon-delimited OSM multi-value into normalized, non-empty components.
std::vector<std::string> value_components(std::string_view value);

}  // namespace osmbc
