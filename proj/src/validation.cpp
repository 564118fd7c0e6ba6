#include "osmbc/validation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>

#include "json.hpp"
#include "osmbc/error.hpp"
#include "presets.hpp"

namespace osmbc {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string_view to_string(TruthLabel l) noexcept {
  switch (l) {
    case TruthLabel::Res: return "RES";
    case TruthLabel::NonRes: return "NON_RES";
    case TruthLabel::NA: return "NA";
  }
  return "NA";
}

std::optional<TruthLabel> truth_label_from_string(std::string_view s) noexcept {
  if (s == "RES") return TruthLabel::Res;
  if (s == "NON_RES") return TruthLabel::NonRes;
  if (s == "NA") return TruthLabel::NA;
  return std::nullopt;
}

TruthMapping load_mapping(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("mapping is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("$: mapping must be a JSON object");
  static const std::set<std::string> kFields = {"name", "source_column", "alt_columns", "entries"};
  for (const auto& [key, value] : doc.items()) {
    if (!kFields.contains(key)) throw ConfigError(key + ": unknown field");
  }

  TruthMapping m;
  if (doc.contains("name")) {
    if (!doc["name"].is_string()) throw ConfigError("name: expected a string");
    m.name = doc["name"].get<std::string>();
  }
  if (!doc.contains("source_column") || !doc["source_column"].is_string() ||
      doc["source_column"].get<std::string>().empty()) {
    throw ConfigError("source_column: expected a non-empty string");
  }
  m.source_column = doc["source_column"].get<std::string>();
  if (doc.contains("alt_columns")) {
    const json& alt = doc["alt_columns"];
    if (!alt.is_array()) throw ConfigError("alt_columns: expected an array of strings");
    for (std::size_t i = 0; i < alt.size(); ++i) {
      if (!alt[i].is_string()) {
        throw ConfigError("alt_columns[" + std::to_string(i) + "]: expected a string");
      }
      m.alt_columns.push_back(alt[i].get<std::string>());
    }
  }
  if (!doc.contains("entries") || !doc["entries"].is_object()) {
    throw ConfigError("entries: expected an object");
  }
  for (const auto& [raw, label] : doc["entries"].items()) {
    const auto parsed = label.is_string() ? truth_label_from_string(label.get<std::string>())
                                          : std::nullopt;
    if (!parsed) throw ConfigError("entries." + raw + ": expected \"RES\", \"NON_RES\" or \"NA\"");
    m.entries.emplace(raw, *parsed);
  }
  return m;
}

std::vector<std::string> mapping_presets() {
  std::vector<std::string> names;
  for (const auto& [name, body] : detail::embedded_presets()) names.emplace_back(name);
  return names;
}

TruthMapping resolve_mapping(const std::string& name_or_path) {
  for (const auto& [name, body] : detail::embedded_presets()) {
    if (name == name_or_path) return load_mapping(body);
  }
  std::string bytes;
  try {
    bytes = read_file_bytes(name_or_path);
  } catch (const Error&) {
    std::string known;
    for (const std::string& n : mapping_presets()) known += (known.empty() ? "" : ", ") + n;
    throw ConfigError("\"" + name_or_path + "\" is neither a mapping preset (" + known +
                      ") nor a readable file");
  }
  return load_mapping(bytes);
}

std::string raw_label(const Feature& f, const TruthMapping& mapping) {
  if (const auto it = f.tags.find(mapping.source_column); it != f.tags.end()) return it->second;
  for (const std::string& col : mapping.alt_columns) {
    if (const auto it = f.tags.find(col); it != f.tags.end()) return it->second;
  }
  return "None";
}

TruthLabel map_label(const std::string& raw, const TruthMapping& mapping) {
  if (const auto it = mapping.entries.find(raw); it != mapping.entries.end()) return it->second;
  const auto first = raw.find_first_not_of(" \t");
  if (first != std::string::npos) {
    const std::string trimmed = raw.substr(first, raw.find_last_not_of(" \t") - first + 1);
    if (const auto it = mapping.entries.find(trimmed); it != mapping.entries.end()) {
      return it->second;
    }
  }
  throw MappingError(raw);
}

MappedTruth map_truth(const FeatureCollection& raw, const TruthMapping& mapping) {
  MappedTruth out;
  for (const Feature& f : raw.features) {
    std::string label = raw_label(f, mapping);
    const TruthLabel mapped = map_label(label, mapping);
    if (!f.geometry.valid()) {
      ++out.invalid_geometry;
      continue;
    }
    out.polygons.push_back({f.id, f.geometry, mapped, std::move(label)});
  }
  return out;
}

TruthIndex::TruthIndex(std::vector<GroundTruthPolygon> polygons) : polygons_(std::move(polygons)) {
  std::vector<SpatialIndex::Entry> entries;
  std::vector<Point> vertices;
  for (std::size_t i = 0; i < polygons_.size(); ++i) {
    const Polygon& g = polygons_[i].geometry;
    if (!g.valid()) continue;
    entries.push_back({i, g.bbox()});
    vertices.insert(vertices.end(), g.outer().begin(), g.outer().end());
  }
  index_ = SpatialIndex(std::move(entries));
  try {
    if (!vertices.empty()) hull_ = convex_hull(vertices);
  } catch (const GeometryError&) {
    hull_.reset();
  }
}

bool TruthIndex::in_validation_area(const Feature& building) const {
  if (!hull_) return true;
  const Polygon& b = building.geometry;
  return hull_->bbox().intersects(b.bbox()) && intersects(*hull_, b);
}

TruthAssignment TruthIndex::assign(const Feature& building) const {
  TruthAssignment out;
  const Polygon& b = building.geometry;
  if (!b.valid()) {
    out.geometry_error = true;
    return out;
  }
  double best = 0.0;
  try {
    for (const std::size_t i : index_.query(b.bbox())) {
      const GroundTruthPolygon& t = polygons_[i];
      const double area = overlap_area(b, t.geometry);
      if (area <= 0.0) continue;
      if (!out.source) {
        best = area;
        out.source = i;
        continue;
      }
      const GroundTruthPolygon& cur = polygons_[*out.source];
      if (std::abs(area - best) <= 1e-9 * std::max(area, best)) {
        out.tie = true;
        const bool t_nonres = t.label == TruthLabel::NonRes;
        const bool cur_nonres = cur.label == TruthLabel::NonRes;
        if (t_nonres != cur_nonres ? t_nonres : t.id < cur.id) {
          best = std::max(best, area);
          out.source = i;
        }
      } else if (area > best) {
        best = area;
        out.source = i;
        out.tie = false;
      }
    }
  } catch (const GeometryError&) {
    return {std::nullopt, std::nullopt, false, true};
  }
  if (out.source) out.label = polygons_[*out.source].label;
  return out;
}

std::optional<TruthLabel> assign_truth(const Feature& building, const TruthIndex& truth) {
  return truth.assign(building).label;
}

std::array<double, 3> CauseHistogram::fractions() const noexcept {
  const std::size_t n = total();
  if (n == 0) return {0.0, 0.0, 0.0};
  const double d = static_cast<double>(n);
  return {static_cast<double>(no_tags) / d, static_cast<double>(wrong_res_tag) / d,
          static_cast<double>(wrong_res_auxiliary) / d};
}

namespace {

ClassMetrics class_metrics(std::size_t tp, std::size_t fp, std::size_t fn) {
  ClassMetrics m;
  m.tp = tp;
  m.fp = fp;
  m.fn = fn;
  m.support = tp + fn;
  if (tp + fp > 0) {
    m.precision = static_cast<double>(tp) / static_cast<double>(tp + fp);
  } else {
    m.degenerate = true;
  }
  if (tp + fn > 0) {
    m.recall = static_cast<double>(tp) / static_cast<double>(tp + fn);
  } else {
    m.degenerate = true;
  }
  if (m.precision + m.recall > 0.0) {
    m.f1 = 2.0 * m.precision * m.recall / (m.precision + m.recall);
  }
  return m;
}

std::string fixed(double v, int digits) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

ordered_json class_json(const ClassMetrics& m) {
  return {{"precision", m.precision}, {"recall", m.recall},   {"f1", m.f1},
          {"support", m.support},     {"tp", m.tp},           {"fp", m.fp},
          {"fn", m.fn},               {"degenerate", m.degenerate}};
}

}  // namespace

MetricsReport compute_metrics(std::span<const LabeledPair> pairs) {
  if (pairs.empty()) throw MetricsError("no evaluated buildings");
  // confusion[truth][predicted], 0 = RES, 1 = NON_RES
  std::size_t confusion[2][2] = {{0, 0}, {0, 0}};
  for (const LabeledPair& p : pairs) {
    if (p.truth == TruthLabel::NA) throw ContractError("NA truth label passed to compute_metrics");
    ++confusion[p.truth == TruthLabel::NonRes ? 1 : 0][p.predicted == BuildingClass::NonRes ? 1 : 0];
  }
  MetricsReport r;
  r.samples = pairs.size();
  r.res = class_metrics(confusion[0][0], confusion[1][0], confusion[0][1]);
  r.non_res = class_metrics(confusion[1][1], confusion[0][1], confusion[1][0]);
  r.avg_f1 = (r.res.f1 + r.non_res.f1) / 2.0;
  return r;
}

CauseHistogram misclassification_causes(std::span<const EvaluatedRow> rows) {
  CauseHistogram h;
  for (const EvaluatedRow& e : rows) {
    if (e.truth != TruthLabel::NonRes || e.row.cls != BuildingClass::Res) continue;
    switch (e.row.stage) {
      case Stage::ResidentialUnknownTag: ++h.no_tags; break;
      case Stage::ResidentialTypes: ++h.wrong_res_tag; break;
      case Stage::ResidentialAuxiliary: ++h.wrong_res_auxiliary; break;
      default: break;
    }
  }
  return h;
}

bool is_structure(const ClassifiedFootprint& row) {
  const auto colon = row.tag_used.find(':');
  if (colon == std::string::npos) return false;
  if (normalize_value(std::string_view(row.tag_used).substr(0, colon)) != "building") return false;
  const std::string value = normalize_value(std::string_view(row.tag_used).substr(colon + 1));
  return value == "shed" || value == "garage" || value == "garages" || value == "parking";
}

std::vector<ClassifiedFootprint> filter_structures(std::vector<ClassifiedFootprint> rows) {
  std::erase_if(rows, [](const ClassifiedFootprint& r) { return is_structure(r); });
  return rows;
}

Evaluation evaluate(std::span<const ClassifiedFootprint> predictions, const TruthIndex& truth,
                    const EvaluateOptions& options) {
  Evaluation e;
  e.input = predictions.size();
  for (const ClassifiedFootprint& p : predictions) {
    if (options.exclude_structures && is_structure(p)) {
      ++e.structures_removed;
      continue;
    }
    if (!p.feature.geometry.valid()) {
      ++e.geometry_error;
      continue;
    }
    if (!truth.in_validation_area(p.feature)) {
      ++e.outside_hull;
      ++e.no_overlap;
      continue;
    }
    const TruthAssignment a = truth.assign(p.feature);
    if (a.tie) ++e.ties;
    if (a.geometry_error) {
      ++e.geometry_error;
    } else if (!a.label) {
      ++e.no_overlap;
    } else if (*a.label == TruthLabel::NA) {
      ++e.not_applicable;
    } else {
      e.rows.push_back({p, *a.label});
    }
  }
  std::vector<LabeledPair> pairs;
  pairs.reserve(e.rows.size());
  for (const EvaluatedRow& r : e.rows) pairs.push_back({r.row.cls, r.truth});
  e.metrics = compute_metrics(pairs);
  e.metrics.causes = misclassification_causes(e.rows);
  return e;
}

std::string metrics_json(const Evaluation& e) {
  const MetricsReport& m = e.metrics;
  const auto fr = m.causes.fractions();
  ordered_json doc;
  doc["samples"] = m.samples;
  doc["classes"] = {{"NON_RES", class_json(m.non_res)}, {"RES", class_json(m.res)}};
  doc["avg_f1"] = m.avg_f1;
  doc["causes"] = {{"no_tags", m.causes.no_tags},
                   {"wrong_res_tag", m.causes.wrong_res_tag},
                   {"wrong_res_auxiliary", m.causes.wrong_res_auxiliary},
                   {"fractions",
                    {{"no_tags", fr[0]}, {"wrong_res_tag", fr[1]}, {"wrong_res_auxiliary", fr[2]}}}};
  doc["exclusions"] = {{"input", e.input},
                       {"evaluated", e.rows.size()},
                       {"structures_removed", e.structures_removed},
                       {"no_overlap", e.no_overlap},
                       {"outside_hull", e.outside_hull},
                       {"not_applicable", e.not_applicable},
                       {"geometry_error", e.geometry_error},
                       {"ties", e.ties}};
  return doc.dump(2) + "\n";
}

std::string metrics_table(const MetricsReport& m) {
  char line[160];
  std::string out;
  std::snprintf(line, sizeof line, "%-16s  %9s  %6s  %8s  %13s\n", "Class", "Precision", "Recall",
                "F1-Score", "Avg. F1-Score");
  out += line;
  std::snprintf(line, sizeof line, "%-16s  %9s  %6s  %8s  %13s\n", "non-residential",
                fixed(m.non_res.precision, 2).c_str(), fixed(m.non_res.recall, 2).c_str(),
                fixed(m.non_res.f1, 2).c_str(), fixed(m.avg_f1, 2).c_str());
  out += line;
  std::snprintf(line, sizeof line, "%-16s  %9s  %6s  %8s  %13s\n", "residential",
                fixed(m.res.precision, 2).c_str(), fixed(m.res.recall, 2).c_str(),
                fixed(m.res.f1, 2).c_str(), "");
  out += line;
  return out;
}

}  // namespace osmbc
