#pragma once

#include <array>
#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osmbc/classifier.hpp"
#include "osmbc/osm_model.hpp"
#include "osmbc/spatial_index.hpp"

namespace osmbc {

enum class TruthLabel { Res, NonRes, NA };

std::string_view to_string(TruthLabel l) noexcept;
std::optional<TruthLabel> truth_label_from_string(std::string_view s) noexcept;

/// Translation of a ground-truth dataset's raw land-use labels.
struct TruthMapping {
  std::string name;
  /// Property holding the raw label.
  std::string source_column;
  /// Consulted in order when source_column is missing on a feature.
  std::vector<std::string> alt_columns;
  std::map<std::string, TruthLabel> entries;
};

/// JSON: {"name"?, "source_column", "alt_columns"?, "entries": {raw: "RES"|"NON_RES"|"NA"}}.
/// Throws ConfigError.
TruthMapping load_mapping(std::string_view json);
/// Names of the built-in mappings.
std::vector<std::string> mapping_presets();
/// A built-in mapping by name, else a mapping file at that path. Throws ConfigError.
TruthMapping resolve_mapping(const std::string& name_or_path);

/// Raw label of a feature: the first present column, or "None" when none is present.
std::string raw_label(const Feature& f, const TruthMapping& mapping);
/// Throws MappingError naming the label when it has no entry.
TruthLabel map_label(const std::string& raw, const TruthMapping& mapping);

struct GroundTruthPolygon {
  std::string id;
  Polygon geometry;
  TruthLabel label = TruthLabel::NA;
  std::string raw;
};

struct MappedTruth {
  /// Valid polygons only; NA rows are kept.
  std::vector<GroundTruthPolygon> polygons;
  std::size_t invalid_geometry = 0;
};

/// Maps every feature's raw label. Throws MappingError on the first unmapped label.
MappedTruth map_truth(const FeatureCollection& raw, const TruthMapping& mapping);

struct TruthAssignment {
  /// Absent when the building overlaps no truth polygon.
  std::optional<TruthLabel> label;
  /// Index into the truth polygons of the winning polygon.
  std::optional<std::size_t> source;
  /// Another polygon matched the largest overlap within tolerance.
  bool tie = false;
  bool geometry_error = false;
};

/// Truth polygons behind a spatial index, with the convex hull of all of them.
class TruthIndex {
 public:
  explicit TruthIndex(std::vector<GroundTruthPolygon> polygons);

  /// Label of the polygon with the largest overlap area (> 0). Ties within 1e-9
  /// relative go to NON_RES, then to the smallest polygon id.
  TruthAssignment assign(const Feature& building) const;
  /// False when the building provably lies outside every truth polygon's hull.
  bool in_validation_area(const Feature& building) const;

  const std::vector<GroundTruthPolygon>& polygons() const noexcept { return polygons_; }
  const std::optional<Polygon>& hull() const noexcept { return hull_; }

 private:
  std::vector<GroundTruthPolygon> polygons_;
  SpatialIndex index_;
  std::optional<Polygon> hull_;
};

std::optional<TruthLabel> assign_truth(const Feature& building, const TruthIndex& truth);

struct LabeledPair {
  BuildingClass predicted = BuildingClass::Res;
  TruthLabel truth = TruthLabel::Res;
};

struct ClassMetrics {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  /// Rows whose truth is this class.
  std::size_t support = 0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  /// Precision or recall had a zero denominator and was reported as 0.
  bool degenerate = false;
};

struct CauseHistogram {
  std::size_t no_tags = 0;
  std::size_t wrong_res_tag = 0;
  std::size_t wrong_res_auxiliary = 0;

  std::size_t total() const noexcept { return no_tags + wrong_res_tag + wrong_res_auxiliary; }
  /// Each bucket over total(); all zero when there is nothing to normalize.
  std::array<double, 3> fractions() const noexcept;
  friend bool operator==(const CauseHistogram&, const CauseHistogram&) = default;
};

struct MetricsReport {
  ClassMetrics res;
  ClassMetrics non_res;
  double avg_f1 = 0.0;
  std::size_t samples = 0;
  CauseHistogram causes;
};

/// Per-class precision, recall and F1 with each class in turn as positive.
/// Throws MetricsError on empty input and ContractError on an NA truth.
MetricsReport compute_metrics(std::span<const LabeledPair> pairs);

struct EvaluatedRow {
  ClassifiedFootprint row;
  TruthLabel truth = TruthLabel::Res;
};

/// Non-residential buildings predicted residential, bucketed by the stage that
/// resolved them. Other stages do not produce residential predictions.
CauseHistogram misclassification_causes(std::span<const EvaluatedRow> rows);

/// True for "building: shed", "building: garage", "building: garages" and
/// "building: parking" (spacing around the colon and case ignored).
bool is_structure(const ClassifiedFootprint& row);
std::vector<ClassifiedFootprint> filter_structures(std::vector<ClassifiedFootprint> rows);

struct EvaluateOptions {
  bool exclude_structures = false;
};

struct Evaluation {
  MetricsReport metrics;
  std::vector<EvaluatedRow> rows;
  std::size_t input = 0;
  std::size_t structures_removed = 0;
  std::size_t no_overlap = 0;
  /// Subset of no_overlap rejected by the hull test alone.
  std::size_t outside_hull = 0;
  std::size_t not_applicable = 0;
  std::size_t geometry_error = 0;
  std::size_t ties = 0;
};

/// Assigns truth to every prediction and computes metrics over the evaluated rows.
/// input == rows + structures_removed + no_overlap + not_applicable + geometry_error.
/// Throws MetricsError when no row can be evaluated.
Evaluation evaluate(std::span<const ClassifiedFootprint> predictions, const TruthIndex& truth,
                    const EvaluateOptions& options = {});

std::string metrics_json(const Evaluation& e);
/// Aligned table with the columns Class, Precision, Recall, F1-Score, Avg. F1-Score.
std::string metrics_table(const MetricsReport& m);

}  // namespace osmbc
