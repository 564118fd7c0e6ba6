#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "osmbc/osm_model.hpp"
#include "osmbc/rules.hpp"

namespace osmbc {

enum class BuildingClass { Res, NonRes };

/// The pipeline step that resolved a building, in priority order. Written to
/// the `aux info` output column.
enum class Stage {
  ResidentialTypes,
  NonResidentialTypes,
  NonResidentialAuxTag,
  ResidentialAuxiliary,
  NonResidentialAuxiliary,
  NonResidentialAuxiliaryGenericTag,
  ResidentialUnknownTag,
};

inline constexpr Stage kAllStages[] = {
    Stage::ResidentialTypes,        Stage::NonResidentialTypes,
    Stage::NonResidentialAuxTag,    Stage::ResidentialAuxiliary,
    Stage::NonResidentialAuxiliary, Stage::NonResidentialAuxiliaryGenericTag,
    Stage::ResidentialUnknownTag,
};

std::string_view to_string(BuildingClass c) noexcept;
std::string_view to_string(Stage s) noexcept;
std::optional<BuildingClass> class_from_string(std::string_view s) noexcept;
std::optional<Stage> stage_from_string(std::string_view s) noexcept;
/// The class a stage implies: residential_* stages are RES, the rest NON_RES.
BuildingClass class_of(Stage s) noexcept;

struct ClassifiedFootprint {
  Feature feature;
  BuildingClass cls = BuildingClass::Res;
  /// "key: value", empty iff stage is ResidentialUnknownTag.
  std::string tag_used;
  Stage stage = Stage::ResidentialUnknownTag;
};

/// "<key>: <value>". Throws ContractError for ResidentialUnknownTag, which records no tag.
std::string tag_used_string(Stage stage, std::string_view key, std::string_view value);

/// Classifies one building footprint.
///
/// Footprint rules are tried first: accommodation `building` values, then any
/// other informative `building` value, then additional footprint keys. If none
/// applies, the tags inherited from `aux_hits` (features intersecting the
/// building) are filtered through the skip lists and matched against the
/// residential pairs, the non-residential pairs and finally the generic
/// non-residential keys. Anything left over is residential.
///
/// Hits are considered in id order; within a step the rule list order decides
/// first, then hit order. Values are matched case-insensitively and
/// semicolon-separated multi-values match on any component.
///
/// Throws ContractError if `building` has no `building` key.
ClassifiedFootprint classify_one(const Feature& building, std::span<const Feature* const> aux_hits,
                                 const RuleSet& rules);
ClassifiedFootprint classify_one(const Feature& building, std::span<const Feature> aux_hits,
                                 const RuleSet& rules);

struct ClassifyOptions {
  /// Worker threads; 0 picks the hardware concurrency.
  unsigned jobs = 1;
};

struct ClassificationResult {
  /// One row per building, ordered by feature id.
  std::vector<ClassifiedFootprint> rows;
  /// Buildings with invalid geometry, classified from their own tags only.
  std::size_t degraded_geometry = 0;
  /// Auxiliary features with invalid geometry, left out of the spatial join.
  std::size_t invalid_auxiliary = 0;
};

ClassificationResult classify_collection(const FeatureCollection& buildings,
                                         const FeatureCollection& auxiliary, const RuleSet& rules,
                                         const ClassifyOptions& options = {});

/// Output schema: GeoJSON features with properties `type`, `tag used` and
/// `aux info`, plus an optional top-level "epsg" member.
std::string write_classified_geojson(std::span<const ClassifiedFootprint> rows,
                                     std::optional<int> epsg);
/// Reads a file produced by write_classified_geojson. Throws ParseError.
std::vector<ClassifiedFootprint> read_classified_geojson(std::string_view bytes);

}  // namespace osmbc
