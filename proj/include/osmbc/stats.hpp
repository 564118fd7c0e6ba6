#pragma once

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "osmbc/classifier.hpp"
#include "osmbc/pipeline.hpp"

namespace osmbc {

/// A building counts as annotated unless it fell through to the residential
/// fallback (stage residential_unknown_tag).
bool is_annotated(Stage s) noexcept;

struct RegionStats {
  std::string region;
  Category category = Category::Other;
  std::size_t n_buildings = 0;
  std::size_t n_annotated = 0;
  /// 1 - n_annotated / n_buildings; absent for a region without buildings.
  std::optional<double> untagged_fraction;
};

RegionStats annotation_stats(std::string region, Category category,
                             std::span<const ClassifiedFootprint> rows);

struct CategorySummary {
  Category category = Category::Other;
  std::size_t regions = 0;
  /// Regions without buildings; left out of both means and the histogram.
  std::size_t empty_regions = 0;
  std::size_t n_buildings = 0;
  /// Mean of the per-region fractions.
  std::optional<double> mean_untagged;
  /// Untagged buildings over all buildings of the category.
  std::optional<double> weighted_mean_untagged;
};

struct Histogram {
  double bin_width = 0.05;
  /// counts[bin][category], category in enum order. The last bin is closed on the right.
  std::vector<std::array<std::size_t, 3>> counts;

  std::size_t bins() const noexcept { return counts.size(); }
  double lower(std::size_t bin) const noexcept { return static_cast<double>(bin) * bin_width; }
  double upper(std::size_t bin) const noexcept;
};

struct StatsSummary {
  /// One entry per category present in the input, in enum order.
  std::vector<CategorySummary> categories;
  Histogram histogram;
};

/// Throws ConfigError unless 0 < bin_width <= 1.
StatsSummary aggregate(std::span<const RegionStats> stats, double bin_width = 0.05);

/// region,category,n_buildings,untagged_fraction
std::string region_stats_csv(std::span<const RegionStats> stats);
std::string category_summary_csv(const StatsSummary& summary);
std::string histogram_csv(const Histogram& histogram);

}  // namespace osmbc
