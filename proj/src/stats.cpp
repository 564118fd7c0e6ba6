#include "osmbc/stats.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "osmbc/error.hpp"

namespace osmbc {

namespace {

constexpr Category kCategories[] = {Category::Metropolitan, Category::Micropolitan,
                                    Category::Other};

std::string fixed(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string optional_fixed(const std::optional<double>& v) { return v ? fixed(*v) : ""; }

}  // namespace

bool is_annotated(Stage s) noexcept { return s != Stage::ResidentialUnknownTag; }

RegionStats annotation_stats(std::string region, Category category,
                             std::span<const ClassifiedFootprint> rows) {
  RegionStats st;
  st.region = std::move(region);
  st.category = category;
  st.n_buildings = rows.size();
  st.n_annotated = static_cast<std::size_t>(std::count_if(
      rows.begin(), rows.end(), [](const ClassifiedFootprint& r) { return is_annotated(r.stage); }));
  if (st.n_buildings > 0) {
    st.untagged_fraction = 1.0 - static_cast<double>(st.n_annotated) / static_cast<double>(st.n_buildings);
  }
  return st;
}

double Histogram::upper(std::size_t bin) const noexcept {
  return bin + 1 == counts.size() ? 1.0 : static_cast<double>(bin + 1) * bin_width;
}

StatsSummary aggregate(std::span<const RegionStats> stats, double bin_width) {
  if (!(bin_width > 0.0 && bin_width <= 1.0)) {
    throw ConfigError("histogram bin width must be in (0, 1], got " + fixed(bin_width));
  }
  StatsSummary out;
  out.histogram.bin_width = bin_width;
  const auto bins = static_cast<std::size_t>(std::max(1.0, std::ceil(1.0 / bin_width - 1e-9)));
  out.histogram.counts.assign(bins, {0, 0, 0});

  for (std::size_t c = 0; c < 3; ++c) {
    CategorySummary s;
    s.category = kCategories[c];
    std::vector<double> fractions;
    std::size_t untagged = 0;
    for (const RegionStats& r : stats) {
      if (r.category != s.category) continue;
      ++s.regions;
      if (!r.untagged_fraction) {
        ++s.empty_regions;
        continue;
      }
      s.n_buildings += r.n_buildings;
      untagged += r.n_buildings - r.n_annotated;
      fractions.push_back(*r.untagged_fraction);
      const double f = std::clamp(*r.untagged_fraction, 0.0, 1.0);
      const auto bin = std::min(static_cast<std::size_t>(std::floor(f / bin_width + 1e-9)), bins - 1);
      ++out.histogram.counts[bin][c];
    }
    if (s.regions == 0) continue;
    std::sort(fractions.begin(), fractions.end());
    if (!fractions.empty()) {
      s.mean_untagged = std::accumulate(fractions.begin(), fractions.end(), 0.0) /
                        static_cast<double>(fractions.size());
      s.weighted_mean_untagged =
          static_cast<double>(untagged) / static_cast<double>(s.n_buildings);
    }
    out.categories.push_back(s);
  }
  return out;
}

std::string region_stats_csv(std::span<const RegionStats> stats) {
  std::string out = "region,category,n_buildings,untagged_fraction\n";
  for (const RegionStats& r : stats) {
    out += csv_field(r.region) + "," + std::string(to_string(r.category)) + "," +
           std::to_string(r.n_buildings) + "," + optional_fixed(r.untagged_fraction) + "\n";
  }
  return out;
}

std::string category_summary_csv(const StatsSummary& summary) {
  std::string out =
      "category,regions,empty_regions,n_buildings,mean_untagged_fraction,"
      "weighted_mean_untagged_fraction\n";
  for (const CategorySummary& s : summary.categories) {
    out += std::string(to_string(s.category)) + "," + std::to_string(s.regions) + "," +
           std::to_string(s.empty_regions) + "," + std::to_string(s.n_buildings) + "," +
           optional_fixed(s.mean_untagged) + "," + optional_fixed(s.weighted_mean_untagged) + "\n";
  }
  return out;
}

std::string histogram_csv(const Histogram& histogram) {
  std::string out = "bin_lower,bin_upper,metropolitan,micropolitan,other,total\n";
  for (std::size_t b = 0; b < histogram.bins(); ++b) {
    const auto& c = histogram.counts[b];
    out += fixed(histogram.lower(b), 4) + "," + fixed(histogram.upper(b), 4) + "," +
           std::to_string(c[0]) + "," + std::to_string(c[1]) + "," + std::to_string(c[2]) + "," +
           std::to_string(c[0] + c[1] + c[2]) + "\n";
  }
  return out;
}

}  // namespace osmbc
