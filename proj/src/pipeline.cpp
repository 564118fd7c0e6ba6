#include "osmbc/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <fstream>
#include <thread>
#include <unordered_set>

#include "json.hpp"
#include "osmbc/error.hpp"
#include "osmbc/stats.hpp"

namespace osmbc {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::Metropolitan: return "metropolitan";
    case Category::Micropolitan: return "micropolitan";
    case Category::Other: return "other";
  }
  return "other";
}

std::optional<Category> category_from_string(std::string_view s) noexcept {
  for (const Category c : {Category::Metropolitan, Category::Micropolitan, Category::Other}) {
    if (to_string(c) == s) return c;
  }
  return std::nullopt;
}

namespace {

bool is_path_component(std::string_view s) {
  return !s.empty() && s != "." && s != ".." && s.find_first_of("/\\") == std::string_view::npos;
}

bool touches_boundary(const Feature& f, std::span<const Polygon> boundary) {
  for (const Polygon& part : boundary) {
    if (!part.bbox().intersects(f.geometry.bbox())) continue;
    if (f.geometry.valid()) {
      if (intersects(part, f.geometry)) return true;
    } else {
      for (const Point& p : f.geometry.outer()) {
        if (contains_point(part, p)) return true;
      }
    }
  }
  return false;
}

double grid_edge(double lo, double hi, int i, int n) {
  if (i == 0) return lo;
  if (i == n) return hi;
  return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
}

}  // namespace

void validate_region(const RegionSpec& spec) {
  if (!is_path_component(spec.name)) {
    throw ConfigError("region name must be a non-empty file name component, got \"" + spec.name + "\"");
  }
  if (spec.stcou) {
    const std::string& s = *spec.stcou;
    if (s.size() != 5 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; })) {
      throw ConfigError("STCOU must be 5 digits, got \"" + s + "\"");
    }
  }
  if (spec.cbsa && !is_path_component(*spec.cbsa)) {
    throw ConfigError("CBSA must be a non-empty file name component, got \"" + *spec.cbsa + "\"");
  }
  if (spec.boundary.empty()) throw ConfigError("region boundary has no polygons");
  for (const Polygon& p : spec.boundary) {
    if (!p.valid()) throw ConfigError("region boundary is invalid: " + p.issue());
  }
}

std::vector<Polygon> read_boundary(const std::filesystem::path& path) {
  FeatureCollection fc = read_features(path);
  std::vector<Polygon> parts;
  for (Feature& f : fc.features) {
    if (!f.geometry.valid()) {
      throw ConfigError("boundary feature " + f.id + " is invalid: " + f.geometry.issue());
    }
    parts.push_back(std::move(f.geometry));
  }
  if (parts.empty()) throw ConfigError("no boundary polygon in " + path.string());
  return parts;
}

TileGrid make_tiles(std::span<const Polygon> boundary, int nx, int ny) {
  if (nx < 1 || ny < 1) {
    throw ConfigError("tile grid must be at least 1x1, got " + std::to_string(nx) + "x" +
                      std::to_string(ny));
  }
  if (boundary.empty()) throw ConfigError("region boundary has no polygons");
  TileGrid grid;
  grid.nx = nx;
  grid.ny = ny;
  grid.extent = BBox::empty();
  for (const Polygon& p : boundary) {
    p.require_valid();
    grid.extent.expand(p.bbox());
  }
  const BBox& e = grid.extent;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const BBox box{grid_edge(e.min_lon, e.max_lon, i, nx), grid_edge(e.min_lat, e.max_lat, j, ny),
                     grid_edge(e.min_lon, e.max_lon, i + 1, nx),
                     grid_edge(e.min_lat, e.max_lat, j + 1, ny)};
      const Polygon rect = Polygon::rectangle(box);
      const bool keep = std::any_of(boundary.begin(), boundary.end(), [&](const Polygon& p) {
        return p.bbox().intersects(box) && intersects(p, rect);
      });
      if (keep) grid.tiles.push_back({static_cast<std::size_t>(j) * nx + i, box});
    }
  }
  return grid;
}

TileGrid make_tiles(const Polygon& boundary, int nx, int ny) {
  return make_tiles(std::span<const Polygon>(&boundary, 1), nx, ny);
}

std::pair<int, int> parse_tile_spec(std::string_view text) {
  const auto bad = [&] { return ConfigError("tile grid must look like 5x5, got \"" + std::string(text) + "\""); };
  const auto x = text.find_first_of("xX");
  if (x == std::string_view::npos) throw bad();
  int nx = 0;
  int ny = 0;
  const auto parse = [&](std::string_view part, int& out) {
    const auto [ptr, ec] = std::from_chars(part.data(), part.data() + part.size(), out);
    if (part.empty() || ec != std::errc() || ptr != part.data() + part.size()) throw bad();
  };
  parse(text.substr(0, x), nx);
  parse(text.substr(x + 1), ny);
  if (nx < 1 || ny < 1) throw bad();
  return {nx, ny};
}

FeatureCollection dedup(FeatureCollection fc) {
  FeatureCollection out;
  out.skipped = std::move(fc.skipped);
  std::unordered_set<std::string> seen;
  for (Feature& f : fc.features) {
    if (seen.insert(f.id).second) out.features.push_back(std::move(f));
  }
  std::stable_sort(out.features.begin(), out.features.end(),
                   [](const Feature& a, const Feature& b) { return a.id < b.id; });
  return out;
}

int utm_epsg(Point c) {
  if (!std::isfinite(c.lon) || !std::isfinite(c.lat) || c.lon < -180.0 || c.lon > 180.0 ||
      c.lat < -90.0 || c.lat > 90.0) {
    throw GeometryError("point out of range for UTM zone selection");
  }
  const int zone = std::clamp(static_cast<int>(std::floor((c.lon + 180.0) / 6.0)) + 1, 1, 60);
  return (c.lat >= 0.0 ? 32600 : 32700) + zone;
}

InMemorySource::InMemorySource(FeatureCollection fc) : fc_(std::move(fc)) {
  std::vector<SpatialIndex::Entry> entries;
  entries.reserve(fc_.features.size());
  for (std::size_t i = 0; i < fc_.features.size(); ++i) {
    const BBox& b = fc_.features[i].geometry.bbox();
    if (!b.is_empty()) entries.push_back({i, b});
  }
  index_ = SpatialIndex(std::move(entries));
}

FeatureCollection InMemorySource::fetch(const Tile& tile, std::stop_token) {
  FeatureCollection out;
  for (const std::size_t i : index_.query(tile.box)) out.features.push_back(fc_.features[i]);
  return out;
}

Acquisition acquire(std::span<const Polygon> boundary, TileSource& source,
                    const AcquireOptions& options) {
  Acquisition acq;
  acq.grid = make_tiles(boundary, options.nx, options.ny);
  const std::vector<Tile>& tiles = acq.grid.tiles;

  std::stop_source stop;
  std::stop_callback forward(options.stop, [&] { stop.request_stop(); });
  std::vector<std::optional<FeatureCollection>> results(tiles.size());
  std::vector<std::exception_ptr> errors(tiles.size());
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k = next.fetch_add(1); k < tiles.size(); k = next.fetch_add(1)) {
      if (stop.stop_requested()) return;
      try {
        results[k] = source.fetch(tiles[k], stop.get_token());
      } catch (...) {
        errors[k] = std::current_exception();
        stop.request_stop();
      }
    }
  };
  const unsigned jobs = static_cast<unsigned>(
      std::clamp<std::size_t>(options.jobs == 0 ? 1 : options.jobs, 1, std::max<std::size_t>(tiles.size(), 1)));
  if (jobs == 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < jobs; ++t) pool.emplace_back(work);
  }

  for (const std::exception_ptr& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  FeatureCollection merged;
  for (std::size_t k = 0; k < tiles.size(); ++k) {
    if (!results[k]) throw FetchError("cancelled", tiles[k].id);
    acq.fetched += results[k]->features.size();
    merged.skipped.merge(results[k]->skipped);
    for (Feature& f : results[k]->features) merged.features.push_back(std::move(f));
  }
  acq.features = dedup(std::move(merged));
  return acq;
}

RegionResult run_region(const RegionSpec& spec, TileSource& source, const RuleSet& rules,
                        const RunOptions& options) {
  validate_region(spec);
  Acquisition acq = acquire(spec.boundary, source, options.acquire);

  RegionResult result;
  result.tiles_total = static_cast<std::size_t>(acq.grid.nx) * acq.grid.ny;
  result.tiles_retained = acq.grid.tiles.size();
  result.fetched = acq.fetched;
  result.unique = acq.features.size();
  result.skipped = acq.features.skipped;

  FeatureCollection inside;
  for (Feature& f : strip_surface_key(std::move(acq.features)).features) {
    if (touches_boundary(f, spec.boundary)) {
      inside.features.push_back(std::move(f));
    } else {
      ++result.outside_boundary;
    }
  }
  Partition parts = partition(std::move(inside));
  result.auxiliary = parts.auxiliary.size();
  result.classification =
      classify_collection(parts.buildings, parts.auxiliary, rules, {options.classify_jobs});

  std::vector<Polygon> footprints;
  for (const ClassifiedFootprint& r : result.classification.rows) {
    if (r.feature.geometry.valid()) footprints.push_back(r.feature.geometry);
  }
  result.epsg = utm_epsg(footprints.empty() ? centroid(spec.boundary) : centroid(footprints));

  if (result.classification.rows.empty()) {
    result.warnings.push_back("region " + spec.name + " returned no buildings");
  }
  if (result.classification.degraded_geometry > 0) {
    result.warnings.push_back(std::to_string(result.classification.degraded_geometry) +
                              " building(s) with invalid geometry classified from their own tags");
  }
  if (result.classification.invalid_auxiliary > 0) {
    result.warnings.push_back(std::to_string(result.classification.invalid_auxiliary) +
                              " auxiliary feature(s) with invalid geometry ignored");
  }
  return result;
}

std::filesystem::path region_output_path(const std::filesystem::path& out_dir,
                                         const RegionSpec& spec) {
  std::filesystem::path dir = out_dir / std::string(to_string(spec.category));
  if (spec.cbsa) dir /= *spec.cbsa;
  const std::string stem = spec.stcou ? *spec.stcou + "_" + spec.name : spec.name;
  return dir / (stem + ".geojson");
}

std::string region_report_json(const RegionSpec& spec, const RegionResult& result) {
  const auto& rows = result.classification.rows;
  ordered_json doc;
  doc["region"] = spec.name;
  doc["stcou"] = spec.stcou ? ordered_json(*spec.stcou) : ordered_json();
  doc["cbsa"] = spec.cbsa ? ordered_json(*spec.cbsa) : ordered_json();
  doc["category"] = to_string(spec.category);
  doc["buildings"] = rows.size();
  doc["auxiliary"] = result.auxiliary;

  ordered_json classes = {{"RES", 0}, {"NON_RES", 0}};
  ordered_json stages = ordered_json::object();
  for (const Stage s : kAllStages) stages[std::string(to_string(s))] = 0;
  for (const ClassifiedFootprint& r : rows) {
    classes[std::string(to_string(r.cls))] = classes[std::string(to_string(r.cls))].get<std::size_t>() + 1;
    stages[std::string(to_string(r.stage))] = stages[std::string(to_string(r.stage))].get<std::size_t>() + 1;
  }
  doc["classes"] = std::move(classes);
  doc["stages"] = std::move(stages);
  const RegionStats st = annotation_stats(spec.name, spec.category, rows);
  doc["untagged_fraction"] = st.untagged_fraction ? ordered_json(*st.untagged_fraction) : ordered_json();
  doc["epsg"] = result.epsg ? ordered_json(*result.epsg) : ordered_json();
  doc["tiles"] = {{"total", result.tiles_total}, {"retained", result.tiles_retained}};
  doc["features"] = {{"fetched", result.fetched},
                     {"unique", result.unique},
                     {"outside_boundary", result.outside_boundary}};
  doc["degraded_geometry"] = result.classification.degraded_geometry;
  doc["invalid_auxiliary"] = result.classification.invalid_auxiliary;
  ordered_json skipped = ordered_json::object();
  for (const auto& [reason, n] : result.skipped.reasons) skipped[reason] = n;
  doc["skipped"] = std::move(skipped);
  doc["warnings"] = result.warnings;
  return doc.dump(2) + "\n";
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
    if (ec) throw Error("cannot create " + path.parent_path().string() + ": " + ec.message());
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("cannot write " + path.string());
}

std::filesystem::path write_region(const std::filesystem::path& out_dir, const RegionSpec& spec,
                                   const RegionResult& result) {
  const std::filesystem::path path = region_output_path(out_dir, spec);
  write_file(path, write_classified_geojson(result.classification.rows, result.epsg));
  std::filesystem::path report = path;
  report.replace_extension(".report.json");
  write_file(report, region_report_json(spec, result));
  return path;
}

}  // namespace osmbc
