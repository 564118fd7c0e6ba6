#include <atomic>
#include <chrono>
#include <csignal>
#include <filesystem>
#include <iostream>
#include <optional>
#include <stop_token>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "osmbc/classifier.hpp"
#include "osmbc/error.hpp"
#include "osmbc/kernels.hpp"
#include "osmbc/overpass.hpp"
#include "osmbc/pipeline.hpp"
#include "osmbc/rules.hpp"
#include "osmbc/stats.hpp"
#include "osmbc/validation.hpp"

namespace fs = std::filesystem;
using namespace osmbc;

namespace {

enum Exit { kOk = 0, kDataError = 1, kConfigError = 2, kFetchError = 3, kMappingError = 4 };

std::atomic<bool> g_interrupted{false};

extern "C" void on_signal(int) { g_interrupted.store(true); }

// Turns SIGINT/SIGTERM into a stop request for in-flight network I/O.
class Interrupts {
 public:
  Interrupts() {
    std::signal(SIGINT, on_signal);
    std::signal(SIGTERM, on_signal);
    watcher_ = std::jthread([this](std::stop_token self) {
      while (!self.stop_requested()) {
        if (g_interrupted.load()) {
          source_.request_stop();
          return;
        }
        std::this_thread::sleep_for(std::chrono::milliseconds(50));
      }
    });
  }
  std::stop_token token() const { return source_.get_token(); }

 private:
  std::stop_source source_;
  std::jthread watcher_;
};

struct CommonRules {
  std::optional<std::string> path;
  bool literal = false;

  RuleSet load() const {
    if (path) {
      if (literal) throw ConfigError("--literal-lists only applies to the built-in rules");
      return load_rules_file(*path);
    }
    return default_rules(literal);
  }
};

struct NetworkFlags {
  std::optional<std::string> endpoint;
  int timeout_s = 180;
  int rate_limit_ms = 1000;
  int attempts = 3;
};

OverpassOptions overpass_options(const NetworkFlags& net, const RuleSet& rules) {
  OverpassOptions o;
  o.endpoint = resolve_endpoint(net.endpoint);
  o.keys = download_keys(rules);
  o.timeout_s = net.timeout_s;
  o.min_interval = std::chrono::milliseconds(net.rate_limit_ms);
  o.max_attempts = net.attempts;
  return o;
}

void add_network_flags(CLI::App& cmd, NetworkFlags& net) {
  cmd.add_option("--endpoint", net.endpoint,
                 "Overpass interpreter URL (default: $OSMBC_OVERPASS_URL)");
  cmd.add_option("--timeout", net.timeout_s, "Server-side query timeout in seconds")
      ->check(CLI::PositiveNumber);
  cmd.add_option("--rate-limit-ms", net.rate_limit_ms, "Minimum spacing between requests")
      ->check(CLI::NonNegativeNumber);
  cmd.add_option("--attempts", net.attempts, "Attempts per request")->check(CLI::PositiveNumber);
}

void add_rule_flags(CLI::App& cmd, CommonRules& rules) {
  cmd.add_option("--rules", rules.path, "Rule configuration (JSON); default: built-in rules");
  cmd.add_flag("--literal-lists", rules.literal,
               "Use the published tag lists verbatim (keeps the \"shopv\" key)");
}

Category parse_category(const std::string& s) {
  const auto c = category_from_string(s);
  if (!c) throw ConfigError("category must be metropolitan, micropolitan or other, got \"" + s + "\"");
  return *c;
}

std::optional<Category> category_from_path(const fs::path& p) {
  for (const fs::path& part : p.parent_path()) {
    if (const auto c = category_from_string(part.string())) return c;
  }
  return std::nullopt;
}

std::string region_id(const fs::path& p) {
  std::string name = p.filename().string();
  for (const std::string ext : {".geojson", ".json"}) {
    if (name.size() > ext.size() && name.ends_with(ext)) return name.substr(0, name.size() - ext.size());
  }
  return name;
}

struct ClassifyArgs {
  std::string boundary;
  std::vector<std::string> inputs;
  bool fetch = false;
  NetworkFlags net;
  CommonRules rules;
  std::string tiles = "5x5";
  std::string out;
  std::optional<std::string> name;
  std::optional<std::string> stcou;
  std::optional<std::string> cbsa;
  std::string category = "other";
  unsigned jobs = 1;
};

int run_classify(const ClassifyArgs& a, std::stop_token stop) {
  if (a.fetch == !a.inputs.empty()) throw ConfigError("give either --input files or --fetch");
  const RuleSet rules = a.rules.load();
  const auto [nx, ny] = parse_tile_spec(a.tiles);

  RegionSpec spec;
  spec.boundary = read_boundary(a.boundary);
  spec.name = a.name ? *a.name : region_id(a.boundary);
  spec.stcou = a.stcou;
  spec.cbsa = a.cbsa;
  spec.category = parse_category(a.category);
  validate_region(spec);

  RunOptions options;
  options.acquire = {nx, ny, a.jobs, stop};
  options.classify_jobs = a.jobs;

  RegionResult result;
  if (a.fetch) {
    OverpassSource source(overpass_options(a.net, rules));
    result = run_region(spec, source, rules, options);
  } else {
    OsmParseOptions parse;
    const std::vector<std::string> keys = download_keys(rules);
    parse.relevant_keys.insert(keys.begin(), keys.end());
    FeatureCollection all;
    for (const std::string& input : a.inputs) {
      FeatureCollection fc = read_features(input, parse);
      all.skipped.merge(fc.skipped);
      for (Feature& f : fc.features) all.features.push_back(std::move(f));
    }
    InMemorySource source(std::move(all));
    result = run_region(spec, source, rules, options);
  }

  const fs::path path = write_region(a.out, spec, result);
  std::cerr << "tiles: " << result.tiles_retained << " of " << result.tiles_total << " retained\n";
  if (result.skipped.total() > 0) std::cerr << result.skipped.summary() << "\n";
  for (const std::string& w : result.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "wrote " << result.classification.rows.size() << " building(s) to "
            << path.string() << "\n";
  return kOk;
}

struct ValidateArgs {
  std::string pred;
  std::string truth;
  std::string mapping;
  bool exclude_structures = false;
  std::optional<std::string> json_out;
  std::string format = "table";
};

int run_validate(const ValidateArgs& a) {
  const TruthMapping mapping = resolve_mapping(a.mapping);
  const std::vector<ClassifiedFootprint> pred = read_classified_geojson(read_file_bytes(a.pred));
  MappedTruth truth = map_truth(read_features(a.truth), mapping);
  if (truth.invalid_geometry > 0) {
    std::cerr << "warning: " << truth.invalid_geometry
              << " ground-truth polygon(s) with invalid geometry ignored\n";
  }
  const TruthIndex index(std::move(truth.polygons));
  const Evaluation e = evaluate(pred, index, {a.exclude_structures});
  const std::string json = metrics_json(e);
  if (a.json_out) write_file(*a.json_out, json);
  std::cout << (a.format == "json" ? json : metrics_table(e.metrics));
  std::cerr << "evaluated " << e.rows.size() << " of " << e.input << " building(s); excluded "
            << e.no_overlap << " without overlap, " << e.not_applicable << " mixed-use, "
            << e.geometry_error << " invalid";
  if (a.exclude_structures) std::cerr << ", " << e.structures_removed << " sheds/garages";
  std::cerr << "\n";
  return kOk;
}

struct StatsArgs {
  std::vector<std::string> preds;
  std::vector<std::string> categories;
  std::string out;
  double bin_width = 0.05;
};

int run_stats(const StatsArgs& a) {
  if (!a.categories.empty() && a.categories.size() != 1 && a.categories.size() != a.preds.size()) {
    throw ConfigError("give one --category for all files or one per --pred file");
  }
  std::vector<RegionStats> stats;
  for (std::size_t i = 0; i < a.preds.size(); ++i) {
    const fs::path p = a.preds[i];
    Category category = Category::Other;
    if (!a.categories.empty()) {
      category = parse_category(a.categories.size() == 1 ? a.categories[0] : a.categories[i]);
    } else if (const auto inferred = category_from_path(p)) {
      category = *inferred;
    } else {
      throw ConfigError("cannot infer the category of " + p.string() + "; pass --category");
    }
    const auto rows = read_classified_geojson(read_file_bytes(p));
    stats.push_back(annotation_stats(region_id(p), category, rows));
  }
  const StatsSummary summary = aggregate(stats, a.bin_width);
  const fs::path out = a.out;
  write_file(out / "region_stats.csv", region_stats_csv(stats));
  write_file(out / "category_summary.csv", category_summary_csv(summary));
  write_file(out / "histogram.csv", histogram_csv(summary.histogram));
  std::cerr << "wrote statistics for " << stats.size() << " region(s) to " << out.string() << "\n";
  return kOk;
}

struct FetchArgs {
  std::string boundary;
  NetworkFlags net;
  CommonRules rules;
  std::string tiles = "5x5";
  std::string out;
  unsigned jobs = 1;
};

int run_fetch(const FetchArgs& a, std::stop_token stop) {
  const RuleSet rules = a.rules.load();
  const auto [nx, ny] = parse_tile_spec(a.tiles);
  const std::vector<Polygon> boundary = read_boundary(a.boundary);
  OverpassSource source(overpass_options(a.net, rules));
  const Acquisition acq = acquire(boundary, source, {nx, ny, a.jobs, stop});
  write_file(a.out, write_geojson(acq.features));
  std::cerr << "tiles: " << acq.grid.tiles.size() << " of " << nx * ny << " retained\n";
  if (acq.features.skipped.total() > 0) std::cerr << acq.features.skipped.summary() << "\n";
  std::cerr << "wrote " << acq.features.size() << " feature(s) (" << acq.fetched
            << " before dedup) to " << a.out << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Residential / non-residential classification of OpenStreetMap building footprints"};
  app.require_subcommand(1);
  std::string kernels;
  app.add_option("--kernels", kernels, "Force the kernel backend (scalar or avx2)");

  ClassifyArgs ca;
  CLI::App* classify = app.add_subcommand("classify", "Classify the buildings of one region");
  classify->add_option("--boundary", ca.boundary, "Region boundary (GeoJSON or OSM XML)")
      ->required()
      ->check(CLI::ExistingFile);
  classify->add_option("--input", ca.inputs, "Local OSM XML or GeoJSON data (repeatable)")
      ->check(CLI::ExistingFile);
  classify->add_flag("--fetch", ca.fetch, "Download the data from an Overpass endpoint");
  add_network_flags(*classify, ca.net);
  add_rule_flags(*classify, ca.rules);
  classify->add_option("--tiles", ca.tiles, "Tile grid NxM")->capture_default_str();
  classify->add_option("--out", ca.out, "Output directory")->required();
  classify->add_option("--region-name", ca.name, "Region name (default: boundary file name)");
  classify->add_option("--stcou", ca.stcou, "Five-digit state+county FIPS code");
  classify->add_option("--cbsa", ca.cbsa, "CBSA code");
  classify->add_option("--category", ca.category, "metropolitan, micropolitan or other")
      ->capture_default_str();
  classify->add_option("--jobs", ca.jobs, "Worker threads")->check(CLI::PositiveNumber);

  ValidateArgs va;
  CLI::App* validate = app.add_subcommand("validate", "Score predictions against ground truth");
  validate->add_option("--pred", va.pred, "Classified GeoJSON")->required()->check(CLI::ExistingFile);
  validate->add_option("--truth", va.truth, "Ground-truth GeoJSON")->required()->check(CLI::ExistingFile);
  validate->add_option("--mapping", va.mapping, "Mapping preset name or mapping JSON file")
      ->required();
  validate->add_flag("--exclude-structures", va.exclude_structures,
                     "Drop sheds, garages and parking structures before scoring");
  validate->add_option("--json", va.json_out, "Also write the metrics JSON to this file");
  validate->add_option("--format", va.format, "Standard output format")
      ->check(CLI::IsMember({"table", "json"}))
      ->capture_default_str();

  StatsArgs sa;
  CLI::App* stats = app.add_subcommand("stats", "Annotation completeness statistics");
  stats->add_option("--pred", sa.preds, "Classified GeoJSON files")->required()->check(CLI::ExistingFile);
  stats->add_option("--category", sa.categories,
                    "Category of all files or of each file (default: from the path)");
  stats->add_option("--out", sa.out, "Output directory for the CSV files")->required();
  stats->add_option("--bin-width", sa.bin_width, "Histogram bin width")->capture_default_str();

  FetchArgs fa;
  CLI::App* fetch = app.add_subcommand("fetch", "Download, merge and deduplicate raw OSM data");
  fetch->add_option("--boundary", fa.boundary, "Region boundary (GeoJSON or OSM XML)")
      ->required()
      ->check(CLI::ExistingFile);
  add_network_flags(*fetch, fa.net);
  add_rule_flags(*fetch, fa.rules);
  fetch->add_option("--tiles", fa.tiles, "Tile grid NxM")->capture_default_str();
  fetch->add_option("--out", fa.out, "Output GeoJSON file")->required();
  fetch->add_option("--jobs", fa.jobs, "Concurrent tile downloads")->check(CLI::PositiveNumber);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (!kernels.empty()) {
      const auto backend = kernels == "scalar" ? std::optional(kernels::Backend::Scalar)
                           : kernels == "avx2" ? std::optional(kernels::Backend::Avx2)
                                               : std::nullopt;
      if (!backend || !kernels::set_backend(*backend)) {
        throw ConfigError("kernel backend \"" + kernels + "\" is not available");
      }
    }
    Interrupts interrupts;
    if (*classify) return run_classify(ca, interrupts.token());
    if (*validate) return run_validate(va);
    if (*stats) return run_stats(sa);
    if (*fetch) return run_fetch(fa, interrupts.token());
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const FetchError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kFetchError;
  } catch (const MappingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kMappingError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kDataError;
  }
  return kOk;
}
