#pragma once

#include <chrono>
#include <mutex>
#include <optional>
#include <span>
#include <stop_token>
#include <string>
#include <vector>

#include "osmbc/osm_model.hpp"
#include "osmbc/pipeline.hpp"

namespace osmbc {

struct OverpassOptions {
  /// Full interpreter URL, e.g. "https://overpass-api.de/api/interpreter".
  std::string endpoint;
  std::vector<std::string> keys;
  /// Server-side [timeout:N] in seconds.
  int timeout_s = 180;
  int max_attempts = 3;
  std::chrono::milliseconds initial_backoff{1000};
  /// Minimum spacing between consecutive requests from one client.
  std::chrono::milliseconds min_interval{0};
};

/// Endpoint from the flag, else OSMBC_OVERPASS_URL. Throws ConfigError if neither is set.
std::string resolve_endpoint(const std::optional<std::string>& flag);

/// Union query for nodes, ways and relations carrying any of `keys` inside
/// `box`, recursing down to the member nodes.
std::string overpass_query(const BBox& box, std::span<const std::string> keys, int timeout_s);

class OverpassClient {
 public:
  explicit OverpassClient(OverpassOptions options);

  /// Fetches one tile with a union query, retrying network errors, 429 and 5xx
  /// with exponential backoff. If the server rejects the union as too large,
  /// falls back to one query per key. Throws FetchError after the last attempt.
  FeatureCollection fetch_tile(const BBox& box, std::size_t tile_id, std::stop_token stop = {});

  const OverpassOptions& options() const noexcept { return options_; }

 private:
  std::string post(const std::string& query, std::size_t tile_id, std::stop_token stop);
  void pace(std::stop_token stop);

  OverpassOptions options_;
  std::string origin_;
  std::string path_;
  std::mutex pace_mutex_;
  std::chrono::steady_clock::time_point last_request_{};
};

class OverpassSource : public TileSource {
 public:
  explicit OverpassSource(OverpassOptions options) : client_(std::move(options)) {}
  FeatureCollection fetch(const Tile& tile, std::stop_token stop) override {
    return client_.fetch_tile(tile.box, tile.id, stop);
  }

 private:
  OverpassClient client_;
};

}  // namespace osmbc
