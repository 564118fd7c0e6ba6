#include "osmbc/overpass.hpp"

#include <condition_variable>
#include <cstdio>
#include <cstdlib>
#include <set>
#include <thread>

#include "httplib.h"
#include "osmbc/error.hpp"

namespace osmbc {

namespace {

struct TooLarge {
  std::string reason;
};

std::string coordinate(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.7f", v);
  return buf;
}

std::string quoted(const std::string& s) {
  std::string out = "\"";
  for (const char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

bool sleep_for(std::chrono::milliseconds d, std::stop_token stop) {
  if (d.count() <= 0) return !stop.stop_requested();
  std::mutex m;
  std::condition_variable_any cv;
  std::unique_lock lock(m);
  return !cv.wait_for(lock, stop, d, [] { return false; });
}

bool is_size_remark(const std::string& body) {
  const auto remark = body.find("<remark>");
  if (remark == std::string::npos) return false;
  const std::string text = body.substr(remark, body.find("</remark>", remark) - remark);
  return text.find("out of memory") != std::string::npos ||
         text.find("timed out") != std::string::npos;
}

}  // namespace

std::string resolve_endpoint(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv("OSMBC_OVERPASS_URL"); env != nullptr && *env != '\0') {
    return env;
  }
  throw ConfigError("no Overpass endpoint: pass --endpoint or set OSMBC_OVERPASS_URL");
}

std::string overpass_query(const BBox& box, std::span<const std::string> keys, int timeout_s) {
  const std::string bbox = "(" + coordinate(box.min_lat) + "," + coordinate(box.min_lon) + "," +
                           coordinate(box.max_lat) + "," + coordinate(box.max_lon) + ")";
  std::string q = "[out:xml][timeout:" + std::to_string(timeout_s) + "];(";
  for (const std::string& k : keys) q += "nwr[" + quoted(k) + "]" + bbox + ";";
  q += ");(._;>;);out body;";
  return q;
}

OverpassClient::OverpassClient(OverpassOptions options) : options_(std::move(options)) {
  const std::string& url = options_.endpoint;
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw ConfigError("endpoint must be an http(s) URL, got \"" + url + "\"");
  }
  const std::string scheme = url.substr(0, scheme_end);
  if (scheme != "http" && scheme != "https") {
    throw ConfigError("unsupported endpoint scheme \"" + scheme + "\"");
  }
#ifndef CPPHTTPLIB_OPENSSL_SUPPORT
  if (scheme == "https") throw ConfigError("this build has no TLS support; use an http endpoint");
#endif
  const auto path_start = url.find('/', scheme_end + 3);
  origin_ = url.substr(0, path_start);
  path_ = path_start == std::string::npos ? "/api/interpreter" : url.substr(path_start);
  if (options_.keys.empty()) throw ConfigError("no keys to fetch");
  if (options_.max_attempts < 1) throw ConfigError("max_attempts must be at least 1");
}

void OverpassClient::pace(std::stop_token stop) {
  std::unique_lock lock(pace_mutex_);
  const auto now = std::chrono::steady_clock::now();
  const auto ready = last_request_ + options_.min_interval;
  if (last_request_.time_since_epoch().count() != 0 && ready > now) {
    sleep_for(std::chrono::ceil<std::chrono::milliseconds>(ready - now), stop);
  }
  last_request_ = std::chrono::steady_clock::now();
}

std::string OverpassClient::post(const std::string& query, std::size_t tile_id,
                                 std::stop_token stop) {
  std::string last_error;
  auto backoff = options_.initial_backoff;
  for (int attempt = 1; attempt <= options_.max_attempts; ++attempt) {
    if (stop.stop_requested()) throw FetchError("cancelled", tile_id);
    pace(stop);

    httplib::Client client(origin_);
    client.set_connection_timeout(30);
    client.set_read_timeout(options_.timeout_s + 30);
    const httplib::Params params{{"data", query}};
    const httplib::Result res = client.Post(path_, params);

    if (!res) {
      last_error = "request failed: " + httplib::to_string(res.error());
    } else if (res->status == 200) {
      if (is_size_remark(res->body)) throw TooLarge{"server remark"};
      return res->body;
    } else if (res->status == 413) {
      throw TooLarge{"HTTP 413"};
    } else if (res->status == 429 || res->status >= 500) {
      last_error = "HTTP " + std::to_string(res->status);
    } else {
      throw FetchError("HTTP " + std::to_string(res->status), tile_id);
    }
    if (attempt < options_.max_attempts) {
      if (!sleep_for(backoff, stop)) throw FetchError("cancelled", tile_id);
      backoff *= 2;
    }
  }
  throw FetchError(last_error + " after " + std::to_string(options_.max_attempts) + " attempt(s)",
                   tile_id);
}

FeatureCollection OverpassClient::fetch_tile(const BBox& box, std::size_t tile_id,
                                             std::stop_token stop) {
  OsmParseOptions parse;
  parse.relevant_keys = std::set<std::string>(options_.keys.begin(), options_.keys.end());
  try {
    return parse_osm_xml(post(overpass_query(box, options_.keys, options_.timeout_s), tile_id, stop),
                         parse);
  } catch (const TooLarge& e) {
    if (options_.keys.size() == 1) throw FetchError("response too large (" + e.reason + ")", tile_id);
  }
  FeatureCollection merged;
  for (const std::string& key : options_.keys) {
    std::string body;
    try {
      body = post(overpass_query(box, std::span(&key, 1), options_.timeout_s), tile_id, stop);
    } catch (const TooLarge& e) {
      throw FetchError("response too large for key \"" + key + "\" (" + e.reason + ")", tile_id);
    }
    FeatureCollection part = parse_osm_xml(body, parse);
    merged.skipped.merge(part.skipped);
    for (Feature& f : part.features) merged.features.push_back(std::move(f));
  }
  return dedup(std::move(merged));
}

}  // namespace osmbc
