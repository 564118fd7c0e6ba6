#pragma once

// Reference implementations used as test oracles. They share no code with the
// library beyond its data types, and favour obviousness over speed.

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <map>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "osmbc/classifier.hpp"
#include "osmbc/geometry.hpp"
#include "osmbc/osm_model.hpp"
#include "osmbc/rules.hpp"

namespace oracle {

using osmbc::BBox;
using osmbc::Feature;
using osmbc::Point;
using osmbc::Polygon;
using osmbc::Ring;
using osmbc::RuleSet;
using osmbc::Stage;

inline std::string lower_trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  std::string out;
  for (std::size_t i = b; i < e; ++i) out += static_cast<char>(std::tolower(static_cast<unsigned char>(s[i])));
  return out;
}

inline std::vector<std::string> split_values(const std::string& v) {
  std::vector<std::string> out;
  std::string cur;
  for (const char c : v + ";") {
    if (c == ';') {
      std::string t = lower_trim(cur);
      if (!t.empty()) out.push_back(t);
      cur.clear();
    } else {
      cur += c;
    }
  }
  return out;
}

template <typename C, typename T>
bool has(const C& c, const T& v) {
  return std::find(c.begin(), c.end(), v) != c.end();
}

struct Verdict {
  osmbc::BuildingClass cls;
  Stage stage;
  std::string tag_used;
  friend bool operator==(const Verdict&, const Verdict&) = default;
};

/// The classification cascade for one building, written top to bottom. `touches` decides the
/// spatial relation; every auxiliary feature is tested.
template <typename Touches>
Verdict literal_algorithm1(const Feature& b, const std::vector<Feature>& auxiliary,
                           const RuleSet& r, Touches touches) {
  using osmbc::BuildingClass;
  std::vector<std::string> building = split_values(b.tags.at("building"));
  if (building.empty()) building.push_back("yes");
  for (const auto& v : building) {
    if (has(r.acc_values, v)) return {BuildingClass::Res, Stage::ResidentialTypes, "building: " + v};
  }
  for (const auto& v : building) {
    if (!has(r.unknown_values, v)) {
      return {BuildingClass::NonRes, Stage::NonResidentialTypes, "building: " + v};
    }
  }
  for (const auto& key : r.add_keys) {
    for (const auto& [k, v] : b.tags) {
      if (lower_trim(k) != key) continue;
      const auto comps = split_values(v);
      if (!comps.empty()) return {BuildingClass::NonRes, Stage::NonResidentialAuxTag, key + ": " + comps[0]};
    }
  }

  std::vector<const Feature*> hits;
  for (const Feature& a : auxiliary) {
    if (touches(b, a)) hits.push_back(&a);
  }
  std::sort(hits.begin(), hits.end(), [](const Feature* x, const Feature* y) { return x->id < y->id; });

  // inherited (key, value) tuples in hit order, then key order, then component order
  std::vector<std::pair<std::string, std::string>> inherited;
  for (const Feature* h : hits) {
    std::map<std::string, std::vector<std::string>> by_key;
    for (const auto& [k, v] : h->tags) {
      const std::string key = lower_trim(k);
      if (key.empty()) continue;
      for (const auto& c : split_values(v)) by_key[key].push_back(c);
    }
    for (const auto& [k, vs] : by_key) {
      for (const auto& v : vs) inherited.emplace_back(k, v);
    }
  }
  std::vector<std::pair<std::string, std::string>> kept;
  for (const auto& [k, v] : inherited) {
    bool skip = has(r.skip_values, v);
    for (const auto& [sk, svals] : r.skip_by_key) {
      if (sk == k && has(svals, v)) skip = true;
    }
    if (!skip) kept.emplace_back(k, v);
  }
  for (const auto& [k, vals] : r.res_aux) {
    for (const auto& v : vals) {
      if (has(kept, std::make_pair(k, v))) return {BuildingClass::Res, Stage::ResidentialAuxiliary, k + ": " + v};
    }
  }
  for (const auto& [k, vals] : r.nonres_aux) {
    for (const auto& v : vals) {
      if (has(kept, std::make_pair(k, v))) return {BuildingClass::NonRes, Stage::NonResidentialAuxiliary, k + ": " + v};
    }
  }
  for (const auto& key : r.other_nonres_keys) {
    for (const auto& [k, v] : kept) {
      if (k == key) return {BuildingClass::NonRes, Stage::NonResidentialAuxiliaryGenericTag, k + ": " + v};
    }
  }
  return {BuildingClass::Res, Stage::ResidentialUnknownTag, ""};
}

/// Closed overlap of two axis-aligned rectangles given by their bounding boxes.
inline bool rectangles_touch(const Feature& a, const Feature& b) {
  const BBox& x = a.geometry.bbox();
  const BBox& y = b.geometry.bbox();
  return !(x.max_lon < y.min_lon || y.max_lon < x.min_lon || x.max_lat < y.min_lat || y.max_lat < x.min_lat);
}

inline Verdict verdict(const osmbc::ClassifiedFootprint& c) { return {c.cls, c.stage, c.tag_used}; }

// ---------------------------------------------------------------------------
// Random scenes of rectangles with tags from the rule vocabulary plus noise.

class SceneGenerator {
 public:
  explicit SceneGenerator(std::uint64_t seed, RuleSet rules = osmbc::default_rules())
      : rng_(seed), rules_(std::move(rules)) {
    for (const auto& v : rules_.acc_values) building_values_.push_back(v);
    for (const auto& v : rules_.unknown_values) building_values_.push_back(v);
    for (const auto& v : rules_.unknown_values) building_values_.push_back(v);
    for (const auto& v : {"hotel", "commercial", "church", "school", "retail", ""}) building_values_.emplace_back(v);
    for (const auto& [k, vs] : rules_.res_aux) for (const auto& v : vs) pairs_.emplace_back(k, v);
    for (const auto& [k, vs] : rules_.nonres_aux) for (const auto& v : vs) pairs_.emplace_back(k, v);
    for (const auto& [k, vs] : rules_.skip_by_key) for (const auto& v : vs) pairs_.emplace_back(k, v);
    for (const auto& v : rules_.skip_values) pairs_.emplace_back("landuse", v);
    for (const auto& k : rules_.other_nonres_keys) pairs_.emplace_back(k, "something");
    for (const auto& k : rules_.add_keys) pairs_.emplace_back(k, "yes");
    for (const auto& k : {"name", "addr:street", "highway", "natural", "fixme", "note"}) {
      pairs_.emplace_back(k, "noise");
    }
  }

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }
  bool chance(double p) { return std::bernoulli_distribution(p)(rng_); }
  std::mt19937_64& rng() { return rng_; }

  Polygon rectangle(double extent, double max_side) {
    const double w = uniform(max_side * 0.05, max_side);
    const double h = uniform(max_side * 0.05, max_side);
    const double x = uniform(0.0, extent - w);
    const double y = uniform(0.0, extent - h);
    // snapping to a coarse grid makes shared edges and corners common
    const auto snap = [](double v) { return std::round(v * 1000.0) / 1000.0; };
    BBox box{snap(x), snap(y), snap(x + w), snap(y + h)};
    if (box.max_lon <= box.min_lon) box.max_lon = box.min_lon + 0.001;
    if (box.max_lat <= box.min_lat) box.max_lat = box.min_lat + 0.001;
    return Polygon::rectangle(box);
  }

  std::string cased(std::string s) {
    if (chance(0.1)) for (char& c : s) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (chance(0.05)) s = " " + s + " ";
    return s;
  }

  std::string pick_value(const std::vector<std::string>& values) {
    return values[static_cast<std::size_t>(integer(0, static_cast<int>(values.size()) - 1))];
  }

  std::pair<std::string, std::string> pick_pair() {
    return pairs_[static_cast<std::size_t>(integer(0, static_cast<int>(pairs_.size()) - 1))];
  }

  Feature building(const std::string& id, double extent) {
    Feature f{id, rectangle(extent, extent / 10.0), {}};
    std::string v = pick_value(building_values_);
    if (chance(0.1)) v += ";" + pick_value(building_values_);
    f.tags["building"] = cased(v);
    if (chance(0.2)) {
      const auto [k, val] = pick_pair();
      f.tags.emplace(k, val);
    }
    return f;
  }

  Feature auxiliary(const std::string& id, double extent) {
    Feature f{id, rectangle(extent, extent / 3.0), {}};
    const int n = integer(0, 3);
    for (int i = 0; i < n; ++i) {
      auto [k, v] = pick_pair();
      if (chance(0.1)) v += ";" + pick_pair().second;
      if (chance(0.05)) k[0] = static_cast<char>(std::toupper(static_cast<unsigned char>(k[0])));
      f.tags[k] = cased(v);
    }
    return f;
  }

  std::pair<std::vector<Feature>, std::vector<Feature>> scene(int max_buildings, int max_aux) {
    const double extent = 0.1;
    std::vector<Feature> buildings;
    std::vector<Feature> aux;
    const int nb = integer(0, max_buildings);
    const int na = integer(0, max_aux);
    for (int i = 0; i < nb; ++i) buildings.push_back(building("w" + std::to_string(1000 + integer(0, 100000)) + "_" + std::to_string(i), extent));
    for (int i = 0; i < na; ++i) aux.push_back(auxiliary("r" + std::to_string(integer(0, 100000)) + "_" + std::to_string(i), extent));
    return {buildings, aux};
  }

 private:
  std::mt19937_64 rng_;
  RuleSet rules_;
  std::vector<std::string> building_values_;
  std::vector<std::pair<std::string, std::string>> pairs_;
};

// ---------------------------------------------------------------------------
// Geometry oracles.

/// Even-odd rule, boundary ignored (measure zero for area estimates).
inline bool inside_even_odd(const Polygon& p, Point q) {
  auto ring_odd = [&](const Ring& r) {
    bool odd = false;
    for (std::size_t i = 0, j = r.size() - 1; i < r.size(); j = i++) {
      const Point a = r[i];
      const Point b = r[j];
      if ((a.lat > q.lat) != (b.lat > q.lat) &&
          q.lon < (b.lon - a.lon) * (q.lat - a.lat) / (b.lat - a.lat) + a.lon) {
        odd = !odd;
      }
    }
    return odd;
  };
  bool in = ring_odd(p.outer());
  for (const Ring& h : p.holes()) in = in != ring_odd(h);
  return in;
}

struct Quadrature {
  double area_deg2 = 0.0;
  double mean_lat = 0.0;
};

/// Midpoint-grid quadrature of the intersection of a and b over a's bounding box.
inline Quadrature grid_overlap(const Polygon& a, const Polygon& b, int n) {
  const BBox& box = a.bbox();
  const double dx = box.width() / n;
  const double dy = box.height() / n;
  std::size_t hits = 0;
  double lat_sum = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const Point q{box.min_lon + (i + 0.5) * dx, box.min_lat + (j + 0.5) * dy};
      if (inside_even_odd(a, q) && inside_even_odd(b, q)) {
        ++hits;
        lat_sum += q.lat;
      }
    }
  }
  Quadrature out;
  out.area_deg2 = static_cast<double>(hits) * dx * dy;
  out.mean_lat = hits > 0 ? lat_sum / static_cast<double>(hits) : 0.0;
  return out;
}

inline double to_m2(double deg2, double lat) {
  return deg2 * std::cos(lat * std::numbers::pi / 180.0) * 111320.0 * 111320.0;
}

/// Star-shaped polygon around `c`, optionally with a star-shaped hole.
inline Polygon random_star(std::mt19937_64& rng, Point c, double r_max, int vertices, bool with_hole) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> angles;
  for (int i = 0; i < vertices; ++i) angles.push_back((i + 0.8 * u(rng)) * 2.0 * std::numbers::pi / vertices);
  Ring outer;
  double r_min = r_max;
  for (const double t : angles) {
    const double r = r_max * (0.5 + 0.5 * u(rng));
    r_min = std::min(r_min, r);
    outer.push_back({c.lon + r * std::cos(t), c.lat + r * std::sin(t)});
  }
  std::vector<Ring> holes;
  if (with_hole) {
    Ring hole;
    for (int i = 0; i < 7; ++i) {
      const double t = 2.0 * std::numbers::pi * i / 7.0;
      const double r = r_min * (0.2 + 0.3 * u(rng));
      hole.push_back({c.lon + r * std::cos(t), c.lat + r * std::sin(t)});
    }
    holes.push_back(hole);
  }
  return Polygon::from_rings(outer, holes);
}

/// Hull vertices by the O(n^3) edge test: (p, q) is a hull edge iff every other
/// point lies on its left or on the segment.
inline std::vector<Point> brute_hull_vertices(const std::vector<Point>& pts) {
  std::vector<Point> out;
  auto cross = [](Point o, Point a, Point b) {
    return (a.lon - o.lon) * (b.lat - o.lat) - (a.lat - o.lat) * (b.lon - o.lon);
  };
  for (std::size_t i = 0; i < pts.size(); ++i) {
    for (std::size_t j = 0; j < pts.size(); ++j) {
      if (i == j || pts[i] == pts[j]) continue;
      bool edge = true;
      for (std::size_t k = 0; k < pts.size() && edge; ++k) {
        const double c = cross(pts[i], pts[j], pts[k]);
        if (c < 0.0) edge = false;
        if (c == 0.0) {
          // collinear points must lie between i and j
          const double t = (pts[k].lon - pts[i].lon) * (pts[j].lon - pts[i].lon) +
                           (pts[k].lat - pts[i].lat) * (pts[j].lat - pts[i].lat);
          const double len = (pts[j].lon - pts[i].lon) * (pts[j].lon - pts[i].lon) +
                             (pts[j].lat - pts[i].lat) * (pts[j].lat - pts[i].lat);
          if (t < 0.0 || t > len) edge = false;
        }
      }
      if (edge && !has(out, pts[i])) out.push_back(pts[i]);
    }
  }
  std::sort(out.begin(), out.end(), [](Point a, Point b) { return std::tie(a.lon, a.lat) < std::tie(b.lon, b.lat); });
  return out;
}

/// EPSG code as computed by the published Python function: float floor
/// division as CPython performs it, no clamping.
inline int python_utm_epsg(double lon, double lat) {
  const double vx = lon + 180.0;
  const double wx = 6.0;
  double mod = std::fmod(vx, wx);
  double div = (vx - mod) / wx;
  if (mod != 0.0 && ((wx < 0) != (mod < 0))) div -= 1.0;
  double floordiv = 0.0;
  if (div != 0.0) {
    floordiv = std::floor(div);
    if (div - floordiv > 0.5) floordiv += 1.0;
  }
  const int zone = static_cast<int>(floordiv) + 1;
  return lat >= 0 ? 32600 + zone : 32700 + zone;
}

}  // namespace oracle
