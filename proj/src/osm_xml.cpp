#include <expat.h>

#include <algorithm>
#include <charconv>
#include <climits>
#include <cstdint>
#include <cstring>
#include <optional>
#include <string>
#include <unordered_map>

#include "osmbc/error.hpp"
#include "osmbc/kernels.hpp"
#include "osmbc/osm_model.hpp"

namespace osmbc {

namespace {

struct RawNode {
  std::int64_t id = 0;
  Point pos;
  TagMap tags;
};

struct RawWay {
  std::int64_t id = 0;
  std::vector<std::int64_t> refs;
  TagMap tags;
};

struct RawMember {
  std::string type;
  std::int64_t ref = 0;
  std::string role;
};

struct RawRelation {
  std::int64_t id = 0;
  std::vector<RawMember> members;
  TagMap tags;
};

enum class Open { None, Node, Way, Relation };

struct Document {
  std::unordered_map<std::int64_t, Point> positions;
  std::vector<RawNode> tagged_nodes;
  std::vector<RawWay> ways;
  std::unordered_map<std::int64_t, std::size_t> way_index;
  std::vector<RawRelation> relations;

  Open open = Open::None;
  RawNode node;
  RawWay way;
  RawRelation relation;

  std::optional<std::string> error;
  std::size_t error_offset = 0;
  XML_Parser parser = nullptr;
};

const char* attribute(const XML_Char** attrs, const char* name) {
  for (std::size_t i = 0; attrs[i] != nullptr; i += 2) {
    if (std::strcmp(attrs[i], name) == 0) return attrs[i + 1];
  }
  return nullptr;
}

void fail(Document& doc, std::string message) {
  if (doc.error) return;
  doc.error = std::move(message);
  doc.error_offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(doc.parser));
  XML_StopParser(doc.parser, XML_FALSE);
}

template <typename T>
bool parse_number(Document& doc, const XML_Char** attrs, const char* name, T& out) {
  const char* text = attribute(attrs, name);
  if (text == nullptr) {
    fail(doc, std::string("missing attribute '") + name + "'");
    return false;
  }
  const char* end = text + std::strlen(text);
  const auto [ptr, ec] = std::from_chars(text, end, out);
  if (ec != std::errc() || ptr != end) {
    fail(doc, std::string("invalid number in attribute '") + name + "'");
    return false;
  }
  return true;
}

void on_start(void* user, const XML_Char* name, const XML_Char** attrs) {
  auto& doc = *static_cast<Document*>(user);
  if (doc.error) return;
  const std::string_view el(name);
  if (el == "node") {
    doc.open = Open::Node;
    doc.node = RawNode{};
    if (!parse_number(doc, attrs, "id", doc.node.id)) return;
    // Deleted or redacted nodes in some extracts carry no coordinates.
    if (attribute(attrs, "lat") == nullptr && attribute(attrs, "lon") == nullptr) {
      doc.open = Open::None;
      return;
    }
    if (!parse_number(doc, attrs, "lat", doc.node.pos.lat)) return;
    parse_number(doc, attrs, "lon", doc.node.pos.lon);
  } else if (el == "way") {
    doc.open = Open::Way;
    doc.way = RawWay{};
    parse_number(doc, attrs, "id", doc.way.id);
  } else if (el == "relation") {
    doc.open = Open::Relation;
    doc.relation = RawRelation{};
    parse_number(doc, attrs, "id", doc.relation.id);
  } else if (el == "nd" && doc.open == Open::Way) {
    std::int64_t ref = 0;
    if (parse_number(doc, attrs, "ref", ref)) doc.way.refs.push_back(ref);
  } else if (el == "member" && doc.open == Open::Relation) {
    RawMember m;
    if (!parse_number(doc, attrs, "ref", m.ref)) return;
    const char* type = attribute(attrs, "type");
    const char* role = attribute(attrs, "role");
    m.type = type ? type : "";
    m.role = role ? role : "";
    doc.relation.members.push_back(std::move(m));
  } else if (el == "tag") {
    const char* k = attribute(attrs, "k");
    const char* v = attribute(attrs, "v");
    if (k == nullptr || v == nullptr) {
      fail(doc, "tag without k or v attribute");
      return;
    }
    TagMap* tags = nullptr;
    switch (doc.open) {
      case Open::Node: tags = &doc.node.tags; break;
      case Open::Way: tags = &doc.way.tags; break;
      case Open::Relation: tags = &doc.relation.tags; break;
      case Open::None: return;
    }
    tags->emplace(k, v);
  }
}

void on_end(void* user, const XML_Char* name) {
  auto& doc = *static_cast<Document*>(user);
  if (doc.error) return;
  const std::string_view el(name);
  if (el == "node" && doc.open == Open::Node) {
    doc.positions[doc.node.id] = doc.node.pos;
    if (!doc.node.tags.empty()) doc.tagged_nodes.push_back(std::move(doc.node));
    doc.open = Open::None;
  } else if (el == "way" && doc.open == Open::Way) {
    doc.way_index[doc.way.id] = doc.ways.size();
    doc.ways.push_back(std::move(doc.way));
    doc.open = Open::None;
  } else if (el == "relation" && doc.open == Open::Relation) {
    doc.relations.push_back(std::move(doc.relation));
    doc.open = Open::None;
  }
}

void parse_document(std::string_view bytes, Document& doc) {
  XML_Parser parser = XML_ParserCreate(nullptr);
  if (parser == nullptr) throw ParseError("cannot allocate XML parser");
  doc.parser = parser;
  XML_SetUserData(parser, &doc);
  XML_SetElementHandler(parser, on_start, on_end);

  constexpr std::size_t kChunk = std::size_t{1} << 26;
  std::size_t offset = 0;
  bool ok = true;
  do {
    const std::size_t n = std::min(kChunk, bytes.size() - offset);
    const bool last = offset + n == bytes.size();
    if (XML_Parse(parser, bytes.data() + offset, static_cast<int>(n), last ? 1 : 0) ==
        XML_STATUS_ERROR) {
      ok = false;
      break;
    }
    offset += n;
  } while (offset < bytes.size());

  if (!ok && !doc.error) {
    doc.error = std::string("malformed XML: ") + XML_ErrorString(XML_GetErrorCode(parser));
    doc.error_offset = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser));
  }
  XML_ParserFree(parser);
  doc.parser = nullptr;
  if (doc.error) throw ParseError(*doc.error, doc.error_offset);
}

bool relevant(const TagMap& tags, const OsmParseOptions& options, bool ignore_type) {
  for (const auto& [k, v] : tags) {
    if (ignore_type && k == "type") continue;
    if (options.relevant_keys.empty() || options.relevant_keys.contains(k)) return true;
  }
  return false;
}

std::optional<Ring> resolve(const Document& doc, const std::vector<std::int64_t>& refs) {
  Ring ring;
  ring.reserve(refs.size());
  for (const std::int64_t ref : refs) {
    const auto it = doc.positions.find(ref);
    if (it == doc.positions.end()) return std::nullopt;
    ring.push_back(it->second);
  }
  return ring;
}

// Joins way node lists end-to-end into closed node-id rings.
std::optional<std::vector<std::vector<std::int64_t>>> join_rings(
    std::vector<std::vector<std::int64_t>> segments) {
  std::vector<std::vector<std::int64_t>> rings;
  while (!segments.empty()) {
    std::vector<std::int64_t> ring = std::move(segments.front());
    segments.erase(segments.begin());
    while (ring.size() < 2 || ring.front() != ring.back()) {
      bool extended = false;
      for (auto it = segments.begin(); it != segments.end(); ++it) {
        if (it->empty()) continue;
        if (it->front() == ring.back()) {
          ring.insert(ring.end(), it->begin() + 1, it->end());
        } else if (it->back() == ring.back()) {
          ring.insert(ring.end(), it->rbegin() + 1, it->rend());
        } else {
          continue;
        }
        segments.erase(it);
        extended = true;
        break;
      }
      if (!extended) return std::nullopt;
    }
    rings.push_back(std::move(ring));
  }
  return rings;
}

void build_multipolygon(const Document& doc, const RawRelation& rel, FeatureCollection& out) {
  std::vector<std::vector<std::int64_t>> outer_ways;
  std::vector<std::vector<std::int64_t>> inner_ways;
  for (const RawMember& m : rel.members) {
    if (m.type != "way") continue;
    const auto it = doc.way_index.find(m.ref);
    if (it == doc.way_index.end()) {
      out.skipped.add("incomplete multipolygon relation");
      return;
    }
    (m.role == "inner" ? inner_ways : outer_ways).push_back(doc.ways[it->second].refs);
  }
  const auto outer_ids = join_rings(std::move(outer_ways));
  const auto inner_ids = join_rings(std::move(inner_ways));
  if (!outer_ids || !inner_ids || outer_ids->empty()) {
    out.skipped.add("unclosed multipolygon ring");
    return;
  }

  std::vector<Ring> outers;
  std::vector<Ring> inners;
  for (const auto& ids : *outer_ids) {
    auto ring = resolve(doc, ids);
    if (!ring) {
      out.skipped.add("unresolved node reference");
      return;
    }
    outers.push_back(std::move(*ring));
  }
  for (const auto& ids : *inner_ids) {
    auto ring = resolve(doc, ids);
    if (!ring) {
      out.skipped.add("unresolved node reference");
      return;
    }
    inners.push_back(std::move(*ring));
  }

  std::vector<std::vector<Ring>> holes(outers.size());
  for (Ring& inner : inners) {
    bool placed = false;
    for (std::size_t k = 0; k < outers.size() && !placed; ++k) {
      if (kernels::crossing_parity(outers[k], inner.front())) {
        holes[k].push_back(std::move(inner));
        placed = true;
      }
    }
    if (!placed) out.skipped.add("orphan inner ring");
  }

  const std::string base = "r" + std::to_string(rel.id);
  for (std::size_t k = 0; k < outers.size(); ++k) {
    Feature f;
    f.id = outers.size() == 1 ? base : base + "#" + std::to_string(k);
    f.geometry = Polygon::from_rings(std::move(outers[k]), std::move(holes[k]));
    f.tags = rel.tags;
    out.features.push_back(std::move(f));
  }
}

}  // namespace

FeatureCollection parse_osm_xml(std::string_view bytes, const OsmParseOptions& options) {
  Document doc;
  parse_document(bytes, doc);

  FeatureCollection out;
  const double half = 0.5 * options.point_side_deg;
  for (const RawNode& n : doc.tagged_nodes) {
    if (!relevant(n.tags, options, false)) continue;
    Feature f;
    f.id = "n" + std::to_string(n.id);
    f.geometry = Polygon::rectangle(
        {n.pos.lon - half, n.pos.lat - half, n.pos.lon + half, n.pos.lat + half});
    f.tags = n.tags;
    out.features.push_back(std::move(f));
  }

  for (const RawWay& w : doc.ways) {
    if (w.tags.empty() || !relevant(w.tags, options, false)) continue;
    if (w.refs.size() < 2 || w.refs.front() != w.refs.back()) {
      out.skipped.add("open way");
      continue;
    }
    if (w.refs.size() < 4) {
      out.skipped.add("degenerate closed way");
      continue;
    }
    auto ring = resolve(doc, w.refs);
    if (!ring) {
      out.skipped.add("unresolved node reference");
      continue;
    }
    Feature f;
    f.id = "w" + std::to_string(w.id);
    f.geometry = Polygon::from_rings(std::move(*ring));
    f.tags = w.tags;
    out.features.push_back(std::move(f));
  }

  for (const RawRelation& r : doc.relations) {
    if (!relevant(r.tags, options, true)) continue;
    const auto type = r.tags.find("type");
    if (type == r.tags.end() || type->second != "multipolygon") {
      out.skipped.add("non-multipolygon relation");
      continue;
    }
    build_multipolygon(doc, r, out);
  }
  return out;
}

}  // namespace osmbc
