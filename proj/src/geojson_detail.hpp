#pragma once

#include "json.hpp"
#include "osmbc/geometry.hpp"

namespace osmbc::detail {

nlohmann::json polygon_geometry_json(const Polygon& p);
/// Builds a polygon from GeoJSON Polygon coordinates; throws ParseError on bad structure.
Polygon polygon_from_json(const nlohmann::json& rings);

}  // namespace osmbc::detail
