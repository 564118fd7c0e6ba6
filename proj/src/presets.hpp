#pragma once

#include <span>
#include <string_view>
#include <utility>

namespace osmbc::detail {

/// Built-in ground-truth mappings as (name, JSON) pairs, sorted by name.
std::span<const std::pair<std::string_view, std::string_view>> embedded_presets();

}  // namespace osmbc::detail
