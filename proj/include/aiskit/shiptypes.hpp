#pragma once

#include <string_view>

namespace aiskit {

/// Descriptive name for an AIS ship-and-cargo type code (0-255).
std::string_view ship_type_name(int code);

/// Coarse legend class: "cargo", "tanker", "fishing", "passenger" or "other".
std::string_view ship_type_class(int code);

}  // namespace aiskit
