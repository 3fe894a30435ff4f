#pragma once

namespace frisk {

inline constexpr const char* version = "1.0.0";

} // namespace frisk
