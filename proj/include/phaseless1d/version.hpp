#pragma once

namespace ph1d {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace ph1d
