#pragma once

namespace dirhide {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace dirhide
