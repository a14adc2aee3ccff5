#pragma once

namespace agimetrics {

inline constexpr const char* kEngineVersion = "1.0.0";

}  // namespace agimetrics
