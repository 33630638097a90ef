#pragma once

namespace styleval {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace styleval
