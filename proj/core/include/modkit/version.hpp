#pragma once

namespace modkit {

inline constexpr const char* kToolName = "modkit";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace modkit
