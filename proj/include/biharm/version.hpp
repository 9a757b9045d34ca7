#pragma once

namespace biharm {

inline constexpr const char* kToolName = "biharmlab";
inline constexpr const char* kToolVersion = "0.1.0";

}  // namespace biharm
