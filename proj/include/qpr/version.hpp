#pragma once

namespace qpr {

inline constexpr const char* kToolkitName = "renormqp";
inline constexpr const char* kToolkitVersion = "0.1.0";

}  // namespace qpr
