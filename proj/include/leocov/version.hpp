#pragma once

namespace leocov {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace leocov
