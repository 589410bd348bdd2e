#pragma once

namespace malbench {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace malbench
