#pragma once

namespace evlearn {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace evlearn
