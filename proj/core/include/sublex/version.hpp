#pragma once

namespace sublex {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace sublex
