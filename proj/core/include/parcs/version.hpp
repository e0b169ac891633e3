#pragma once

namespace parcs {

inline constexpr const char* kVersion = "0.1.0";

} // namespace parcs
